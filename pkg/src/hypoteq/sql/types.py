"""Relation schemas and column types.

``varchar(n)``, ``string(n)`` and ``string`` are all the same base type
(string); the declared spelling is preserved for display. No NULLs.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import TypeMismatch

Value = int | float | str


@dataclass(frozen=True)
class ColumnType:
    base: str  # "int" | "float" | "string"
    spelling: str

    def __str__(self) -> str:
        return self.spelling

    def compatible(self, other: "ColumnType") -> bool:
        numeric = {"int", "float"}
        if self.base in numeric and other.base in numeric:
            return True
        return self.base == other.base


INT = ColumnType("int", "int")
FLOAT = ColumnType("float", "float")
STRING = ColumnType("string", "string")


def type_of_literal(value: Value) -> ColumnType:
    if isinstance(value, bool):
        raise TypeError("booleans are not SQL values")
    if isinstance(value, int):
        return INT
    if isinstance(value, float):
        return FLOAT
    return STRING


@dataclass(frozen=True)
class SchemaColumn:
    name: str
    type: ColumnType
    provenance: str | None = None  # e.g. "student.name"

    def header(self) -> str:
        qualified = self.provenance if self.provenance else self.name
        return f"{qualified}:{self.type}"


@dataclass(frozen=True)
class RelationSchema:
    relation: str
    columns: tuple[SchemaColumn, ...]

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate column names in schema for {self.relation}")

    @property
    def arity(self) -> int:
        return len(self.columns)

    def header(self) -> str:
        return f"{self.relation}(" + ",".join(c.header() for c in self.columns) + ")"

    def check_row(self, row: tuple[Value, ...]) -> tuple[Value, ...]:
        """Validate a row against this schema, coercing int to float columns."""
        if len(row) != self.arity:
            raise TypeMismatch(self.relation, f"{len(row)} values", f"{self.arity} columns")
        out = []
        for col, v in zip(self.columns, row):
            vt = type_of_literal(v)
            if col.type.base == "float" and vt.base == "int":
                v, vt = float(v), FLOAT
            if col.type.base != vt.base:
                raise TypeMismatch(f"{self.relation}.{col.name}", str(col.type), vt.base)
            out.append(v)
        return tuple(out)


def parse_type(spelling: str) -> ColumnType:
    """Column type from a declared spelling like ``varchar(30)``."""
    s = spelling.strip().lower()
    base = s.split("(", 1)[0].strip()
    if base in ("int", "integer"):
        return ColumnType("int", s)
    if base in ("float", "real"):
        return ColumnType("float", s)
    if base in ("string", "varchar", "char"):
        return ColumnType("string", s)
    raise TypeMismatch(spelling, spelling, "int|float|string|varchar(n)")
