"""AST for the supported SQL subset.

Queries: SELECT (column refs / literals, optional WHERE), UNION ALL,
WITH (temporary views), ASSUME ([NOT] IN hypothetical assumptions) and
FROM-less SELECT. DDL: CREATE TABLE / INSERT INTO / DROP TABLE.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .types import Value


@dataclass(frozen=True)
class ColumnRef:
    table: str | None
    column: str

    def __str__(self) -> str:
        return f"{self.table}.{self.column}" if self.table else self.column


@dataclass(frozen=True)
class Literal:
    value: Value


SelectItem = Union[ColumnRef, Literal]


@dataclass(frozen=True)
class Star:
    pass


@dataclass(frozen=True)
class TableRef:
    name: str
    alias: str | None = None

    @property
    def bound_name(self) -> str:
        return self.alias or self.name


@dataclass(frozen=True)
class SubqueryRef:
    query: "Query"
    alias: str

    @property
    def bound_name(self) -> str:
        return self.alias


RelRef = Union[TableRef, SubqueryRef]


@dataclass(frozen=True)
class Compare:
    lhs: SelectItem
    op: str  # = <> < <= > >=
    rhs: SelectItem


@dataclass(frozen=True)
class And:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class Or:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class Not:
    inner: "Condition"


@dataclass(frozen=True)
class InSubquery:
    items: tuple[SelectItem, ...]
    query: "Query"
    negated: bool


Condition = Union[Compare, And, Or, Not, InSubquery]


@dataclass(frozen=True)
class Select:
    items: tuple[SelectItem, ...] | Star
    from_: tuple[RelRef, ...]
    where: Condition | None = None


@dataclass(frozen=True)
class SelectNoFrom:
    items: tuple[Literal, ...]


@dataclass(frozen=True)
class UnionAll:
    left: "Query"
    right: "Query"


@dataclass(frozen=True)
class WithDef:
    name: str
    columns: tuple[str, ...] | None
    query: "Query"


@dataclass(frozen=True)
class With:
    defs: tuple[WithDef, ...]
    body: "Query"


@dataclass(frozen=True)
class Assumption:
    query: "Query"
    polarity: str  # "in" | "not in"
    target: str
    columns: tuple[str, ...] | None = None


@dataclass(frozen=True)
class Assume:
    assumptions: tuple[Assumption, ...]
    body: "Query"


Query = Union[Select, SelectNoFrom, UnionAll, With, Assume]


@dataclass(frozen=True)
class CreateTable:
    name: str
    columns: tuple[tuple[str, str], ...]  # (column name, declared type spelling)


@dataclass(frozen=True)
class InsertInto:
    name: str
    rows: tuple[tuple[Value, ...], ...]


@dataclass(frozen=True)
class DropTable:
    name: str


DDL = Union[CreateTable, InsertInto, DropTable]
Statement = Union[Select, SelectNoFrom, UnionAll, With, Assume, CreateTable, InsertInto, DropTable]
