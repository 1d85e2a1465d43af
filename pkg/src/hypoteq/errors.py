"""Error taxonomy shared by the parser, resolver, translator, engine and services.

Every error carries a stable ``kind`` string so the CLI and the HTTP API can
render a uniform structured body.
"""

from __future__ import annotations


class HypoteqError(Exception):
    """Base class for all user-facing errors."""

    kind = "Error"

    def payload(self) -> dict:
        """Structured form used by the HTTP API error body."""
        return {"kind": self.kind, "message": str(self)}


class SqlSyntaxError(HypoteqError):
    kind = "SyntaxError"

    def __init__(self, message: str, line: int, col: int, expected: str | None = None):
        suffix = f" (expected {expected})" if expected else ""
        super().__init__(f"{message} at line {line}:{col}{suffix}")
        self.line = line
        self.col = col
        self.expected = expected

    def payload(self) -> dict:
        return {"kind": self.kind, "message": str(self), "line": self.line, "col": self.col}


class DatalogSyntaxError(SqlSyntaxError):
    kind = "SyntaxError"


class UnsupportedFeature(HypoteqError):
    kind = "UnsupportedFeature"

    def __init__(self, token: str, detail: str = ""):
        super().__init__(f"unsupported feature: {token}" + (f" ({detail})" if detail else ""))
        self.token = token


class UnknownRelation(HypoteqError):
    kind = "UnknownRelation"

    def __init__(self, name: str):
        super().__init__(f"unknown relation: {name}")
        self.name = name


class DuplicateRelation(HypoteqError):
    kind = "DuplicateRelation"

    def __init__(self, name: str):
        super().__init__(f"relation name already visible in this scope: {name}")
        self.name = name


class UnknownColumn(HypoteqError):
    kind = "UnknownColumn"

    def __init__(self, name: str):
        super().__init__(f"unknown column: {name}")
        self.name = name


class AmbiguousColumn(HypoteqError):
    kind = "AmbiguousColumn"

    def __init__(self, name: str):
        super().__init__(f"ambiguous column: {name}")
        self.name = name


class ArityMismatch(HypoteqError):
    kind = "ArityMismatch"

    def __init__(self, name: str, seen: int, expected: int):
        super().__init__(f"arity mismatch for {name}: got {seen}, expected {expected}")
        self.name = name
        self.seen = seen
        self.expected = expected


class TypeMismatch(HypoteqError):
    kind = "TypeMismatch"

    def __init__(self, column: str, t1: str, t2: str):
        super().__init__(f"type mismatch on {column}: {t1} vs {t2}")
        self.column = column
        self.t1 = t1
        self.t2 = t2


class NotStratifiable(HypoteqError):
    kind = "NotStratifiable"

    def __init__(self, cycle: tuple[str, ...]):
        super().__init__("program is not stratifiable; negation cycle through: " + " -> ".join(cycle))
        self.cycle = cycle


class UnsafeRule(HypoteqError):
    kind = "UnsafeRule"

    def __init__(self, rule_text: str, variables: tuple[str, ...]):
        super().__init__(f"unsafe rule {rule_text}: unrestricted variables {', '.join(variables)}")
        self.rule_text = rule_text
        self.variables = variables


class EvalTypeError(HypoteqError):
    kind = "TypeError"

    def __init__(self, op: str, v1: object, v2: object):
        super().__init__(f"cannot compare {v1!r} {op} {v2!r}: incompatible types")
        self.op = op


class VersionError(HypoteqError):
    kind = "VersionError"

    def __init__(self, header: str):
        super().__init__(f"unrecognized database file header: {header!r}")
        self.header = header
