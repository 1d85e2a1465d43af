"""Recursive-descent parser for the SQL subset.

Keywords are case-insensitive and identifiers are lowercased on entry;
string literals keep their case. Out-of-scope SQL (DISTINCT, GROUP BY,
aggregates, ORDER BY, JOIN syntax, ...) raises UnsupportedFeature rather
than a generic syntax error.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SqlSyntaxError, UnsupportedFeature
from .ast import (
    And,
    Assume,
    Assumption,
    ColumnRef,
    Compare,
    Condition,
    CreateTable,
    DropTable,
    InsertInto,
    InSubquery,
    Literal,
    Not,
    Or,
    Query,
    Select,
    SelectItem,
    SelectNoFrom,
    Star,
    Statement,
    SubqueryRef,
    TableRef,
    UnionAll,
    With,
    WithDef,
)
from .types import Value

_KEYWORDS = {
    "select", "from", "where", "and", "or", "not", "in", "union", "all",
    "with", "as", "assume", "create", "table", "insert", "into", "values",
    "drop",
}

_UNSUPPORTED_KEYWORDS = {
    "distinct", "group", "order", "having", "join", "inner", "outer", "left",
    "right", "cross", "on", "exists", "between", "like", "limit", "null",
    "update", "delete", "view",
}

_PUNCT = ["<>", "<=", ">=", "(", ")", ",", ".", "*", "=", "<", ">", ";"]


@dataclass(frozen=True)
class _Token:
    kind: str  # keyword | ident | int | float | string | punct | eof
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == "'":
            j, buf = i + 1, []
            while j < n:
                if text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        buf.append("'")
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            else:
                raise SqlSyntaxError("unterminated string literal", start_line, start_col)
            tokens.append(_Token("string", "".join(buf), start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            kind = "int"
            if j + 1 < n and text[j] == "." and text[j + 1].isdigit():
                kind = "float"
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            tokens.append(_Token(kind, text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j].lower()
            kind = "keyword" if word in _KEYWORDS else "ident"
            tokens.append(_Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == "-":
            # unary minus for numeric literals; '--' comments handled above
            tokens.append(_Token("punct", "-", start_line, start_col))
            i += 1
            col += 1
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(_Token("punct", p, start_line, start_col))
                i += len(p)
                col += len(p)
                break
        else:
            raise SqlSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def match_kw(self, *words: str) -> bool:
        tok = self.peek()
        if tok.kind == "keyword" and tok.value == words[0]:
            for k, w in enumerate(words[1:], start=1):
                nxt = self.peek(k)
                if not (nxt.kind == "keyword" and nxt.value == w):
                    return False
            for _ in words:
                self.advance()
            return True
        return False

    def match_punct(self, value: str) -> bool:
        tok = self.peek()
        if tok.kind == "punct" and tok.value == value:
            self.advance()
            return True
        return False

    def expect_kw(self, word: str) -> None:
        if not self.match_kw(word):
            raise self.fail(word.upper())

    def expect_punct(self, value: str) -> None:
        if not self.match_punct(value):
            raise self.fail(value)

    def expect_ident(self) -> str:
        tok = self.peek()
        if tok.kind == "ident":
            self.advance()
            return tok.value
        raise self.fail("identifier")

    def fail(self, expected: str) -> SqlSyntaxError:
        tok = self.peek()
        self.check_unsupported(tok)
        shown = tok.value if tok.kind != "eof" else "end of input"
        return SqlSyntaxError(f"found {shown!r}", tok.line, tok.col, expected=expected)

    def check_unsupported(self, tok: _Token) -> None:
        if tok.kind == "ident" and tok.value in _UNSUPPORTED_KEYWORDS:
            raise UnsupportedFeature(tok.value)

    # -- statements ----------------------------------------------------------

    def parse_statement(self) -> Statement:
        tok = self.peek()
        if tok.kind == "keyword" and tok.value == "create":
            stmt: Statement = self.parse_create()
        elif tok.kind == "keyword" and tok.value == "insert":
            stmt = self.parse_insert()
        elif tok.kind == "keyword" and tok.value == "drop":
            stmt = self.parse_drop()
        else:
            stmt = self.parse_query()
        self.match_punct(";")
        if self.peek().kind != "eof":
            raise self.fail("end of statement")
        return stmt

    def parse_create(self) -> CreateTable:
        self.expect_kw("create")
        self.expect_kw("table")
        name = self.expect_ident()
        self.expect_punct("(")
        columns = []
        while True:
            col = self.expect_ident()
            spelling = self.parse_type_spelling()
            columns.append((col, spelling))
            if not self.match_punct(","):
                break
        self.expect_punct(")")
        return CreateTable(name, tuple(columns))

    def parse_type_spelling(self) -> str:
        base = self.expect_ident()
        if self.match_punct("("):
            tok = self.peek()
            if tok.kind != "int":
                raise self.fail("length")
            self.advance()
            self.expect_punct(")")
            return f"{base}({tok.value})"
        return base

    def parse_insert(self) -> InsertInto:
        self.expect_kw("insert")
        self.expect_kw("into")
        name = self.expect_ident()
        self.expect_kw("values")
        rows = []
        while True:
            self.expect_punct("(")
            row = [self.parse_literal_value()]
            while self.match_punct(","):
                row.append(self.parse_literal_value())
            self.expect_punct(")")
            rows.append(tuple(row))
            if not self.match_punct(","):
                break
        return InsertInto(name, tuple(rows))

    def parse_drop(self) -> DropTable:
        self.expect_kw("drop")
        self.expect_kw("table")
        return DropTable(self.expect_ident())

    # -- queries ---------------------------------------------------------------

    def parse_query(self) -> Query:
        if self.peek().kind == "keyword" and self.peek().value == "with":
            return self.parse_with()
        if self.peek().kind == "keyword" and self.peek().value == "assume":
            return self.parse_assume()
        return self.parse_union()

    def parse_with(self) -> Query:
        self.expect_kw("with")
        defs = []
        while True:
            name = self.expect_ident()
            columns = self.parse_name_list()
            self.expect_kw("as")
            self.expect_punct("(")
            query = self.parse_query()
            self.expect_punct(")")
            defs.append(WithDef(name, columns, query))
            if not self.match_punct(","):
                break
        body = self.parse_query()
        return With(tuple(defs), body)

    def parse_assume(self) -> Query:
        self.expect_kw("assume")
        assumptions = []
        while True:
            self.expect_punct("(")
            query = self.parse_query()
            self.expect_punct(")")
            polarity = "in"
            if self.match_kw("not", "in"):
                polarity = "not in"
            else:
                self.expect_kw("in")
            target = self.expect_ident()
            columns = self.parse_name_list()
            assumptions.append(Assumption(query, polarity, target, columns))
            if not self.match_punct(","):
                break
        body = self.parse_query()
        return Assume(tuple(assumptions), body)

    def parse_name_list(self) -> tuple[str, ...] | None:
        if not self.match_punct("("):
            return None
        names = [self.expect_ident()]
        while self.match_punct(","):
            names.append(self.expect_ident())
        self.expect_punct(")")
        return tuple(names)

    def parse_union(self) -> Query:
        left = self.parse_select_atom()
        while self.match_kw("union"):
            if not self.match_kw("all"):
                raise UnsupportedFeature("union", "only UNION ALL is supported")
            right = self.parse_select_atom()
            left = UnionAll(left, right)
        return left

    def parse_select_atom(self) -> Query:
        if self.match_punct("("):
            q = self.parse_query()
            self.expect_punct(")")
            return q
        return self.parse_select()

    def parse_select(self) -> Query:
        self.expect_kw("select")
        tok = self.peek()
        if tok.kind == "ident" and tok.value == "distinct":
            raise UnsupportedFeature("distinct")
        items: tuple[SelectItem, ...] | Star
        if self.match_punct("*"):
            items = Star()
        else:
            lst = [self.parse_select_item()]
            while self.match_punct(","):
                lst.append(self.parse_select_item())
            items = tuple(lst)
        if not self.match_kw("from"):
            if isinstance(items, Star):
                raise self.fail("FROM")
            literals = []
            for item in items:
                if not isinstance(item, Literal):
                    raise self.fail("FROM (column references need a FROM clause)")
                literals.append(item)
            return SelectNoFrom(tuple(literals))
        rels = [self.parse_rel_ref()]
        while self.match_punct(","):
            rels.append(self.parse_rel_ref())
        where = None
        if self.match_kw("where"):
            where = self.parse_condition()
        self.check_unsupported(self.peek())
        return Select(items, tuple(rels), where)

    def parse_select_item(self) -> SelectItem:
        tok = self.peek()
        if tok.kind in ("int", "float", "string") or (tok.kind == "punct" and tok.value == "-"):
            return Literal(self.parse_literal_value())
        if tok.kind == "ident":
            self.check_unsupported(tok)
            if self.peek(1).kind == "punct" and self.peek(1).value == "(":
                raise UnsupportedFeature(tok.value, "function calls / aggregates")
            return self.parse_column_ref()
        raise self.fail("column reference or literal")

    def parse_column_ref(self) -> ColumnRef:
        first = self.expect_ident()
        if self.match_punct("."):
            return ColumnRef(first, self.expect_ident())
        return ColumnRef(None, first)

    def parse_literal_value(self) -> Value:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return int(tok.value)
        if tok.kind == "float":
            self.advance()
            return float(tok.value)
        if tok.kind == "string":
            self.advance()
            return tok.value
        if tok.kind == "punct" and tok.value == "-":
            nxt = self.peek(1)
            if nxt.kind in ("int", "float"):
                self.advance()
                self.advance()
                return -int(nxt.value) if nxt.kind == "int" else -float(nxt.value)
        raise self.fail("literal")

    def parse_rel_ref(self):
        if self.match_punct("("):
            query = self.parse_query()
            self.expect_punct(")")
            self.match_kw("as")
            alias = self.expect_ident()
            return SubqueryRef(query, alias)
        name = self.expect_ident()
        alias = None
        if self.match_kw("as"):
            alias = self.expect_ident()
        elif self.peek().kind == "ident" and self.peek().value not in _UNSUPPORTED_KEYWORDS:
            alias = self.expect_ident()
        else:
            self.check_unsupported(self.peek())
        return TableRef(name, alias)

    # -- conditions ------------------------------------------------------------

    def parse_condition(self) -> Condition:
        left = self.parse_and_condition()
        while self.match_kw("or"):
            right = self.parse_and_condition()
            left = Or(left, right)
        return left

    def parse_and_condition(self) -> Condition:
        left = self.parse_not_condition()
        while self.match_kw("and"):
            right = self.parse_not_condition()
            left = And(left, right)
        return left

    def parse_not_condition(self) -> Condition:
        if self.peek().kind == "keyword" and self.peek().value == "not" \
                and not (self.peek(1).kind == "keyword" and self.peek(1).value == "in"):
            self.advance()
            return Not(self.parse_not_condition())
        return self.parse_primary_condition()

    def parse_primary_condition(self) -> Condition:
        if self.peek().kind == "punct" and self.peek().value == "(":
            saved = self.pos
            self.advance()
            # Row-value tuple for [NOT] IN, e.g. (a, b) not in (...)
            try:
                items = [self.parse_select_item()]
                while self.match_punct(","):
                    items.append(self.parse_select_item())
                if self.match_punct(")"):
                    if self.peek().kind == "keyword" and self.peek().value in ("in", "not"):
                        return self.parse_in_rest(tuple(items))
            except (SqlSyntaxError, UnsupportedFeature):
                pass
            self.pos = saved
            self.expect_punct("(")
            cond = self.parse_condition()
            self.expect_punct(")")
            return cond
        item = self.parse_select_item()
        tok = self.peek()
        if tok.kind == "punct" and tok.value in ("=", "<>", "<", "<=", ">", ">="):
            self.advance()
            rhs = self.parse_select_item()
            return Compare(item, tok.value, rhs)
        if tok.kind == "keyword" and tok.value in ("in", "not"):
            return self.parse_in_rest((item,))
        raise self.fail("comparison operator or IN")

    def parse_in_rest(self, items: tuple[SelectItem, ...]) -> Condition:
        negated = self.match_kw("not")
        self.expect_kw("in")
        self.expect_punct("(")
        query = self.parse_query()
        self.expect_punct(")")
        return InSubquery(items, query, negated)


def parse_sql(text: str) -> Statement:
    """Parse one SQL statement (optionally ``;``-terminated)."""
    return _Parser(_tokenize(text)).parse_statement()
