"""Prints ASTs back to SQL text; parse(print(ast)) round-trips."""

from __future__ import annotations

from .ast import (
    And,
    Assume,
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
)
from .types import Value


def format_sql_value(value: Value) -> str:
    if isinstance(value, str):
        return "'" + value.replace("'", "''") + "'"
    return repr(value)


def format_item(item: SelectItem) -> str:
    if isinstance(item, Literal):
        return format_sql_value(item.value)
    return str(item)


def format_condition(cond: Condition, parent_level: int = 0) -> str:
    # precedence levels: or=1, and=2, not=3, primary=4
    if isinstance(cond, Or):
        text = f"{format_condition(cond.left, 1)} or {format_condition(cond.right, 1)}"
        level = 1
    elif isinstance(cond, And):
        text = f"{format_condition(cond.left, 2)} and {format_condition(cond.right, 2)}"
        level = 2
    elif isinstance(cond, Not):
        text = f"not {format_condition(cond.inner, 3)}"
        level = 3
    elif isinstance(cond, Compare):
        text = f"{format_item(cond.lhs)}{cond.op}{format_item(cond.rhs)}"
        level = 4
    else:
        items = ",".join(format_item(i) for i in cond.items)
        if len(cond.items) > 1:
            items = f"({items})"
        word = "not in" if cond.negated else "in"
        text = f"{items} {word} ({format_query(cond.query)})"
        level = 4
    if level < parent_level or (parent_level == 3 and level == 3):
        return f"({text})"
    return text


def format_query(q: Query) -> str:
    if isinstance(q, SelectNoFrom):
        return "select " + ", ".join(format_item(i) for i in q.items)
    if isinstance(q, Select):
        if isinstance(q.items, Star):
            items = "*"
        else:
            items = ", ".join(format_item(i) for i in q.items)
        rels = []
        for r in q.from_:
            if isinstance(r, TableRef):
                rels.append(r.name + (f" {r.alias}" if r.alias else ""))
            else:
                rels.append(f"({format_query(r.query)}) {r.alias}")
        text = f"select {items} from " + ", ".join(rels)
        if q.where is not None:
            text += " where " + format_condition(q.where)
        return text
    if isinstance(q, UnionAll):
        left = format_query(q.left)
        if isinstance(q.left, (With, Assume)):
            left = f"({left})"
        right = format_query(q.right)
        if isinstance(q.right, (UnionAll, With, Assume)):
            right = f"({right})"
        return f"{left} union all {right}"
    if isinstance(q, With):
        defs = []
        for d in q.defs:
            cols = f"({','.join(d.columns)})" if d.columns else ""
            defs.append(f"{d.name}{cols} as ({format_query(d.query)})")
        return "with " + ", ".join(defs) + " " + format_query(q.body)
    assumptions = []
    for a in q.assumptions:
        cols = f"({','.join(a.columns)})" if a.columns else ""
        assumptions.append(f"({format_query(a.query)}) {a.polarity} {a.target}{cols}")
    return "assume " + ", ".join(assumptions) + " " + format_query(q.body)


def format_statement(stmt: Statement) -> str:
    if isinstance(stmt, CreateTable):
        cols = ", ".join(f"{name} {spelling}" for name, spelling in stmt.columns)
        return f"create table {stmt.name}({cols})"
    if isinstance(stmt, InsertInto):
        rows = ",".join("(" + ",".join(format_sql_value(v) for v in row) + ")" for row in stmt.rows)
        return f"insert into {stmt.name} values {rows}"
    if isinstance(stmt, DropTable):
        return f"drop table {stmt.name}"
    return format_query(stmt)
