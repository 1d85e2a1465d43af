"""Name resolution and schema inference for parsed queries.

Scoping rules:

* WITH def names must be fresh (not visible as a catalog relation, an
  enclosing WITH def or an enclosing ASSUME target); defs see only the
  outer scope, the body additionally sees the defs.
* ASSUME targets may name an existing relation (its meaning is overloaded
  or shrunk) or a fresh one (defined with the assumed schema). Assumption
  queries may reference sibling targets as long as the target dependency
  graph is acyclic; the resolved node records a topological evaluation
  order for the reference evaluator.
* Subqueries never see the aliases of an enclosing FROM (no correlation).

Resolution also performs all type checking, so the translator and the
reference evaluator run on well-typed trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from ..errors import (
    AmbiguousColumn,
    ArityMismatch,
    DuplicateRelation,
    TypeMismatch,
    UnknownColumn,
    UnknownRelation,
    UnsupportedFeature,
)
from . import ast
from .types import ColumnType, RelationSchema, SchemaColumn, Value, type_of_literal

Catalog = Mapping[str, RelationSchema]


@dataclass(frozen=True)
class RCol:
    rel: int  # index into the enclosing select's FROM list
    pos: int
    name: str
    type: ColumnType
    provenance: str | None


@dataclass(frozen=True)
class RLit:
    value: Value
    type: ColumnType


RItem = Union[RCol, RLit]


@dataclass(frozen=True)
class RRel:
    alias: str
    schema: RelationSchema
    name: str | None = None  # underlying relation name; None for subqueries
    subquery: "RQuery | None" = None


@dataclass(frozen=True)
class RCompare:
    lhs: RItem
    op: str
    rhs: RItem


@dataclass(frozen=True)
class RAnd:
    left: "RCond"
    right: "RCond"


@dataclass(frozen=True)
class ROr:
    left: "RCond"
    right: "RCond"


@dataclass(frozen=True)
class RNot:
    inner: "RCond"


@dataclass(frozen=True)
class RIn:
    items: tuple[RItem, ...]
    query: "RQuery"
    negated: bool


RCond = Union[RCompare, RAnd, ROr, RNot, RIn]


@dataclass(frozen=True)
class RSelect:
    items: tuple[RItem, ...]
    from_: tuple[RRel, ...]
    where: RCond | None
    schema: RelationSchema


@dataclass(frozen=True)
class RSelectNoFrom:
    items: tuple[RLit, ...]
    schema: RelationSchema


@dataclass(frozen=True)
class RUnionAll:
    left: "RQuery"
    right: "RQuery"
    schema: RelationSchema


@dataclass(frozen=True)
class RWithDef:
    name: str
    query: "RQuery"
    schema: RelationSchema


@dataclass(frozen=True)
class RWith:
    defs: tuple[RWithDef, ...]
    body: "RQuery"
    schema: RelationSchema


@dataclass(frozen=True)
class RAssumption:
    query: "RQuery"
    polarity: str  # "in" | "not in"
    target: str
    target_schema: RelationSchema
    defines: bool  # True when the target did not previously exist


@dataclass(frozen=True)
class RAssume:
    assumptions: tuple[RAssumption, ...]
    eval_order: tuple[int, ...]  # indexes into ``assumptions``, dependency-first
    body: "RQuery"
    schema: RelationSchema


RQuery = Union[RSelect, RSelectNoFrom, RUnionAll, RWith, RAssume]


def resolve(q: ast.Query, catalog: Catalog, name: str = "answer") -> RQuery:
    """Resolve and type-check a parsed query against a catalog."""
    env = dict(catalog)
    return _resolve(q, env, name)


def infer_schema(rq: RQuery) -> RelationSchema:
    """Output schema of a resolved query (computed during resolution)."""
    return rq.schema


# ---------------------------------------------------------------------------

def _resolve(q: ast.Query, env: dict[str, RelationSchema], name: str) -> RQuery:
    if isinstance(q, ast.SelectNoFrom):
        return _resolve_no_from(q, name)
    if isinstance(q, ast.Select):
        return _resolve_select(q, env, name)
    if isinstance(q, ast.UnionAll):
        return _resolve_union(q, env, name)
    if isinstance(q, ast.With):
        return _resolve_with(q, env, name)
    if isinstance(q, ast.Assume):
        return _resolve_assume(q, env, name)
    raise TypeError(f"not a query: {q!r}")


def _make_schema(name: str, columns: list[SchemaColumn]) -> RelationSchema:
    """Output schema; duplicate column names get positional suffixes."""
    seen: dict[str, int] = {}
    out = []
    for i, col in enumerate(columns):
        n = col.name
        if n in seen:
            n = f"{n}_{i + 1}"
        seen[n] = i
        out.append(SchemaColumn(n, col.type, col.provenance))
    return RelationSchema(name, tuple(out))


def _resolve_no_from(q: ast.SelectNoFrom, name: str) -> RSelectNoFrom:
    items = tuple(RLit(l.value, type_of_literal(l.value)) for l in q.items)
    columns = [SchemaColumn(f"a{i + 1}", it.type, None) for i, it in enumerate(items)]
    return RSelectNoFrom(items, _make_schema(name, columns))


def _resolve_select(q: ast.Select, env: dict[str, RelationSchema], name: str) -> RSelect:
    rels: list[RRel] = []
    for ref in q.from_:
        if isinstance(ref, ast.TableRef):
            schema = env.get(ref.name)
            if schema is None:
                raise UnknownRelation(ref.name)
            rels.append(RRel(alias=ref.bound_name, schema=schema, name=ref.name))
        else:
            sub = _resolve(ref.query, env, ref.alias)
            rels.append(RRel(alias=ref.alias, schema=sub.schema, subquery=sub))
    aliases = [r.alias for r in rels]
    for alias in aliases:
        if aliases.count(alias) > 1:
            raise DuplicateRelation(alias)

    if isinstance(q.items, ast.Star):
        items: list[RItem] = [
            _rcol(rels, ri, pos)
            for ri, rel in enumerate(rels)
            for pos in range(rel.schema.arity)
        ]
    else:
        items = [_resolve_item(it, rels) for it in q.items]

    where = _resolve_condition(q.where, rels, env) if q.where is not None else None

    columns = []
    for i, it in enumerate(items):
        if isinstance(it, RCol):
            columns.append(SchemaColumn(it.name, it.type, it.provenance))
        else:
            columns.append(SchemaColumn(f"a{i + 1}", it.type, None))
    return RSelect(tuple(items), tuple(rels), where, _make_schema(name, columns))


def _rcol(rels: list[RRel], rel_index: int, pos: int) -> RCol:
    rel = rels[rel_index]
    col = rel.schema.columns[pos]
    if rel.name is not None:
        provenance = f"{rel.name}.{col.name}"
    else:
        provenance = col.provenance
    return RCol(rel_index, pos, col.name, col.type, provenance)


def _resolve_item(item: ast.SelectItem, rels: list[RRel]) -> RItem:
    if isinstance(item, ast.Literal):
        return RLit(item.value, type_of_literal(item.value))
    if item.table is not None:
        for ri, rel in enumerate(rels):
            if rel.alias == item.table:
                for pos, col in enumerate(rel.schema.columns):
                    if col.name == item.column:
                        return _rcol(rels, ri, pos)
                raise UnknownColumn(str(item))
        raise UnknownRelation(item.table)
    hits = []
    for ri, rel in enumerate(rels):
        for pos, col in enumerate(rel.schema.columns):
            if col.name == item.column:
                hits.append((ri, pos))
    if not hits:
        raise UnknownColumn(item.column)
    if len(hits) > 1:
        raise AmbiguousColumn(item.column)
    return _rcol(rels, *hits[0])


def _resolve_condition(cond: ast.Condition, rels: list[RRel],
                       env: dict[str, RelationSchema]) -> RCond:
    if isinstance(cond, ast.And):
        return RAnd(_resolve_condition(cond.left, rels, env),
                    _resolve_condition(cond.right, rels, env))
    if isinstance(cond, ast.Or):
        return ROr(_resolve_condition(cond.left, rels, env),
                   _resolve_condition(cond.right, rels, env))
    if isinstance(cond, ast.Not):
        return RNot(_resolve_condition(cond.inner, rels, env))
    if isinstance(cond, ast.Compare):
        lhs = _resolve_item(cond.lhs, rels)
        rhs = _resolve_item(cond.rhs, rels)
        if not lhs.type.compatible(rhs.type):
            label = str(cond.lhs) if isinstance(cond.lhs, ast.ColumnRef) else str(cond.rhs)
            raise TypeMismatch(label, str(lhs.type), str(rhs.type))
        return RCompare(lhs, cond.op, rhs)
    # [NOT] IN: the subquery sees the outer environment, never the FROM aliases.
    items = tuple(_resolve_item(it, rels) for it in cond.items)
    sub = _resolve(cond.query, env, "subquery")
    if sub.schema.arity != len(items):
        raise ArityMismatch("in-subquery", sub.schema.arity, len(items))
    for it, col in zip(items, sub.schema.columns):
        if not it.type.compatible(col.type):
            raise TypeMismatch(col.name, str(it.type), str(col.type))
    return RIn(items, sub, cond.negated)


def _resolve_union(q: ast.UnionAll, env: dict[str, RelationSchema], name: str) -> RUnionAll:
    left = _resolve(q.left, env, name)
    right = _resolve(q.right, env, name)
    if left.schema.arity != right.schema.arity:
        raise ArityMismatch(name, right.schema.arity, left.schema.arity)
    for lc, rc in zip(left.schema.columns, right.schema.columns):
        if lc.type.base != rc.type.base:
            raise TypeMismatch(lc.name, str(lc.type), str(rc.type))
    return RUnionAll(left, right, _make_schema(name, list(left.schema.columns)))


def _resolve_with(q: ast.With, env: dict[str, RelationSchema], name: str) -> RWith:
    names = [d.name for d in q.defs]
    for n in names:
        if names.count(n) > 1 or n in env:
            raise DuplicateRelation(n)
    defs = []
    for d in q.defs:
        sub = _resolve(d.query, env, d.name)
        schema = _named_schema(d.name, d.columns, sub.schema)
        defs.append(RWithDef(d.name, sub, schema))
    body_env = dict(env)
    for rd in defs:
        body_env[rd.name] = rd.schema
    body = _resolve(q.body, body_env, name)
    return RWith(tuple(defs), body, _make_schema(name, list(body.schema.columns)))


def _named_schema(name: str, columns: tuple[str, ...] | None,
                  inferred: RelationSchema) -> RelationSchema:
    """Schema of a WITH def or fresh ASSUME target: declared column names
    (or the inferred ones) with the defining query's types."""
    if columns is not None:
        if len(columns) != inferred.arity:
            raise ArityMismatch(name, inferred.arity, len(columns))
        cols = tuple(SchemaColumn(n, c.type, None)
                     for n, c in zip(columns, inferred.columns))
        return RelationSchema(name, cols)
    return RelationSchema(name, tuple(SchemaColumn(c.name, c.type, None)
                                      for c in inferred.columns))


def _resolve_assume(q: ast.Assume, env: dict[str, RelationSchema], name: str) -> RAssume:
    targets = {a.target for a in q.assumptions}
    refs_per_assumption = [
        _referenced_relations(a.query) & targets for a in q.assumptions
    ]

    # Group assumptions per target; dependencies are between targets.
    deps: dict[str, set[str]] = {t: set() for t in targets}
    for a, refs in zip(q.assumptions, refs_per_assumption):
        deps[a.target] |= refs
    order = _topo_targets(deps)

    body_env = dict(env)
    resolved: dict[int, RAssumption] = {}
    eval_order: list[int] = []
    for target in order:
        for idx, a in enumerate(q.assumptions):
            if a.target != target:
                continue
            sub = _resolve(a.query, body_env, target)
            if target in body_env:
                existing = body_env[target]
                if existing.arity != sub.schema.arity:
                    raise ArityMismatch(target, sub.schema.arity, existing.arity)
                for qc, tc in zip(sub.schema.columns, existing.columns):
                    if not qc.type.compatible(tc.type):
                        raise TypeMismatch(f"{target}.{tc.name}", str(qc.type), str(tc.type))
                if a.columns is not None and len(a.columns) != existing.arity:
                    raise ArityMismatch(target, len(a.columns), existing.arity)
                resolved[idx] = RAssumption(sub, a.polarity, target, existing, defines=False)
            else:
                schema = _named_schema(target, a.columns, sub.schema)
                body_env[target] = schema
                resolved[idx] = RAssumption(sub, a.polarity, target, schema, defines=True)
            eval_order.append(idx)

    assumptions = tuple(resolved[i] for i in range(len(q.assumptions)))
    body = _resolve(q.body, body_env, name)
    return RAssume(assumptions, tuple(eval_order), body,
                   _make_schema(name, list(body.schema.columns)))


def _topo_targets(deps: dict[str, set[str]]) -> list[str]:
    """Dependency-first target order; cycles (incl. self-reference) are
    rejected, which keeps the reference evaluator a simple structural
    recursion."""
    order: list[str] = []
    state: dict[str, int] = {}  # 0 = visiting, 1 = done

    def visit(node: str, trail: tuple[str, ...]):
        s = state.get(node)
        if s == 1:
            return
        if s == 0:
            cycle = " -> ".join(trail[trail.index(node):] + (node,))
            raise UnsupportedFeature("assume", f"cyclic assumption reference: {cycle}")
        state[node] = 0
        for dep in sorted(deps[node]):
            visit(dep, trail + (node,))
        state[node] = 1
        order.append(node)

    for t in sorted(deps):
        visit(t, ())
    return order


def _referenced_relations(q: ast.Query) -> set[str]:
    """All relation names referenced anywhere inside a query, including
    nested ASSUME targets (overloading reads the enclosing meaning)."""
    names: set[str] = set()

    def walk_query(node: ast.Query):
        if isinstance(node, ast.SelectNoFrom):
            return
        if isinstance(node, ast.Select):
            for ref in node.from_:
                if isinstance(ref, ast.TableRef):
                    names.add(ref.name)
                else:
                    walk_query(ref.query)
            if node.where is not None:
                walk_cond(node.where)
        elif isinstance(node, ast.UnionAll):
            walk_query(node.left)
            walk_query(node.right)
        elif isinstance(node, ast.With):
            for d in node.defs:
                walk_query(d.query)
            walk_query(node.body)
        else:
            for a in node.assumptions:
                names.add(a.target)
                walk_query(a.query)
            walk_query(node.body)

    def walk_cond(cond: ast.Condition):
        if isinstance(cond, (ast.And, ast.Or)):
            walk_cond(cond.left)
            walk_cond(cond.right)
        elif isinstance(cond, ast.Not):
            walk_cond(cond.inner)
        elif isinstance(cond, ast.InSubquery):
            walk_query(cond.query)

    walk_query(q)
    return names
