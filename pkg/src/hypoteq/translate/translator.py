"""Compilation of resolved SQL queries into Hypothetical Datalog.

Case map:

* plain SELECT: one rule per query; FROM relations become conjoined body
  atoms, equality conditions become shared variables or propagated
  constants, residual conditions become comparison goals, [NOT] IN
  becomes a (doubly) negated goal over the translated subquery, OR
  becomes an auxiliary predicate with one rule per disjunct.
* UNION ALL: both branches translated under the same head name; the two
  rule sets are kept apart so duplicates add up.
* WITH: the defs are translated into rule sets and assumed as the
  antecedent of an embedded implication whose consequent is a fresh
  predicate holding the translated body.
* ASSUME: like WITH, except a NOT IN assumption has the target's rule
  heads flipped to restricting (head substitution only; bodies are never
  touched).

A positive IN compiles to ``not not goal`` rather than a bare positive
goal: a membership test must not multiply the multiplicity of the outer
row by the number of matching subquery rows.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..datalog.core import (
    Atom,
    Constant,
    Goal,
    Implication,
    Negated,
    Positive,
    Rule,
    Term,
    Variable,
)
from ..sql.resolver import (
    RAnd,
    RAssume,
    RCol,
    RCompare,
    RCond,
    RIn,
    RItem,
    RLit,
    RNot,
    ROr,
    RQuery,
    RRel,
    RSelect,
    RSelectNoFrom,
    RUnionAll,
    RWith,
)
from ..sql.types import RelationSchema

_SQL_TO_DL_OP = {"=": "=", "<>": "\\=", "<": "<", "<=": "=<", ">": ">", ">=": ">="}
_FLIP_OP = {"=": "\\=", "\\=": "=", "<": ">=", "=<": ">", ">": "=<", ">=": "<"}


@dataclass(frozen=True)
class Translation:
    """Result of compiling one SQL query."""
    rules: tuple[Rule, ...]
    answer: str
    arity: int
    schema: RelationSchema
    generated: frozenset[str]  # fresh predicate names minted here


@dataclass(frozen=True)
class GoalWithRules:
    """A goal (sequence, for conjunctions) plus auxiliary rules."""
    goals: tuple[Goal, ...]
    aux_rules: tuple[Rule, ...]


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


class _Translator:
    def __init__(self):
        self.name_seq = 0
        self.var_seq = 0
        self.rule_seq = 0
        self.generated: set[str] = set()

    def fresh_pred(self) -> str:
        self.name_seq += 1
        name = f"goal{self.name_seq}"
        self.generated.add(name)
        return name

    def fresh_var(self) -> Variable:
        self.var_seq += 1
        return Variable(f"V{self.var_seq}")

    def make_rule(self, head: Atom, body: tuple[Goal, ...] = (),
                  restricting: bool = False) -> Rule:
        rid = ("q", self.rule_seq)
        self.rule_seq += 1
        return Rule(head=head, body=body, restricting=restricting, rule_id=rid)

    # -- query dispatch ------------------------------------------------------

    def translate(self, name: str, rq: RQuery) -> tuple[Rule, ...]:
        if isinstance(rq, RSelectNoFrom):
            return (self.make_rule(Atom(name, tuple(Constant(i.value) for i in rq.items))),)
        if isinstance(rq, RUnionAll):
            return self.translate(name, rq.left) + self.translate(name, rq.right)
        if isinstance(rq, RSelect):
            return self.translate_select(name, rq)
        if isinstance(rq, RWith):
            antecedent = []
            for d in rq.defs:
                antecedent.extend(self.translate(d.name, d.query))
            return self.hypothetical_rule(name, tuple(antecedent), rq.body, rq.schema.arity)
        if isinstance(rq, RAssume):
            antecedent = []
            for a in rq.assumptions:
                rules = self.translate(a.target, a.query)
                if a.polarity == "not in":
                    rules = [_restrict_heads(r, a.target) for r in rules]
                antecedent.extend(rules)
            return self.hypothetical_rule(name, tuple(antecedent), rq.body, rq.schema.arity)
        raise TypeError(f"not a resolved query: {rq!r}")

    def hypothetical_rule(self, name: str, antecedent: tuple[Rule, ...],
                          body: RQuery, arity: int) -> tuple[Rule, ...]:
        s = self.fresh_pred()
        head_vars: tuple[Term, ...] = tuple(self.fresh_var() for _ in range(arity))
        rule = self.make_rule(
            Atom(name, head_vars),
            (Implication(antecedent, Positive(Atom(s, head_vars))),))
        return (rule,) + self.translate(s, body)

    # -- SELECT --------------------------------------------------------------

    def translate_select(self, name: str, rq: RSelect) -> tuple[Rule, ...]:
        uf = _UnionFind()
        bound: dict = {}  # class root -> Constant
        residual: list[RCond] = []
        bindings: list[tuple[RCol, RLit, RCond]] = []

        # Pass 1: merge equality classes; constants bind only once the
        # classes are final, or a later union would lose the binding.
        for conjunct in _conjuncts(rq.where):
            if isinstance(conjunct, RCompare) and conjunct.op == "=":
                lhs, rhs = conjunct.lhs, conjunct.rhs
                if isinstance(lhs, RCol) and isinstance(rhs, RCol):
                    uf.union(_pos(lhs), _pos(rhs))
                    continue
                if isinstance(lhs, RCol) and isinstance(rhs, RLit):
                    bindings.append((lhs, rhs, conjunct))
                    continue
                if isinstance(lhs, RLit) and isinstance(rhs, RCol):
                    bindings.append((rhs, lhs, conjunct))
                    continue
            residual.append(conjunct)
        for col, lit, conjunct in bindings:
            root = uf.find(_pos(col))
            value = Constant(lit.value)
            if root in bound and bound[root] != value:
                residual.append(conjunct)  # contradictory; keep a false goal
            else:
                bound[root] = value

        terms: dict = {}

        def term_of_pos(key: tuple[int, int]) -> Term:
            root = uf.find(key)
            if root in bound:
                return bound[root]
            if root not in terms:
                terms[root] = self.fresh_var()
            return terms[root]

        def term_of(item: RItem) -> Term:
            if isinstance(item, RLit):
                return Constant(item.value)
            return term_of_pos(_pos(item))

        body: list[Goal] = []
        aux: list[Rule] = []
        for ri, rel in enumerate(rq.from_):
            atom_args = tuple(term_of_pos((ri, pos)) for pos in range(rel.schema.arity))
            if rel.name is not None:
                body.append(Positive(Atom(rel.name, atom_args)))
            else:
                sub = self.fresh_pred()
                aux.extend(self.translate(sub, rel.subquery))
                body.append(Positive(Atom(sub, atom_args)))

        for cond in residual:
            gw = self.condition_goals(cond, term_of)
            body.extend(gw.goals)
            aux.extend(gw.aux_rules)

        head_args = tuple(term_of(it) for it in rq.items)
        rule = self.make_rule(Atom(name, head_args), tuple(body))
        return (rule,) + tuple(aux)

    def _bind(self, uf, bound, col: RCol, lit: RLit, residual, conjunct) -> None:
        root = uf.find(_pos(col))
        existing = bound.get(root)
        value = Constant(lit.value)
        if existing is not None and existing != value:
            # Contradictory constants; keep a (false) comparison goal.
            residual.append(conjunct)
            return
        bound[root] = value

    # -- conditions ------------------------------------------------------------

    def condition_goals(self, cond: RCond, term_of) -> GoalWithRules:
        if isinstance(cond, RAnd):
            left = self.condition_goals(cond.left, term_of)
            right = self.condition_goals(cond.right, term_of)
            return GoalWithRules(left.goals + right.goals,
                                 left.aux_rules + right.aux_rules)
        if isinstance(cond, RCompare):
            lhs, rhs = term_of(cond.lhs), term_of(cond.rhs)
            if cond.op == "=" and lhs == rhs:
                return GoalWithRules((), ())
            return GoalWithRules((Positive(Atom(_SQL_TO_DL_OP[cond.op], (lhs, rhs))),), ())
        if isinstance(cond, RIn):
            sub = self.fresh_pred()
            rules = self.translate(sub, cond.query)
            atom = Atom(sub, tuple(term_of(it) for it in cond.items))
            if cond.negated:
                return GoalWithRules((Negated(Positive(atom)),), rules)
            # membership test: exists, not a join
            return GoalWithRules((Negated(Negated(Positive(atom))),), rules)
        if isinstance(cond, RNot):
            inner = cond.inner
            if isinstance(inner, RCompare):
                lhs, rhs = term_of(inner.lhs), term_of(inner.rhs)
                return GoalWithRules(
                    (Positive(Atom(_FLIP_OP[_SQL_TO_DL_OP[inner.op]], (lhs, rhs))),), ())
            if isinstance(inner, RIn):
                flipped = RIn(inner.items, inner.query, not inner.negated)
                return GoalWithRules(self.condition_goals(flipped, term_of).goals,
                                     self.condition_goals(flipped, term_of).aux_rules)
            if isinstance(inner, RNot):
                return self.condition_goals(inner.inner, term_of)
            # NOT over a composite: negate an auxiliary condition predicate,
            # keeping NOT a boolean test (multiplicity one).
            atom, rules = self.condition_pred(inner, term_of)
            return GoalWithRules((Negated(Positive(atom)),), rules)
        # OR: auxiliary predicate, one rule per disjunct (additive duplicates)
        atom, rules = self.condition_pred(cond, term_of)
        return GoalWithRules((Positive(atom),), rules)

    def condition_pred(self, cond: RCond, term_of) -> tuple[Atom, tuple[Rule, ...]]:
        args: list[Term] = []
        for item in _condition_cols(cond):
            t = term_of(item)
            if isinstance(t, Variable) and t not in args:
                args.append(t)
        head = Atom(self.fresh_pred(), tuple(args))
        rules: list[Rule] = []
        for disjunct in _disjuncts(cond):
            gw = self.condition_goals(disjunct, term_of)
            rules.append(self.make_rule(head, gw.goals))
            rules.extend(gw.aux_rules)
        return head, tuple(rules)


def _restrict_heads(rule: Rule, target: str) -> Rule:
    """Head-sign substitution for NOT IN assumptions: rule heads named
    ``target`` become restricting; bodies and other heads are untouched."""
    if rule.head.predicate != target:
        return rule
    return Rule(head=rule.head, body=rule.body, restricting=True,
                rule_id=rule.rule_id)


def _pos(col: RCol) -> tuple[int, int]:
    return (col.rel, col.pos)


def _conjuncts(cond: RCond | None):
    if cond is None:
        return
    if isinstance(cond, RAnd):
        yield from _conjuncts(cond.left)
        yield from _conjuncts(cond.right)
        return
    yield cond


def _disjuncts(cond: RCond):
    if isinstance(cond, ROr):
        yield from _disjuncts(cond.left)
        yield from _disjuncts(cond.right)
        return
    yield cond


def _condition_cols(cond: RCond):
    """Column references of a condition, in first-occurrence order."""
    if isinstance(cond, RCompare):
        for it in (cond.lhs, cond.rhs):
            if isinstance(it, RCol):
                yield it
    elif isinstance(cond, (RAnd, ROr)):
        yield from _condition_cols(cond.left)
        yield from _condition_cols(cond.right)
    elif isinstance(cond, RNot):
        yield from _condition_cols(cond.inner)
    else:
        for it in cond.items:
            if isinstance(it, RCol):
                yield it


def sql_to_dl(name: str, rq: RQuery) -> Translation:
    """Translate a resolved query; ``name`` becomes the answer predicate."""
    tr = _Translator()
    rules = tr.translate(name, rq)
    return Translation(rules=rules, answer=name, arity=rq.schema.arity,
                       schema=rq.schema, generated=frozenset(tr.generated))


def sqlrel_to_dl(rel: RRel) -> GoalWithRules:
    """Goal (plus rules) for one FROM relation over fresh variables."""
    tr = _Translator()
    args = tuple(tr.fresh_var() for _ in range(rel.schema.arity))
    if rel.name is not None:
        return GoalWithRules((Positive(Atom(rel.name, args)),), ())
    sub = tr.fresh_pred()
    return GoalWithRules((Positive(Atom(sub, args)),),
                         tuple(tr.translate(sub, rel.subquery)))


def sqlcond_to_dl(cond: RCond, terms: dict[tuple[int, int], Term] | None = None) -> GoalWithRules:
    """Goals (plus rules) for one condition; ``terms`` maps column
    positions ``(relation index, column index)`` to their variables."""
    tr = _Translator()
    env = dict(terms or {})

    def term_of(item: RItem) -> Term:
        if isinstance(item, RLit):
            return Constant(item.value)
        key = _pos(item)
        if key not in env:
            env[key] = tr.fresh_var()
        return env[key]

    return tr.condition_goals(cond, term_of)
