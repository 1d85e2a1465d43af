"""Bottom-up evaluation of Hypothetical Datalog with duplicate labels.

Evaluation proceeds context by context. A context is the base database
extended with the assumed rules of the implication chain that led to it;
its identity is the set of assumed rule ids, so re-assuming the same
rules lands in the same context and context growth always terminates.
Each context owns a fact store and is computed stratum by stratum to a
fixpoint; implication goals recurse into the child context, which is
evaluated independently (the base instance and every enclosing context
stay untouched - context isolation).

Duplicates: every stored fact occurrence has a source label and every
derivation is labelled ``(rule id, body labels)``; the multiplicity of a
fact is the number of distinct labels. Within recursive strata labels are
collapsed to one per fact (set semantics), keeping fixpoints finite; the
translated SQL subset is non-recursive, so SQL answers are unaffected.

Comparison goals are built in. Predicates classified as *demand* by the
safety analysis (their rules cannot be materialized, e.g. comparison-only
OR disjuncts) are evaluated at call sites with bound arguments; each
succeeding rule instance contributes one derivation label.
"""

from __future__ import annotations

from itertools import count
from typing import Iterable, Iterator

from ..datalog.core import (
    Atom,
    Goal,
    Implication,
    Negated,
    Positive,
    Program,
    Rule,
    RuleId,
    Subst,
    Term,
    Variable,
    Constant,
    iter_reachable_rules,
    subst_atom,
)
from ..datalog.printer import format_atom, format_goal, format_rule
from ..datalog.safety import classify_program
from ..errors import EvalTypeError, UnsafeRule
from .database import DatabaseInstance, Label, LabeledFact, Row, atom_for
from .stratify import Stratification, stratify_rules

TRUE_ATOM = Atom("true", ())


def eval_comparison(op: str, v1, v2) -> bool:
    """Built-in comparison; numeric with numeric, string with string."""
    numeric = isinstance(v1, (int, float)) and isinstance(v2, (int, float))
    if not numeric and not (isinstance(v1, str) and isinstance(v2, str)):
        raise EvalTypeError(op, v1, v2)
    if op == "=":
        return v1 == v2
    if op == "\\=":
        return v1 != v2
    if op == "<":
        return v1 < v2
    if op == ">":
        return v1 > v2
    if op == "=<":
        return v1 <= v2
    if op == ">=":
        return v1 >= v2
    raise ValueError(f"unknown comparison operator {op}")


class _Ctx:
    __slots__ = ("key", "ctx_id", "regular", "restricting", "facts",
                 "regular_all", "restr_rows", "completed", "in_progress")

    def __init__(self, key: frozenset, ctx_id: int,
                 regular: dict[str, tuple[Rule, ...]],
                 restricting: dict[str, tuple[Rule, ...]],
                 db: DatabaseInstance):
        self.key = key
        self.ctx_id = ctx_id
        self.regular = regular
        self.restricting = restricting
        self.facts: dict[str, dict[Row, set[Label]]] = {}
        for name in db.tables:
            store = self.facts.setdefault(name, {})
            for row, label in db.table_facts(name):
                store.setdefault(row, set()).add(label)
        self.regular_all: dict[str, dict[Row, set[Label]]] = {}
        self.restr_rows: dict[str, set[Row]] = {}
        self.completed = 0
        self.in_progress: int | None = None


class Evaluator:
    """Evaluates goals against one database snapshot plus extra rules.

    ``extra`` typically holds the rules of one SQL translation. Goals that
    will be solved directly (with implication antecedents not already
    reachable from the rules) must be passed via ``goals`` so their
    antecedent rules take part in stratification and safety analysis.
    """

    def __init__(self, db: DatabaseInstance, extra: Program | None = None,
                 goals: Iterable[Goal] = ()):
        self._db = db
        active = tuple(db.rules.rules) + (tuple(extra.rules) if extra else ())
        seed = list(active)
        for g in goals:
            seed.extend(_goal_antecedents(g))
        reachable = list(iter_reachable_rules(tuple(seed)))
        edb = frozenset(db.tables.keys())
        self.stratification: Stratification = stratify_rules(reachable, edb)
        self.safety = classify_program(reachable, edb)
        self._known: set[RuleId] = {r.rule_id for r in reachable}
        self._by_level: dict[int, list[str]] = {}
        for p, lv in self.stratification.level.items():
            self._by_level.setdefault(lv, []).append(p)

        regular: dict[str, tuple[Rule, ...]] = {}
        restricting: dict[str, tuple[Rule, ...]] = {}
        for r in active:
            target = restricting if r.restricting else regular
            target[r.head.predicate] = target.get(r.head.predicate, ()) + (r,)
        self._ids = count()
        self._contexts: dict[frozenset, _Ctx] = {}
        self.base = self._register(frozenset(), regular, restricting)

    # -- public API ---------------------------------------------------------

    def solve(self, goal: Goal, ctx: _Ctx | None = None) -> list[LabeledFact]:
        """All ground instances of ``goal`` with their derivation labels.

        Multiplicity of a fact equals its number of distinct labels. For a
        negated (necessarily ground) goal the result is a single ``true``
        marker fact or the empty multiset.
        """
        ctx = ctx or self.base
        if isinstance(goal, Positive):
            atom = goal.atom
            if atom.is_comparison:
                return self._solve_comparison(atom, ctx)
            if atom.predicate in self.safety.demand:
                if not atom.is_ground():
                    raise UnsafeRule(format_goal(goal), tuple(
                        sorted(v.name for v in _free_vars(atom))))
                labels = self._eval_demand(atom, ctx)
                return [LabeledFact(atom, lab, ctx.ctx_id)
                        for lab in sorted(labels, key=repr)]
            self._ensure_read(ctx, atom.predicate)
            out = []
            for row, labels in sorted(ctx.facts.get(atom.predicate, {}).items(),
                                      key=_row_sort_key):
                if _match(atom.args, row, {}) is None:
                    continue
                fact = atom_for(atom.predicate, row)
                for lab in sorted(labels, key=repr):
                    out.append(LabeledFact(fact, lab, ctx.ctx_id))
            return out
        if isinstance(goal, Negated):
            if self._exists(goal.inner, {}, ctx):
                return []
            return [LabeledFact(TRUE_ATOM, ("neg",), ctx.ctx_id)]
        child = self.child_context(ctx, goal.antecedent)
        return self.solve(goal.consequent, child)

    def eval_implication(self, antecedent: Iterable[Rule], consequent: Goal,
                         ctx: _Ctx | None = None) -> list[LabeledFact]:
        """Evaluate ``antecedent => consequent`` in a child context."""
        ctx = ctx or self.base
        child = self.child_context(ctx, tuple(antecedent))
        return self.solve(consequent, child)

    def restricted_meaning(self, predicate: str, ctx: _Ctx | None = None) -> list[LabeledFact]:
        """Final meaning of a predicate (restricting derivations removed)."""
        ctx = ctx or self.base
        self._ensure_read(ctx, predicate)
        out = []
        for row, labels in sorted(ctx.facts.get(predicate, {}).items(), key=_row_sort_key):
            fact = atom_for(predicate, row)
            out.extend(LabeledFact(fact, lab, ctx.ctx_id)
                       for lab in sorted(labels, key=repr))
        return out

    def regular_meaning(self, predicate: str, ctx: _Ctx | None = None) -> list[LabeledFact]:
        """Meaning from regular rules only (before restriction)."""
        ctx = ctx or self.base
        self._ensure_read(ctx, predicate)
        store = ctx.regular_all.get(predicate, ctx.facts.get(predicate, {}))
        out = []
        for row, labels in sorted(store.items(), key=_row_sort_key):
            fact = atom_for(predicate, row)
            out.extend(LabeledFact(fact, lab, ctx.ctx_id)
                       for lab in sorted(labels, key=repr))
        return out

    def child_context(self, ctx: _Ctx, antecedent: tuple[Rule, ...]) -> _Ctx:
        ids = {r.rule_id for r in antecedent}
        unknown = ids - self._known
        if unknown:
            raise ValueError(f"assumed rules unknown to this evaluator: {sorted(unknown)}")
        key = ctx.key | ids
        if key == ctx.key:
            return ctx
        cached = self._contexts.get(key)
        if cached is not None:
            return cached
        regular = dict(ctx.regular)
        restricting = dict(ctx.restricting)
        for r in antecedent:
            target = restricting if r.restricting else regular
            target[r.head.predicate] = target.get(r.head.predicate, ()) + (r,)
        return self._register(key, regular, restricting)

    # -- context machinery ----------------------------------------------------

    def _register(self, key: frozenset, regular, restricting) -> _Ctx:
        ctx = _Ctx(key, next(self._ids), regular, restricting, self._db)
        self._contexts[key] = ctx
        return ctx

    def _ensure_read(self, ctx: _Ctx, predicate: str) -> None:
        self._ensure_level(ctx, self.stratification.level_of(predicate))

    def _ensure_level(self, ctx: _Ctx, target: int) -> None:
        if ctx.in_progress is not None:
            if target <= ctx.in_progress:
                return  # same-stratum read of a partial store; monotone
            raise AssertionError("read above the stratum being computed")
        while ctx.completed < target:
            lv = ctx.completed + 1
            ctx.in_progress = lv
            try:
                self._compute_level(ctx, lv)
            finally:
                ctx.in_progress = None
            ctx.completed = lv

    def _compute_level(self, ctx: _Ctx, lv: int) -> None:
        preds = self._by_level.get(lv, ())
        rules: list[Rule] = []
        for p in preds:
            if p in self.safety.demand:
                continue
            rules.extend(ctx.regular.get(p, ()))
            rules.extend(ctx.restricting.get(p, ()))
        recursive = self.stratification.recursive
        changed = True
        while changed:
            changed = False
            for rule in rules:
                pred = rule.head.predicate
                for row, label in self._fire(rule, ctx):
                    if rule.restricting:
                        bucket = ctx.restr_rows.setdefault(pred, set())
                        if row not in bucket:
                            bucket.add(row)
                            changed = True
                    else:
                        if pred in recursive:
                            label = ("set", pred, row)
                        store = ctx.facts.setdefault(pred, {}).setdefault(row, set())
                        if label not in store:
                            store.add(label)
                            changed = True
        for p in preds:
            removed = ctx.restr_rows.get(p)
            if removed:
                current = ctx.facts.get(p, {})
                ctx.regular_all[p] = {row: set(labels) for row, labels in current.items()}
                ctx.facts[p] = {row: labels for row, labels in current.items()
                                if row not in removed}

    # -- rule firing -----------------------------------------------------------

    def _fire(self, rule: Rule, ctx: _Ctx) -> Iterator[tuple[Row, Label]]:
        for theta, labels in self._eval_body(rule.body, 0, {}, (), ctx):
            head = subst_atom(rule.head, theta)
            if not head.is_ground():
                raise UnsafeRule(format_rule(rule), tuple(
                    sorted(v.name for v in _free_vars(head))))
            row = tuple(t.value for t in head.args)  # type: ignore[union-attr]
            yield row, (rule.rule_id, labels)

    def _eval_body(self, goals: tuple[Goal, ...], i: int, theta: Subst,
                   labels: tuple, ctx: _Ctx) -> Iterator[tuple[Subst, tuple]]:
        if i == len(goals):
            yield theta, labels
            return
        for theta2, extra in self._solutions(goals[i], theta, ctx):
            yield from self._eval_body(goals, i + 1, theta2, labels + extra, ctx)

    def _solutions(self, goal: Goal, theta: Subst, ctx: _Ctx) -> Iterator[tuple[Subst, tuple]]:
        """Solutions of one goal under ``theta``: (extended theta, labels)."""
        if isinstance(goal, Positive):
            atom = subst_atom(goal.atom, theta)
            if atom.is_comparison:
                if self._check_comparison(atom):
                    yield theta, ()
                return
            if atom.predicate in self.safety.demand:
                if not atom.is_ground():
                    raise UnsafeRule(format_goal(goal), tuple(
                        sorted(v.name for v in _free_vars(atom))))
                for lab in self._eval_demand(atom, ctx):
                    yield theta, (lab,)
                return
            self._ensure_read(ctx, atom.predicate)
            store = ctx.facts.get(atom.predicate, {})
            for row in list(store.keys()):
                theta2 = _match(atom.args, row, theta)
                if theta2 is None:
                    continue
                for lab in list(store[row]):
                    yield theta2, (lab,)
            return
        if isinstance(goal, Negated):
            if not self._exists(goal.inner, theta, ctx):
                yield theta, ()
            return
        child = self.child_context(ctx, goal.antecedent)
        yield from self._solutions(goal.consequent, theta, child)

    def _exists(self, goal: Goal, theta: Subst, ctx: _Ctx) -> bool:
        """Is there at least one solution? Free variables are existential."""
        if isinstance(goal, Negated):
            return not self._exists(goal.inner, theta, ctx)
        for _ in self._solutions(goal, theta, ctx):
            return True
        return False

    def _check_comparison(self, atom: Atom) -> bool:
        if not atom.is_ground():
            raise UnsafeRule(format_atom(atom), tuple(
                sorted(v.name for v in _free_vars(atom))))
        v1, v2 = (t.value for t in atom.args)  # type: ignore[union-attr]
        return eval_comparison(atom.predicate, v1, v2)

    def _eval_demand(self, atom: Atom, ctx: _Ctx) -> set[Label]:
        """Call-site evaluation of a demand predicate with ground args."""
        row = tuple(t.value for t in atom.args)  # type: ignore[union-attr]
        out: set[Label] = set()
        for rule in ctx.regular.get(atom.predicate, ()):
            theta0 = _match(rule.head.args, row, {})
            if theta0 is None:
                continue
            for _, labels in self._eval_body(rule.body, 0, theta0, (), ctx):
                out.add((rule.rule_id, labels))
        return out

    def _solve_comparison(self, atom: Atom, ctx: _Ctx) -> list[LabeledFact]:
        if self._check_comparison(atom):
            return [LabeledFact(atom, ("cmp",), ctx.ctx_id)]
        return []


def solve_goal(db: DatabaseInstance, goal: Goal,
               extra: Program | None = None) -> list[LabeledFact]:
    """One-shot goal evaluation (builds a fresh Evaluator)."""
    return Evaluator(db, extra, goals=(goal,)).solve(goal)


# ---------------------------------------------------------------------------

def _match(pattern: tuple[Term, ...], row: Row, theta: Subst) -> dict | None:
    """Unify pattern args against a ground row, extending theta."""
    if len(pattern) != len(row):
        return None
    out = dict(theta)
    for t, v in zip(pattern, row):
        if isinstance(t, Constant):
            if t.value != v:
                return None
        else:
            bound = out.get(t)
            if bound is None:
                out[t] = Constant(v)
            elif not isinstance(bound, Constant) or bound.value != v:
                return None
    return out


def _free_vars(atom: Atom) -> set[Variable]:
    return {t for t in atom.args if isinstance(t, Variable)}


def _row_sort_key(item: tuple[Row, object]):
    return tuple((isinstance(v, str), v) for v in item[0])


def _goal_antecedents(goal: Goal) -> list[Rule]:
    if isinstance(goal, Positive):
        return []
    if isinstance(goal, Negated):
        return _goal_antecedents(goal.inner)
    out = list(goal.antecedent)
    out.extend(_goal_antecedents(goal.consequent))
    return out
