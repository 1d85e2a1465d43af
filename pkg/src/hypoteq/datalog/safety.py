"""Range-restriction (safety) analysis for Datalog rules.

A rule is safe when every head variable, every variable used in a
comparison, and every non-underscored variable under a negation is bound
by a positive body atom over a materializable predicate (or by an
implication consequent, whose solutions bind its variables).

Underscored variables whose occurrences are confined to a single negated
goal are exempt: they are implicitly existentially quantified inside the
negation, equivalent to rewriting the negated atom through an auxiliary
predicate.

Rules that fail range restriction only on their *head* variables are not
rejected: their predicate is classified as *demand* and its rules are
evaluated at call sites, with the arguments already bound (this is how
comparison-only disjunct predicates generated for OR conditions run).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UnsafeRule
from .core import (
    Goal,
    Negated,
    Positive,
    Rule,
    Variable,
    atom_vars,
    goal_vars,
)
from .printer import format_rule


@dataclass(frozen=True)
class SafetyInfo:
    demand: frozenset[str] = frozenset()

    def is_demand(self, predicate: str) -> bool:
        return predicate in self.demand


def classify_program(rules: list[Rule], edb: frozenset[str]) -> SafetyInfo:
    """Classify predicates and verify safety of every rule.

    ``rules`` must already include all rules reachable through implication
    antecedents. Raises UnsafeRule on the first genuinely unsafe rule.
    """
    by_pred: dict[str, list[Rule]] = {}
    for r in rules:
        by_pred.setdefault(r.head.predicate, []).append(r)

    demand: set[str] = set()
    changed = True
    while changed:
        changed = False
        for pred, pred_rules in by_pred.items():
            if pred in demand or pred in edb:
                continue
            if any(r.restricting for r in pred_rules):
                continue
            for r in pred_rules:
                offenders = _offending_vars(r, demand)
                head = atom_vars(r.head)
                # Only pure-filter bodies (comparisons, negations, demand
                # calls) may defer binding to the call site; a rule with a
                # binding atom that still leaves variables unbound is the
                # classical unsafe case and stays rejected.
                if offenders and offenders <= head and _filter_only_body(r, demand):
                    demand.add(pred)
                    changed = True
                    break

    for r in rules:
        offenders = _offending_vars(r, demand)
        if r.head.predicate in demand:
            offenders -= atom_vars(r.head)
        if offenders:
            raise UnsafeRule(format_rule(r), tuple(sorted(v.name for v in offenders)))

    _reject_recursive_demand(by_pred, demand)
    return SafetyInfo(frozenset(demand))


def check_rule(rule: Rule, info: SafetyInfo) -> tuple[str, ...]:
    """Offending variable names of one rule under a fixed classification."""
    offenders = _offending_vars(rule, info.demand)
    if info.is_demand(rule.head.predicate):
        offenders -= atom_vars(rule.head)
    return tuple(sorted(v.name for v in offenders))


# ---------------------------------------------------------------------------

def _filter_only_body(rule: Rule, demand: set[str] | frozenset[str]) -> bool:
    """True when no body goal can bind a variable (pure filter rule)."""
    for g in rule.body:
        if isinstance(g, Negated):
            continue
        if isinstance(g, Positive) and (
                g.atom.is_comparison or g.atom.predicate in demand):
            continue
        return False
    return True


def _offending_vars(rule: Rule, demand: set[str] | frozenset[str]) -> set[Variable]:
    bound: set[Variable] = set()
    for g in rule.body:
        bound |= _binding_vars(g, demand)

    needed: set[Variable] = set(atom_vars(rule.head))
    for i, g in enumerate(rule.body):
        elsewhere = set(atom_vars(rule.head))
        for j, other in enumerate(rule.body):
            if j != i:
                elsewhere |= goal_vars(other, include_antecedents=False)
        needed |= _needed_vars(g, demand, neg_depth=0, elsewhere=elsewhere)

    return needed - bound


def _binding_vars(goal: Goal, demand) -> set[Variable]:
    if isinstance(goal, Positive):
        if goal.atom.is_comparison or goal.atom.predicate in demand:
            return set()
        return atom_vars(goal.atom)
    if isinstance(goal, Negated):
        return set()
    return _binding_vars(goal.consequent, demand)


def _needed_vars(goal: Goal, demand, neg_depth: int, elsewhere: set[Variable]) -> set[Variable]:
    if isinstance(goal, Positive):
        vs = atom_vars(goal.atom)
        if goal.atom.is_comparison or goal.atom.predicate in demand:
            return vs
        if neg_depth == 0:
            return set()
        return {v for v in vs if not v.underscored or v in elsewhere}
    if isinstance(goal, Negated):
        return _needed_vars(goal.inner, demand, neg_depth + 1, elsewhere)
    # Antecedent rules are checked on their own; the consequent binds its
    # variables when evaluated positively.
    return _needed_vars(goal.consequent, demand, neg_depth, elsewhere)


def _reject_recursive_demand(by_pred: dict[str, list[Rule]], demand: set[str]) -> None:
    """Demand predicates are inlined at call sites, so cycles cannot run."""
    edges: dict[str, set[str]] = {p: set() for p in demand}
    for p in demand:
        for r in by_pred[p]:
            for g in r.body:
                for callee in _called_preds(g):
                    if callee in demand:
                        edges[p].add(callee)

    seen: dict[str, int] = {}  # 0 = on stack, 1 = done

    def visit(node: str, trail: list[str]):
        state = seen.get(node)
        if state == 1:
            return
        if state == 0:
            cycle = trail[trail.index(node):]
            rule = by_pred[node][0]
            raise UnsafeRule(format_rule(rule),
                             tuple(sorted(set(cycle))) or (node,))
        seen[node] = 0
        for nxt in edges[node]:
            visit(nxt, trail + [node])
        seen[node] = 1

    for p in demand:
        visit(p, [])


def _called_preds(goal: Goal):
    if isinstance(goal, Positive):
        if not goal.atom.is_comparison:
            yield goal.atom.predicate
    elif isinstance(goal, Negated):
        yield from _called_preds(goal.inner)
    else:
        yield from _called_preds(goal.consequent)
