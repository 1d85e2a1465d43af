"""Predicate stratification over the full reachable program.

The dependency graph is built from every rule, including rules that only
occur inside implication antecedents (assumptions are static syntax, so
this is computable up front). Edges run from a rule's head to the
predicates it consumes; an edge is strict when the consumption happens
under a negation, or when the consumed predicate is restricted (has at
least one reachable restricting rule): a restricted predicate's meaning is
only final after its restricting derivations have been subtracted, so no
consumer may share its stratum.

A cycle through a strict edge makes the program non-stratifiable and is
rejected. Predicates on a non-trivial cycle are marked recursive; the
evaluator switches them to set semantics (derivation labels would not be
finite there).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..datalog.core import Goal, Implication, Negated, Positive, Rule
from ..errors import NotStratifiable


@dataclass(frozen=True)
class Stratification:
    level: dict[str, int]
    recursive: frozenset[str]
    restricted: frozenset[str]
    max_level: int

    def level_of(self, predicate: str) -> int:
        return self.level.get(predicate, 1)

    def strata(self) -> list[list[str]]:
        out: list[list[str]] = [[] for _ in range(self.max_level)]
        for p, lv in sorted(self.level.items()):
            out[lv - 1].append(p)
        return out


def stratify_rules(rules: list[Rule], edb: frozenset[str]) -> Stratification:
    """Stratification of all given rules (must include antecedent rules)."""
    nodes: set[str] = set(edb)
    edges: set[tuple[str, str, bool]] = set()
    restricted: set[str] = set()

    for rule in rules:
        head = rule.head.predicate
        nodes.add(head)
        if rule.restricting:
            restricted.add(head)
        for goal in rule.body:
            for pred, negated in _consumed(goal, False):
                nodes.add(pred)
                # Restricting rules subtract from the head's meaning, so
                # their inputs must be complete strictly earlier.
                edges.add((head, pred, negated or rule.restricting))

    edges = {(h, p, strict or p in restricted) for h, p, strict in edges}

    sccs = _tarjan(nodes, edges)
    comp: dict[str, int] = {}
    for i, scc in enumerate(sccs):
        for p in scc:
            comp[p] = i

    recursive: set[str] = set()
    for h, p, strict in edges:
        if comp[h] == comp[p]:
            if strict:
                raise NotStratifiable(tuple(sorted(sccs[comp[h]])))
            recursive.update(sccs[comp[h]])
    for scc in sccs:
        if len(scc) > 1:
            recursive.update(scc)

    # Longest-path levels over the condensation; Tarjan emits SCCs in
    # reverse topological order (dependencies first).
    comp_level = [1] * len(sccs)
    comp_edges: dict[int, set[tuple[int, bool]]] = {i: set() for i in range(len(sccs))}
    for h, p, strict in edges:
        if comp[h] != comp[p]:
            comp_edges[comp[h]].add((comp[p], strict))
    for i in range(len(sccs)):
        for dep, strict in comp_edges[i]:
            comp_level[i] = max(comp_level[i], comp_level[dep] + (1 if strict else 0))

    level = {p: comp_level[comp[p]] for p in nodes}
    max_level = max(comp_level, default=1)
    return Stratification(level, frozenset(recursive), frozenset(restricted), max_level)


def _consumed(goal: Goal, under_negation: bool):
    """(predicate, negated?) pairs a goal makes the rule head depend on."""
    if isinstance(goal, Positive):
        if not goal.atom.is_comparison:
            yield goal.atom.predicate, under_negation
        return
    if isinstance(goal, Negated):
        yield from _consumed(goal.inner, True)
        return
    # Antecedent rules contribute their own edges via the caller's rule
    # list; here only the consequent is consumed by the enclosing head.
    yield from _consumed(goal.consequent, under_negation)


def _tarjan(nodes: set[str], edges: set[tuple[str, str, bool]]) -> list[list[str]]:
    adj: dict[str, list[str]] = {n: [] for n in nodes}
    for h, p, _ in sorted(edges):
        adj[h].append(p)

    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = [0]

    def strongconnect(v: str):
        # Iterative Tarjan to keep deep programs off the Python stack.
        work = [(v, iter(adj[v]))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                scc = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    scc.append(w)
                    if w == node:
                        break
                sccs.append(sorted(scc))

    for n in sorted(nodes):
        if n not in index:
            strongconnect(n)
    return sccs
