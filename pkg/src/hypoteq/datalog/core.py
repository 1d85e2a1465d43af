"""Core Hypothetical Datalog language: terms, atoms, goals, rules, programs.

The language is function-free. A goal is an atom, a negated goal, or an
embedded implication whose antecedent is a list of rules assumed for the
evaluation of the consequent. Rule heads may carry a restricting sign
(surface syntax ``-p(...)``), which subtracts derivations from the
predicate's meaning.

All value types here are immutable and hashable; they are shared freely
between threads and between the translator, engine and oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

# Comparison predicates are built in; they are written infix and are not
# subject to arity/stratification bookkeeping.
COMPARISON_PREDICATES = ("=", "\\=", "<", ">", "=<", ">=")


@dataclass(frozen=True)
class Variable:
    name: str

    @property
    def underscored(self) -> bool:
        return self.name.startswith("_")

    def __repr__(self) -> str:
        return f"Variable({self.name})"


@dataclass(frozen=True)
class Constant:
    value: int | float | str

    def __repr__(self) -> str:
        return f"Constant({self.value!r})"


Term = Union[Variable, Constant]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_comparison(self) -> bool:
        return self.predicate in COMPARISON_PREDICATES

    def is_ground(self) -> bool:
        return all(isinstance(t, Constant) for t in self.args)


@dataclass(frozen=True)
class Positive:
    atom: Atom


@dataclass(frozen=True)
class Negated:
    inner: "Goal"


@dataclass(frozen=True)
class Implication:
    antecedent: tuple["Rule", ...]
    consequent: "Goal"

    def __post_init__(self):
        if not self.antecedent:
            raise ValueError("implication antecedent must be nonempty")


Goal = Union[Positive, Negated, Implication]

# (origin tag, sequence number); the origin tag distinguishes user rules
# from translator-generated and assumption-injected rules so derivation
# labels have a stable data-source identity.
RuleId = tuple[str, int]


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple[Goal, ...] = ()
    restricting: bool = False
    rule_id: RuleId = field(default=("user", 0), compare=False)

    @property
    def is_fact(self) -> bool:
        return not self.body and not self.restricting and self.head.is_ground()


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...] = ()

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def extend(self, other: "Program") -> "Program":
        return Program(self.rules + other.rules)


# ---------------------------------------------------------------------------
# Variable collection
# ---------------------------------------------------------------------------

def atom_vars(atom: Atom) -> set[Variable]:
    return {t for t in atom.args if isinstance(t, Variable)}


def goal_vars(goal: Goal, include_antecedents: bool = True) -> set[Variable]:
    if isinstance(goal, Positive):
        return atom_vars(goal.atom)
    if isinstance(goal, Negated):
        return goal_vars(goal.inner, include_antecedents)
    out = goal_vars(goal.consequent, include_antecedents)
    if include_antecedents:
        for r in goal.antecedent:
            out |= rule_vars(r)
    return out


def rule_vars(rule: Rule, include_antecedents: bool = True) -> set[Variable]:
    out = atom_vars(rule.head)
    for g in rule.body:
        out |= goal_vars(g, include_antecedents)
    return out


def iter_reachable_rules(rules: Iterator[Rule] | tuple[Rule, ...]) -> Iterator[Rule]:
    """All rules, including those nested in implication antecedents."""
    stack = list(rules)
    while stack:
        rule = stack.pop()
        yield rule
        for g in rule.body:
            stack.extend(_antecedent_rules(g))


def _antecedent_rules(goal: Goal) -> list[Rule]:
    if isinstance(goal, Positive):
        return []
    if isinstance(goal, Negated):
        return _antecedent_rules(goal.inner)
    out = list(goal.antecedent)
    out.extend(_antecedent_rules(goal.consequent))
    return out


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

Subst = Mapping[Variable, Term]


def subst_term(term: Term, theta: Subst) -> Term:
    if isinstance(term, Variable):
        return theta.get(term, term)
    return term


def subst_atom(atom: Atom, theta: Subst) -> Atom:
    if not theta:
        return atom
    return Atom(atom.predicate, tuple(subst_term(t, theta) for t in atom.args))


def subst_goal(goal: Goal, theta: Subst) -> Goal:
    """Apply ``theta`` to a goal.

    Antecedent rules of implications are closed scopes (the disjointness
    conditions keep their variables apart from the enclosing rule), so the
    substitution descends into consequents but never into antecedents.
    """
    if not theta:
        return goal
    if isinstance(goal, Positive):
        return Positive(subst_atom(goal.atom, theta))
    if isinstance(goal, Negated):
        return Negated(subst_goal(goal.inner, theta))
    return Implication(goal.antecedent, subst_goal(goal.consequent, theta))


def subst_rule(rule: Rule, theta: Subst) -> Rule:
    if not theta:
        return rule
    return Rule(
        head=subst_atom(rule.head, theta),
        body=tuple(subst_goal(g, theta) for g in rule.body),
        restricting=rule.restricting,
        rule_id=rule.rule_id,
    )


def compose_subst(first: Subst, second: Subst) -> dict[Variable, Term]:
    """Substitution equal to applying ``first`` then ``second``."""
    out: dict[Variable, Term] = {v: subst_term(t, second) for v, t in first.items()}
    for v, t in second.items():
        out.setdefault(v, t)
    return out


def apply_substitution(item: "Rule | Goal | Atom", theta: Subst) -> "Rule | Goal | Atom":
    """Capture-free simultaneous replacement on a rule, goal or atom."""
    if isinstance(item, Rule):
        return subst_rule(item, theta)
    if isinstance(item, Atom):
        return subst_atom(item, theta)
    return subst_goal(item, theta)


# ---------------------------------------------------------------------------
# Well-formedness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str
    rule_id: RuleId
    message: str


def check_wellformed(program: Program) -> list[Violation]:
    """Check arity consistency and the implication disjointness conditions.

    For every implication inside a rule R, each antecedent rule Ri must not
    share variables with the consequent nor with the rest of R (head and
    sibling goals). Violations are returned, never raised.
    """
    violations: list[Violation] = []

    arities: dict[str, int] = {}
    for rule in iter_reachable_rules(program.rules):
        for atom in _rule_atoms(rule):
            if atom.is_comparison:
                continue
            seen = arities.setdefault(atom.predicate, atom.arity)
            if seen != atom.arity:
                violations.append(Violation(
                    "arity-mismatch", rule.rule_id,
                    f"{atom.predicate} used with arity {atom.arity}, previously {seen}"))

    for rule in iter_reachable_rules(program.rules):
        head_vars = atom_vars(rule.head)
        for i, goal in enumerate(rule.body):
            sibling_vars = set(head_vars)
            for j, other in enumerate(rule.body):
                if j != i:
                    sibling_vars |= goal_vars(other)
            _check_goal_disjointness(goal, rule, sibling_vars, violations)

    return violations


def _check_goal_disjointness(goal: Goal, rule: Rule, outer_vars: set[Variable],
                             violations: list[Violation]) -> None:
    if isinstance(goal, Positive):
        return
    if isinstance(goal, Negated):
        _check_goal_disjointness(goal.inner, rule, outer_vars, violations)
        return
    conseq_vars = goal_vars(goal.consequent, include_antecedents=False)
    for ante in goal.antecedent:
        shared_outer = rule_vars(ante) & outer_vars
        if shared_outer:
            violations.append(Violation(
                "antecedent-shares-rule-vars", rule.rule_id,
                f"assumed rule for {ante.head.predicate} shares "
                f"{sorted(v.name for v in shared_outer)} with the enclosing rule"))
        shared_conseq = rule_vars(ante) & conseq_vars
        if shared_conseq:
            violations.append(Violation(
                "antecedent-shares-consequent-vars", rule.rule_id,
                f"assumed rule for {ante.head.predicate} shares "
                f"{sorted(v.name for v in shared_conseq)} with the consequent"))
    _check_goal_disjointness(goal.consequent, rule, outer_vars, violations)


def _rule_atoms(rule: Rule) -> Iterator[Atom]:
    yield rule.head
    for g in rule.body:
        yield from _goal_atoms(g)


def _goal_atoms(goal: Goal) -> Iterator[Atom]:
    if isinstance(goal, Positive):
        yield goal.atom
    elif isinstance(goal, Negated):
        yield from _goal_atoms(goal.inner)
    else:
        # Antecedent atoms are counted for arity purposes via
        # iter_reachable_rules; only the consequent belongs to this rule.
        yield from _goal_atoms(goal.consequent)
