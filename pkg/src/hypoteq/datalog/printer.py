"""Pretty-printer for Datalog programs.

Two styles are produced from the same renderer:

* ``inline`` — one clause per line; used for storage and round-trips.
* ``session`` — the transcript layout: a rule whose body is a single
  embedded implication is split over several lines, antecedent facts
  joined by ``/\\`` and each antecedent rule parenthesized on its own
  line, followed by ``=>`` and the consequent.

Both forms parse back to the same Program.
"""

from __future__ import annotations

import re

from .core import (
    Atom,
    Constant,
    Goal,
    Implication,
    Negated,
    Positive,
    Program,
    Rule,
    Term,
    Variable,
)

_BARE_ATOM = re.compile(r"[a-z][a-zA-Z0-9_]*$")


def format_value(value: int | float | str) -> str:
    """Constant in Datalog syntax: bare lowercase atom, quoted, or number."""
    if isinstance(value, bool):
        raise TypeError("booleans are not Datalog constants")
    if isinstance(value, (int, float)):
        return repr(value)
    if _BARE_ATOM.match(value):
        return value
    return "'" + value.replace("'", "''") + "'"


def format_term(term: Term) -> str:
    if isinstance(term, Variable):
        return term.name
    return format_value(term.value)


def format_atom(atom: Atom) -> str:
    if atom.is_comparison:
        lhs, rhs = atom.args
        return f"{format_term(lhs)}{atom.predicate}{format_term(rhs)}"
    if not atom.args:
        return atom.predicate
    return atom.predicate + "(" + ",".join(format_term(t) for t in atom.args) + ")"


def format_goal(goal: Goal) -> str:
    if isinstance(goal, Positive):
        return format_atom(goal.atom)
    if isinstance(goal, Negated):
        inner = format_goal(goal.inner)
        if isinstance(goal.inner, Implication):
            inner = f"({inner})"
        return f"not {inner}"
    parts = [_format_antecedent_element(r) for r in goal.antecedent]
    return " /\\ ".join(parts) + " => " + format_goal(goal.consequent)


def _format_antecedent_element(rule: Rule) -> str:
    if not rule.body:
        sign = "-" if rule.restricting else ""
        return sign + format_atom(rule.head)
    return "(" + format_rule(rule, terminator="") + ")"


def format_rule(rule: Rule, terminator: str = ".") -> str:
    sign = "-" if rule.restricting else ""
    head = sign + format_atom(rule.head)
    if not rule.body:
        return head + terminator
    body = ", ".join(format_goal(g) for g in rule.body)
    return f"{head} :- {body}{terminator}"


def format_rule_session(rule: Rule, indent: str = "  ") -> str:
    """Transcript layout; falls back to the inline form for plain rules."""
    if len(rule.body) == 1 and isinstance(rule.body[0], Implication):
        imp = rule.body[0]
        sign = "-" if rule.restricting else ""
        lines = [f"{indent}{sign}{format_atom(rule.head)} :-"]
        lines.extend(_antecedent_lines(imp.antecedent, indent))
        lines.append(f"{indent}=>")
        lines.append(f"{indent}{format_goal(imp.consequent)}.")
        return "\n".join(lines)
    return indent + format_rule(rule)


def _antecedent_lines(antecedent: tuple[Rule, ...], indent: str) -> list[str]:
    """Facts flow on one line; each rule element gets its own line."""
    lines: list[str] = []
    pending_facts: list[str] = []
    rendered = [(bool(r.body), _format_antecedent_element(r)) for r in antecedent]
    for i, (is_rule, text) in enumerate(rendered):
        last = i == len(rendered) - 1
        joiner = "" if last else " /\\"
        if is_rule:
            if pending_facts:
                lines.append(indent + " /\\ ".join(pending_facts) + " /\\")
                pending_facts = []
            lines.append(indent + text + joiner)
        else:
            pending_facts.append(text)
            if last:
                lines.append(indent + " /\\ ".join(pending_facts))
    return lines


def format_program(program: Program, style: str = "inline", indent: str = "") -> str:
    if style == "session":
        return "\n".join(format_rule_session(r, indent or "  ") for r in program.rules)
    return "\n".join(indent + format_rule(r) for r in program.rules)
