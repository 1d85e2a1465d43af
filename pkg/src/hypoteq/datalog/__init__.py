"""Hypothetical Datalog: language, parser, printer, safety analysis."""

from .core import (
    Atom,
    Constant,
    Goal,
    Implication,
    Negated,
    Positive,
    Program,
    Rule,
    RuleId,
    Term,
    Variable,
    Violation,
    apply_substitution,
    check_wellformed,
    compose_subst,
)
from .parser import parse_datalog, parse_goal
from .printer import format_atom, format_goal, format_program, format_rule, format_rule_session
from .safety import SafetyInfo, classify_program

__all__ = [
    "Atom", "Constant", "Goal", "Implication", "Negated", "Positive",
    "Program", "Rule", "RuleId", "Term", "Variable", "Violation",
    "apply_substitution", "check_wellformed", "compose_subst",
    "parse_datalog", "parse_goal",
    "format_atom", "format_goal", "format_program", "format_rule",
    "format_rule_session", "SafetyInfo", "classify_program",
]
