"""Stratified fixpoint engine for Hypothetical Datalog."""

from .database import DatabaseInstance, Label, LabeledFact, Row, atom_for
from .eval import Evaluator, eval_comparison, solve_goal
from .stratify import Stratification, stratify_rules

__all__ = [
    "DatabaseInstance", "Label", "LabeledFact", "Row", "atom_for",
    "Evaluator", "eval_comparison", "solve_goal",
    "Stratification", "stratify_rules",
]
