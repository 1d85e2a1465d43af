"""Database instances: extensional tables, intensional rules, schemas.

Instances are immutable; every mutation returns a new instance, so a
query evaluation always runs against a stable snapshot and a failed
statement can never leave a half-applied change behind.

Each stored fact occurrence carries a stable source label ``("t", table,
index)``; derived facts are labelled with the deriving rule id plus the
labels of the body facts used, which is what makes duplicates countable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping

from ..datalog.core import Atom, Constant, Implication, Negated, Positive, Program, Rule
from ..errors import DuplicateRelation, UnknownRelation
from ..sql.types import RelationSchema, Value

Row = tuple[Value, ...]
Label = tuple


@dataclass(frozen=True)
class LabeledFact:
    fact: Atom
    label: Label
    context_id: int = 0

    @property
    def row(self) -> Row:
        return tuple(t.value for t in self.fact.args)  # type: ignore[union-attr]


def table_label(table: str, index: int) -> Label:
    return ("t", table, index)


def atom_for(predicate: str, row: Row) -> Atom:
    return Atom(predicate, tuple(Constant(v) for v in row))


@dataclass(frozen=True)
class DatabaseInstance:
    schemas: Mapping[str, RelationSchema] = field(default_factory=dict)
    tables: Mapping[str, tuple[Row, ...]] = field(default_factory=dict)
    rules: Program = field(default_factory=Program)
    rule_seq: int = 0  # next id for asserted rules; keeps labels unique

    # -- queries ----------------------------------------------------------

    def table_facts(self, name: str) -> Iterator[tuple[Row, Label]]:
        for i, row in enumerate(self.tables.get(name, ())):
            yield row, table_label(name, i)

    def relation_names(self) -> list[str]:
        return sorted(self.schemas)

    # -- mutations (copy-on-write) -----------------------------------------

    def create_table(self, schema: RelationSchema) -> "DatabaseInstance":
        if schema.relation in self.schemas:
            raise DuplicateRelation(schema.relation)
        schemas = dict(self.schemas)
        schemas[schema.relation] = schema
        tables = dict(self.tables)
        tables[schema.relation] = ()
        return replace(self, schemas=schemas, tables=tables)

    def insert(self, name: str, rows: list[Row]) -> "DatabaseInstance":
        if name not in self.schemas:
            raise UnknownRelation(name)
        schema = self.schemas[name]
        checked = tuple(schema.check_row(r) for r in rows)
        tables = dict(self.tables)
        tables[name] = tables.get(name, ()) + checked
        return replace(self, tables=tables)

    def drop_table(self, name: str) -> "DatabaseInstance":
        if name not in self.schemas:
            raise UnknownRelation(name)
        schemas = dict(self.schemas)
        del schemas[name]
        tables = dict(self.tables)
        tables.pop(name, None)
        return replace(self, schemas=schemas, tables=tables)

    def assert_rules(self, program: Program) -> "DatabaseInstance":
        """Add Datalog rules/facts, re-tagging ids to stay unique."""
        retagged, seq = retag_program(program.rules, "user", self.rule_seq)
        return replace(self, rules=Program(self.rules.rules + retagged),
                       rule_seq=seq)


def retag_program(rules: tuple[Rule, ...], origin: str,
                  start: int) -> tuple[tuple[Rule, ...], int]:
    """Fresh sequential rule ids, descending into implication antecedents
    (context identity is keyed on antecedent rule ids, so nested rules
    need globally unique ids too)."""
    seq = start

    def retag_rule(rule: Rule) -> Rule:
        nonlocal seq
        rid = (origin, seq)
        seq += 1
        body = tuple(retag_goal(g) for g in rule.body)
        return Rule(head=rule.head, body=body, restricting=rule.restricting, rule_id=rid)

    def retag_goal(goal):
        if isinstance(goal, Positive):
            return goal
        if isinstance(goal, Negated):
            return Negated(retag_goal(goal.inner))
        return Implication(tuple(retag_rule(r) for r in goal.antecedent),
                           retag_goal(goal.consequent))

    return tuple(retag_rule(r) for r in rules), seq
