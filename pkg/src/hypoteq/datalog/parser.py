"""Parser for the textual Datalog syntax (Prolog-flavoured).

Clauses are terminated by ``.``; ``:-`` separates head and body; ``,``
joins body goals; ``not `` negates; ``=>`` builds an embedded implication
whose antecedent elements may be facts, ``-``-prefixed restricting facts,
or parenthesized rules, joined by ``,`` or ``/\\``. Comparisons are infix
(``=``, ``\\=``, ``<``, ``>``, ``=<``, ``>=``; ``<=`` and ``<>`` are
accepted as synonyms). ``%`` starts a line comment.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ArityMismatch, DatalogSyntaxError
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
    iter_reachable_rules,
)

_PUNCT = [":-", "=>", "/\\", "\\=", "=<", ">=", "<=", "<>", "(", ")", ",", ".", "-", "=", "<", ">"]

_COMPARE_CANON = {"=": "=", "\\=": "\\=", "<>": "\\=", "<": "<", ">": ">", "=<": "=<", "<=": "=<", ">=": ">="}


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | var | int | float | string | punct | eof
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == "'":
            j, buf = i + 1, []
            while j < n:
                if text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        buf.append("'")
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            else:
                raise DatalogSyntaxError("unterminated quoted atom", start_line, start_col)
            tokens.append(_Token("string", "".join(buf), start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j + 1 < n and text[j] == "." and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
                tokens.append(_Token("float", text[i:j], start_line, start_col))
            else:
                tokens.append(_Token("int", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "var" if (word[0].isupper() or word[0] == "_") else "ident"
            tokens.append(_Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(_Token("punct", p, start_line, start_col))
                i += len(p)
                col += len(p)
                break
        else:
            raise DatalogSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], origin: str):
        self.tokens = tokens
        self.pos = 0
        self.origin = origin
        self.seq = 0
        self.anon = 0

    # -- token plumbing -----------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def match(self, value: str) -> bool:
        tok = self.peek()
        if tok.kind == "punct" and tok.value == value:
            self.advance()
            return True
        return False

    def expect(self, value: str) -> _Token:
        tok = self.peek()
        if tok.kind == "punct" and tok.value == value:
            return self.advance()
        raise DatalogSyntaxError(f"found {tok.value or 'end of input'!r}", tok.line, tok.col, expected=value)

    def fail(self, expected: str) -> DatalogSyntaxError:
        tok = self.peek()
        return DatalogSyntaxError(
            f"found {tok.value or 'end of input'!r}", tok.line, tok.col, expected=expected)

    # -- grammar ------------------------------------------------------------

    def parse_program(self) -> Program:
        rules = []
        while self.peek().kind != "eof":
            rules.append(self.parse_clause())
        return Program(tuple(rules))

    def next_id(self) -> tuple[str, int]:
        rid = (self.origin, self.seq)
        self.seq += 1
        return rid

    def parse_clause(self) -> Rule:
        rule = self.parse_rule_shape(self.next_id())
        self.expect(".")
        return rule

    def parse_rule_shape(self, rule_id: tuple[str, int]) -> Rule:
        restricting = self.match("-")
        head = self.parse_atom()
        if head.is_comparison:
            raise self.fail("rule head predicate")
        body: tuple[Goal, ...] = ()
        if self.match(":-"):
            body = self.parse_body()
        return Rule(head=head, body=body, restricting=restricting, rule_id=rule_id)

    def parse_body(self) -> tuple[Goal, ...]:
        """Parse a comma/``/\\``-joined element list.

        If ``=>`` follows the list, the elements are the antecedent of an
        implication (they must all be rule-shaped) and the goal after ``=>``
        is its consequent; otherwise the elements are the body goals.
        """
        elements: list[tuple[bool, object]] = [self.parse_element()]
        while self.match(",") or self.match("/\\"):
            elements.append(self.parse_element())
        if self.match("=>"):
            antecedent = tuple(self.to_rule(e) for e in elements)
            consequent = self.parse_consequent()
            return (Implication(antecedent, consequent),)
        return tuple(self.to_goal(e) for e in elements)

    def parse_consequent(self) -> Goal:
        """Goal after ``=>``; right-associative for nested implications."""
        is_rule, item = self.parse_element()
        if is_rule:
            raise self.fail("goal after =>")
        if self.match("=>"):
            ante = self.implication_antecedent(item)
            return Implication(ante, self.parse_consequent())
        return item  # type: ignore[return-value]

    def implication_antecedent(self, goal: object) -> tuple[Rule, ...]:
        if isinstance(goal, Positive):
            return (Rule(head=goal.atom, rule_id=self.next_id()),)
        raise self.fail("facts or parenthesized rules before =>")

    def parse_element(self) -> tuple[bool, object]:
        """One list element: a goal, or a rule usable in an antecedent.

        Returns (is_rule, item); a bare atom is reported as a goal and
        converted to a fact if the list turns out to be an antecedent.
        """
        tok = self.peek()
        if tok.kind == "punct" and tok.value == "-":
            # Restricting fact, only meaningful inside an antecedent.
            self.advance()
            atom = self.parse_atom()
            return True, Rule(head=atom, restricting=True, rule_id=self.next_id())
        if tok.kind == "ident" and tok.value == "not":
            self.advance()
            _, inner = self.parse_element()
            if not isinstance(inner, (Positive, Negated, Implication)):
                raise self.fail("goal after not")
            return False, Negated(inner)
        if tok.kind == "punct" and tok.value == "(":
            self.advance()
            saved = (self.pos, self.seq, self.anon)
            # Try a parenthesized rule first (supports ``(h :- b)`` and
            # plain parenthesized goals / implications).
            try:
                rule = self.parse_rule_shape(self.next_id())
                if rule.body or rule.restricting:
                    self.expect(")")
                    return True, rule
            except DatalogSyntaxError:
                pass
            self.pos, self.seq, self.anon = saved
            goals = self.parse_body()
            self.expect(")")
            if len(goals) != 1:
                raise self.fail("single goal inside parentheses")
            return False, goals[0]
        return False, Positive(self.parse_atom())

    def to_goal(self, element: tuple[bool, object]) -> Goal:
        is_rule, item = element
        if is_rule:
            raise self.fail("goal")
        return item  # type: ignore[return-value]

    def to_rule(self, element: tuple[bool, object]) -> Rule:
        is_rule, item = element
        if is_rule:
            return item  # type: ignore[return-value]
        if isinstance(item, Positive):
            return Rule(head=item.atom, rule_id=self.next_id())
        raise self.fail("rule in antecedent")

    def parse_atom(self) -> Atom:
        left = self.parse_term_or_name()
        tok = self.peek()
        if tok.kind == "punct" and tok.value in _COMPARE_CANON:
            op = _COMPARE_CANON[self.advance().value]
            right = self.parse_term()
            return Atom(op, (self.as_term(left), right))
        if isinstance(left, tuple):  # (name, args) from a compound atom
            name, args = left
            return Atom(name, args)
        if isinstance(left, Constant) and isinstance(left.value, str):
            return Atom(left.value, ())  # 0-ary predicate
        raise self.fail("atom")

    def parse_term_or_name(self):
        tok = self.peek()
        if tok.kind == "ident":
            self.advance()
            if self.match("("):
                args = [self.parse_term()]
                while self.match(","):
                    args.append(self.parse_term())
                self.expect(")")
                return (tok.value, tuple(args))
            return Constant(tok.value)
        return self.parse_term()

    def as_term(self, item) -> Term:
        if isinstance(item, (Variable, Constant)):
            return item
        raise self.fail("term")

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "var":
            self.advance()
            if tok.value == "_":
                self.anon += 1
                return Variable(f"_G{self.anon}")
            return Variable(tok.value)
        if tok.kind == "int":
            self.advance()
            return Constant(int(tok.value))
        if tok.kind == "float":
            self.advance()
            return Constant(float(tok.value))
        if tok.kind == "string":
            self.advance()
            return Constant(tok.value)
        if tok.kind == "ident":
            self.advance()
            return Constant(tok.value)
        if tok.kind == "punct" and tok.value == "-":
            nxt = self.tokens[self.pos + 1]
            if nxt.kind in ("int", "float"):
                self.advance()
                self.advance()
                return Constant(-int(nxt.value) if nxt.kind == "int" else -float(nxt.value))
        raise self.fail("term")


def parse_datalog(text: str, origin: str = "user") -> Program:
    """Parse a sequence of clauses into a Program.

    Rule ids are assigned in textual order under the given origin tag.
    Raises DatalogSyntaxError on malformed input and ArityMismatch when a
    predicate is used with two different arities within the text.
    """
    program = _Parser(_tokenize(text), origin).parse_program()
    arities: dict[str, int] = {}
    for rule in iter_reachable_rules(program.rules):
        for atom in _all_atoms(rule):
            if atom.is_comparison:
                continue
            seen = arities.setdefault(atom.predicate, atom.arity)
            if seen != atom.arity:
                raise ArityMismatch(atom.predicate, atom.arity, seen)
    return program


def parse_goal(text: str) -> Goal:
    """Parse a single goal (no trailing dot required)."""
    parser = _Parser(_tokenize(text.rstrip().rstrip(".")), "goal")
    goals = parser.parse_body()
    if len(goals) != 1 or parser.peek().kind != "eof":
        raise DatalogSyntaxError("expected a single goal", 1, 1)
    return goals[0]


def _all_atoms(rule: Rule):
    yield rule.head
    stack = list(rule.body)
    while stack:
        g = stack.pop()
        if isinstance(g, Positive):
            yield g.atom
        elif isinstance(g, Negated):
            stack.append(g.inner)
        else:
            stack.append(g.consequent)
