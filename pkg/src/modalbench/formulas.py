"""Formula AST, concrete syntax, and rewriting for the modal language."""

from __future__ import annotations

import re
from dataclasses import dataclass

_ATOM_RE = re.compile(r"[a-z][a-z0-9_]*")


class FormulaError(ValueError):
    """Malformed concrete syntax or an ill-formed template."""


@dataclass(frozen=True)
class Formula:
    """Base node; subclasses are immutable, hashable, structurally comparable."""

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __post_init__(self) -> None:
        if not _ATOM_RE.fullmatch(self.name):
            raise FormulaError(f"bad atom name {self.name!r}")


@dataclass(frozen=True)
class MetaVar(Formula):
    """Template placeholder; only 'phi' and 'psi' are meaningful."""

    name: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class Box(Formula):
    sub: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    sub: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


# ---------------------------------------------------------------------------
# concrete syntax
#
# atoms        lowercase identifiers
# ~  []  <>    negation, necessity, possibility (bind tightest)
# |  &         disjunction / conjunction, one precedence tier, left-assoc
# ->           implication, loosest, right-assoc

_TOKEN_RE = re.compile(r"\s*(->|\[\]|<>|[~|&()]|[a-z][a-z0-9_]*)")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise FormulaError(f"unknown token at position {len(text) - len(rest)}: {rest[:8]!r}")
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def next(self) -> tuple[str, int]:
        if self.i >= len(self.tokens):
            raise FormulaError(f"unexpected end of input at position {len(self.text)}")
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def implication(self) -> Formula:
        left = self.junction()
        if self.peek() == "->":
            self.next()
            return Implies(left, self.implication())
        return left

    def junction(self) -> Formula:
        node = self.unary()
        while self.peek() in ("|", "&"):
            op, _ = self.next()
            right = self.unary()
            node = Or(node, right) if op == "|" else And(node, right)
        return node

    def unary(self) -> Formula:
        tok, pos = self.next()
        if tok == "~":
            return Not(self.unary())
        if tok == "[]":
            return Box(self.unary())
        if tok == "<>":
            return Diamond(self.unary())
        if tok == "(":
            inner = self.implication()
            closing, cpos = self.next()
            if closing != ")":
                raise FormulaError(f"expected ')' at position {cpos}, got {closing!r}")
            return inner
        if _ATOM_RE.fullmatch(tok):
            return Atom(tok)
        raise FormulaError(f"unexpected token {tok!r} at position {pos}")


def parse(text: str) -> Formula:
    """Parse concrete syntax into a Formula; raises FormulaError with a position."""
    parser = _Parser(text)
    if not parser.tokens:
        raise FormulaError("empty input")
    node = parser.implication()
    if parser.i < len(parser.tokens):
        tok, pos = parser.tokens[parser.i]
        raise FormulaError(f"trailing input at position {pos}: {tok!r}")
    return node


_PREC_UNARY = 3
_PREC_JUNCTION = 2
_PREC_IMPLIES = 1


def _prec(f: Formula) -> int:
    if isinstance(f, (Or, And)):
        return _PREC_JUNCTION
    if isinstance(f, Implies):
        return _PREC_IMPLIES
    return _PREC_UNARY


def render(f: Formula) -> str:
    """Inverse of parse, emitting minimal parentheses."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, MetaVar):
        return f.name
    if isinstance(f, Not):
        return "~" + _wrap(f.sub, below=_PREC_UNARY)
    if isinstance(f, Box):
        return "[]" + _wrap(f.sub, below=_PREC_UNARY)
    if isinstance(f, Diamond):
        return "<>" + _wrap(f.sub, below=_PREC_UNARY)
    if isinstance(f, (Or, And)):
        op = " | " if isinstance(f, Or) else " & "
        # left-associative: a same-tier right child must keep its parentheses
        return _wrap(f.left, below=_PREC_JUNCTION) + op + _wrap(f.right, below=_PREC_JUNCTION + 1)
    if isinstance(f, Implies):
        # right-associative: parenthesize an implication appearing on the left
        return _wrap(f.left, below=_PREC_IMPLIES + 1) + " -> " + _wrap(f.right, below=_PREC_IMPLIES)
    raise FormulaError(f"unknown node {f!r}")


def _wrap(f: Formula, below: int) -> str:
    text = render(f)
    return f"({text})" if _prec(f) < below else text


def substitute(template: Formula, phi: Formula, psi: Formula) -> Formula:
    """Replace the metavariables phi/psi in a template with concrete formulas."""
    if isinstance(template, MetaVar):
        if template.name == "phi":
            return phi
        if template.name == "psi":
            return psi
        raise FormulaError(f"unknown metavariable {template.name!r}")
    if isinstance(template, Atom):
        return template
    if isinstance(template, Not):
        return Not(substitute(template.sub, phi, psi))
    if isinstance(template, Box):
        return Box(substitute(template.sub, phi, psi))
    if isinstance(template, Diamond):
        return Diamond(substitute(template.sub, phi, psi))
    if isinstance(template, Or):
        return Or(substitute(template.left, phi, psi), substitute(template.right, phi, psi))
    if isinstance(template, And):
        return And(substitute(template.left, phi, psi), substitute(template.right, phi, psi))
    if isinstance(template, Implies):
        return Implies(substitute(template.left, phi, psi), substitute(template.right, phi, psi))
    raise FormulaError(f"unknown node {template!r}")


def to_primitive_basis(f: Formula) -> Formula:
    """Rewrite bottom-up so only negation, necessity, and implication remain."""
    if isinstance(f, (Atom, MetaVar)):
        return f
    if isinstance(f, Not):
        return Not(to_primitive_basis(f.sub))
    if isinstance(f, Box):
        return Box(to_primitive_basis(f.sub))
    if isinstance(f, Diamond):
        return Not(Box(Not(to_primitive_basis(f.sub))))
    if isinstance(f, Or):
        return Implies(Not(to_primitive_basis(f.left)), to_primitive_basis(f.right))
    if isinstance(f, And):
        return Not(Implies(to_primitive_basis(f.left), Not(to_primitive_basis(f.right))))
    if isinstance(f, Implies):
        return Implies(to_primitive_basis(f.left), to_primitive_basis(f.right))
    raise FormulaError(f"unknown node {f!r}")


def modal_depth(f: Formula) -> int:
    """Maximum nesting of modal operators on any root-to-leaf path."""
    if isinstance(f, (Atom, MetaVar)):
        return 0
    if isinstance(f, Not):
        return modal_depth(f.sub)
    if isinstance(f, (Box, Diamond)):
        return 1 + modal_depth(f.sub)
    if isinstance(f, (Or, And, Implies)):
        return max(modal_depth(f.left), modal_depth(f.right))
    raise FormulaError(f"unknown node {f!r}")


def atoms(f: Formula) -> frozenset[str]:
    """Atom names occurring in the formula."""
    if isinstance(f, Atom):
        return frozenset((f.name,))
    if isinstance(f, MetaVar):
        return frozenset()
    if isinstance(f, (Not, Box, Diamond)):
        return atoms(f.sub)
    if isinstance(f, (Or, And, Implies)):
        return atoms(f.left) | atoms(f.right)
    raise FormulaError(f"unknown node {f!r}")
