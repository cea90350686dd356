"""Nonrelativistic chirality classification by P/T sign composition.

Operators such as ``sigma . p`` or ``E . B`` are built from kinematic atoms
with known parity and time-reversal signatures.  A fully contracted product
is a rotational scalar; its (P, T) signs decide the chirality class.

One-line syntax (tokens shared with :mod:`chiralpv.dsl`)::

    expr := factor ('*' factor)*
    factor := operand ['.' operand]
    operand := ATOM | NUMBER | '(' expr ')' | '{' expr ',' expr '}'

Atom names may carry a particle label after an underscore (``sigma_e``,
``p_j``); the label does not affect the signature.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

from .dsl import ParseError, Token, TokenKind, tokenize

__all__ = [
    "Character",
    "KinematicAtom",
    "Atom",
    "Dot",
    "Product",
    "Anticommutator",
    "ScalarConst",
    "SymmetrySignature",
    "ChiralityClass",
    "MalformedExpression",
    "atom_table",
    "lookup",
    "compose_signature",
    "classify_kinematic",
    "classify_signature",
    "parse_kinematic",
]


class Character(enum.Enum):
    POLAR = "polar-vector"
    AXIAL = "axial-vector"
    SCALAR_FUNCTION = "scalar-function"

    @property
    def is_vector(self) -> bool:
        return self is not Character.SCALAR_FUNCTION


@dataclass(frozen=True)
class KinematicAtom:
    name: str
    parity_sign: int
    time_sign: int
    character: Character


_ATOMS = (
    KinematicAtom("p", -1, -1, Character.POLAR),
    KinematicAtom("r", -1, +1, Character.POLAR),
    KinematicAtom("sigma", +1, -1, Character.AXIAL),
    KinematicAtom("E", -1, +1, Character.POLAR),
    KinematicAtom("B", +1, -1, Character.AXIAL),
    KinematicAtom("rho", +1, +1, Character.SCALAR_FUNCTION),
)

# couplings and masses entering the nonrelativistic Hamiltonians
_CONSTANTS = ("GF", "QW", "Ka", "gs", "gp", "me", "mphi", "pi")

_TABLE = {a.name: a for a in _ATOMS}
_TABLE.update({c: KinematicAtom(c, +1, +1, Character.SCALAR_FUNCTION) for c in _CONSTANTS})


def atom_table() -> list[KinematicAtom]:
    return list(_TABLE.values())


def lookup(name: str) -> KinematicAtom:
    """Find an atom by name, ignoring a trailing ``_label`` particle tag."""
    if name in _TABLE:
        return _TABLE[name]
    base = name.split("_", 1)[0]
    if base in _TABLE:
        return _TABLE[base]
    raise KeyError(f"unknown kinematic atom {name!r}")


@dataclass(frozen=True)
class Atom:
    atom: KinematicAtom


@dataclass(frozen=True)
class ScalarConst:
    value: float = 1.0


@dataclass(frozen=True)
class Dot:
    left: "KinematicExpr"
    right: "KinematicExpr"


@dataclass(frozen=True)
class Product:
    children: tuple


@dataclass(frozen=True)
class Anticommutator:
    left: "KinematicExpr"
    right: "KinematicExpr"


KinematicExpr = Union[Atom, ScalarConst, Dot, Product, Anticommutator]


@dataclass(frozen=True)
class SymmetrySignature:
    p_sign: int
    t_sign: int
    rotational_scalar: bool

    def __mul__(self, other: "SymmetrySignature") -> "SymmetrySignature":
        return SymmetrySignature(self.p_sign * other.p_sign, self.t_sign * other.t_sign,
                                 self.rotational_scalar and other.rotational_scalar)


class ChiralityClass(enum.Enum):
    TRULY_CHIRAL = "TrulyChiral"
    FALSELY_CHIRAL = "FalselyChiral"
    ACHIRAL = "Achiral"
    NOT_ROTATIONAL_SCALAR = "NotRotationalScalar"
    UNDETERMINED = "Undetermined"

    def __str__(self):
        return self.value


class MalformedExpression(ValueError):
    pass


_IDENTITY = SymmetrySignature(1, 1, True)


def _is_vector(expr) -> bool:
    if isinstance(expr, Atom):
        return expr.atom.character.is_vector
    if isinstance(expr, Product):
        # a vector scaled by scalars is still a vector
        vectors = [c for c in expr.children if _is_vector(c)]
        return len(vectors) == 1 and all(_is_scalar(c) for c in expr.children if c not in vectors)
    return False


def _is_scalar(expr) -> bool:
    return compose_signature(expr).rotational_scalar


def compose_signature(expr: KinematicExpr) -> SymmetrySignature:
    if isinstance(expr, ScalarConst):
        return _IDENTITY
    if isinstance(expr, Atom):
        a = expr.atom
        return SymmetrySignature(a.parity_sign, a.time_sign, not a.character.is_vector)
    if isinstance(expr, Dot):
        for side in (expr.left, expr.right):
            if not _is_vector(side):
                raise MalformedExpression("both sides of a dot product must be vectors")
        left, right = compose_signature(expr.left), compose_signature(expr.right)
        return SymmetrySignature(left.p_sign * right.p_sign, left.t_sign * right.t_sign, True)
    if isinstance(expr, Product):
        sig = _IDENTITY
        for child in expr.children:
            sig = sig * compose_signature(child)
        return sig
    if isinstance(expr, Anticommutator):
        return compose_signature(expr.left) * compose_signature(expr.right)
    raise MalformedExpression(f"not a kinematic expression: {expr!r}")


def classify_signature(sig: SymmetrySignature) -> ChiralityClass:
    if sig.p_sign == 1:
        return ChiralityClass.ACHIRAL
    if not sig.rotational_scalar:
        return ChiralityClass.NOT_ROTATIONAL_SCALAR
    return ChiralityClass.TRULY_CHIRAL if sig.t_sign == 1 else ChiralityClass.FALSELY_CHIRAL


def classify_kinematic(expr: KinematicExpr) -> ChiralityClass:
    return classify_signature(compose_signature(expr))


# ----------------------------------------------------------------------- parser


class _KParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def fail(self, message, tok=None):
        raise ParseError(message, (tok or self.tok).span, self.text)

    def expect(self, kind, what):
        if self.tok.kind is not kind:
            found = "end of input" if self.tok.kind is TokenKind.EOF else repr(self.tok.lexeme)
            self.fail(f"expected {what}, found {found}")
        t = self.tok
        self.pos += 1
        return t

    def parse(self):
        expr = self.expr()
        if self.tok.kind is not TokenKind.EOF:
            self.fail(f"unexpected {self.tok.lexeme!r}")
        return expr

    def expr(self):
        children = [self.factor()]
        while self.tok.kind is TokenKind.STAR:
            self.pos += 1
            children.append(self.factor())
        return children[0] if len(children) == 1 else Product(tuple(children))

    def factor(self):
        start = self.tok
        left = self.operand()
        if self.tok.kind is TokenKind.DOT:
            self.pos += 1
            right_tok = self.tok
            right = self.operand()
            for side, tok in ((left, start), (right, right_tok)):
                if not _is_vector(side):
                    self.fail("dot product operands must be vectors", tok)
            return Dot(left, right)
        return left

    def operand(self):
        tok = self.tok
        if tok.kind is TokenKind.IDENT:
            self.pos += 1
            try:
                return Atom(lookup(tok.lexeme))
            except KeyError:
                self.fail(f"unknown kinematic atom {tok.lexeme!r}", tok)
        if tok.kind is TokenKind.NUMBER:
            self.pos += 1
            return ScalarConst(float(tok.lexeme))
        if tok.kind is TokenKind.LPAREN:
            self.pos += 1
            inner = self.expr()
            self.expect(TokenKind.RPAREN, "')'")
            return inner
        if tok.kind is TokenKind.LBRACE:
            self.pos += 1
            left = self.expr()
            self.expect(TokenKind.COMMA, "','")
            right = self.expr()
            self.expect(TokenKind.RBRACE, "'}'")
            return Anticommutator(left, right)
        found = "end of input" if tok.kind is TokenKind.EOF else repr(tok.lexeme)
        self.fail(f"expected an atom, number, '(' or '{{', found {found}")


def parse_kinematic(text: str) -> KinematicExpr:
    """Parse e.g. ``"{ sigma_e . p , rho }"`` into a kinematic expression tree."""
    return _KParser(text).parse()
