"""Textual Hamiltonian language: tokenizer, parser, IR and renderer.

Grammar (whitespace-insensitive, ``#`` starts a comment)::

    H            := ['+'|'-'] term (('+'|'-') term)*
    term         := coeff ('*' factor)+
    coeff        := ['i' '*'] IDENT
    factor       := '(' BARFIELD gamma_struct FIELD ')' | SCALARFIELD
    gamma_struct := '1' | 'g5' | 'g[' IDENT ']' | 'g[' IDENT ']' 'g5'

``g^mu`` is accepted as a spelling of ``g[mu]``.  Index names shared by two
bilinears are Lorentz-contracted with the metric.  Spans are UTF-8 byte offsets.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace

__all__ = [
    "DslError",
    "LexError",
    "ParseError",
    "SemanticError",
    "Token",
    "TokenKind",
    "Structure",
    "GammaStructure",
    "FieldBilinear",
    "CouplingSymbol",
    "InteractionTerm",
    "HamiltonianIR",
    "tokenize",
    "parse",
    "render",
    "builtin_library",
    "builtin",
    "BUILTIN_TEXT",
    "load_ham_file",
]


class DslError(Exception):
    """Base error carrying a byte span into the source text."""

    def __init__(self, message: str, span: tuple[int, int], text: str = ""):
        self.message = message
        self.span = span
        self.text = text
        super().__init__(f"{message} at bytes {span[0]}..{span[1]}")

    def pointer(self) -> str:
        """Two-line caret diagram locating the error in the source."""
        if not self.text:
            return str(self)
        raw = self.text.encode("utf-8")
        line_start = raw.rfind(b"\n", 0, self.span[0]) + 1
        line_end = raw.find(b"\n", self.span[0])
        line_end = len(raw) if line_end < 0 else line_end
        line = raw[line_start:line_end].decode("utf-8", errors="replace")
        col = len(raw[line_start:self.span[0]].decode("utf-8", errors="replace"))
        width = max(1, len(raw[self.span[0]:self.span[1]].decode("utf-8", errors="replace")))
        return f"{line}\n{' ' * col}{'^' * width}"


class LexError(DslError):
    pass


class ParseError(DslError):
    pass


class SemanticError(DslError):
    pass


class TokenKind(enum.Enum):
    IDENT = "ident"
    CARET_INDEX = "caret-index"
    BRACKET_INDEX = "bracket-index"
    NUMBER = "number"
    STAR = "star"
    DOT = "dot"
    PLUS = "plus"
    MINUS = "minus"
    LPAREN = "lparen"
    RPAREN = "rparen"
    LBRACE = "lbrace"
    RBRACE = "rbrace"
    COMMA = "comma"
    EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: tuple[int, int]

    @property
    def index_name(self) -> str | None:
        if self.kind is TokenKind.BRACKET_INDEX:
            return self.lexeme[2:-1].strip()
        if self.kind is TokenKind.CARET_INDEX:
            return self.lexeme[2:]
        return None


_SYMBOLS = {
    "*": TokenKind.STAR, ".": TokenKind.DOT, "+": TokenKind.PLUS, "-": TokenKind.MINUS,
    "(": TokenKind.LPAREN, ")": TokenKind.RPAREN, "{": TokenKind.LBRACE, "}": TokenKind.RBRACE,
    ",": TokenKind.COMMA,
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<bracket>g\[\s*[A-Za-z_][A-Za-z0-9_]*\s*\])
  | (?P<caret>g\^[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>[0-9]+(?:\.[0-9]+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<symbol>[*.+\-(){},])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens; the list ends with an EOF token."""
    tokens: list[Token] = []
    pos = 0
    byte_pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            ch = text[pos]
            width = len(ch.encode("utf-8"))
            raise LexError(f"unexpected character {ch!r}", (byte_pos, byte_pos + width), text)
        lexeme = m.group()
        nbytes = len(lexeme.encode("utf-8"))
        span = (byte_pos, byte_pos + nbytes)
        kind = m.lastgroup
        if kind == "bracket":
            tokens.append(Token(TokenKind.BRACKET_INDEX, lexeme, span))
        elif kind == "caret":
            tokens.append(Token(TokenKind.CARET_INDEX, lexeme, span))
        elif kind == "number":
            tokens.append(Token(TokenKind.NUMBER, lexeme, span))
        elif kind == "ident":
            tokens.append(Token(TokenKind.IDENT, lexeme, span))
        elif kind == "symbol":
            tokens.append(Token(_SYMBOLS[lexeme], lexeme, span))
        pos = m.end()
        byte_pos += nbytes
    tokens.append(Token(TokenKind.EOF, "", (byte_pos, byte_pos)))
    return tokens


# --------------------------------------------------------------------------- IR


class Structure(enum.Enum):
    SCALAR = "S"
    PSEUDOSCALAR = "P"
    VECTOR = "V"
    AXIAL_VECTOR = "A"

    @property
    def has_index(self) -> bool:
        return self in (Structure.VECTOR, Structure.AXIAL_VECTOR)


@dataclass(frozen=True)
class GammaStructure:
    kind: Structure
    index: str | None = None

    def __post_init__(self):
        if self.kind.has_index != (self.index is not None):
            raise ValueError(f"{self.kind.name} needs {'one index' if self.kind.has_index else 'no index'}")

    def render(self) -> str:
        if self.kind is Structure.SCALAR:
            return "1"
        if self.kind is Structure.PSEUDOSCALAR:
            return "g5"
        if self.kind is Structure.VECTOR:
            return f"g[{self.index}]"
        return f"g[{self.index}] g5"


SPECIES = {"N": "nucleon", "e": "electron"}
_BARRED = {"Nbar": "nucleon", "ebar": "electron"}
_SYMBOL_OF = {"nucleon": "N", "electron": "e"}


@dataclass(frozen=True)
class FieldBilinear:
    species: str
    structure: GammaStructure

    def render(self) -> str:
        s = _SYMBOL_OF[self.species]
        return f"({s}bar {self.structure.render()} {s})"


@dataclass(frozen=True)
class CouplingSymbol:
    """Coupling name with an optional explicit factor of ``i``.

    ``absorbed`` lists scalar fields folded into the coupling (the static
    propagator convention); they bind by name at evaluation time.
    """

    name: str
    imaginary_unit: bool = False
    real_valued: bool = True
    absorbed: tuple[str, ...] = ()

    @property
    def conjugation_sign(self) -> int:
        """Sign picked up under complex conjugation (real symbols are fixed)."""
        return -1 if self.imaginary_unit else 1

    def render(self) -> str:
        return f"i*{self.name}" if self.imaginary_unit else self.name


@dataclass(frozen=True)
class InteractionTerm:
    coupling: CouplingSymbol
    factors: tuple[FieldBilinear, ...]
    contractions: frozenset = field(default_factory=frozenset)
    external_scalars: tuple[str, ...] = ()

    def index_names(self) -> list[str]:
        return [f.structure.index for f in self.factors if f.structure.index is not None]

    @property
    def fully_contracted(self) -> bool:
        names = self.index_names()
        return all(names.count(n) == 2 for n in names)

    def render(self) -> str:
        parts = [self.coupling.render()]
        parts += [f.render() for f in self.factors]
        parts += list(self.external_scalars)
        parts += list(self.coupling.absorbed)
        return "*".join(parts)


@dataclass(frozen=True)
class HamiltonianIR:
    terms: tuple[tuple[int, InteractionTerm], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a Hamiltonian needs at least one term")
        for sign, _ in self.terms:
            if sign not in (1, -1):
                raise ValueError(f"term sign must be +1 or -1, got {sign}")

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def couplings(self) -> set[str]:
        names = set()
        for _, t in self.terms:
            names.add(t.coupling.name)
            names.update(t.external_scalars)
            names.update(t.coupling.absorbed)
        return names


def render(ir: HamiltonianIR) -> str:
    out = []
    for k, (sign, term) in enumerate(ir.terms):
        body = term.render()
        if k == 0:
            out.append(body if sign > 0 else f"- {body}")
        else:
            out.append(f"{'+' if sign > 0 else '-'} {body}")
    return " ".join(out)


# ----------------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str, static_propagator: bool):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.static_propagator = static_propagator

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind is not TokenKind.EOF:
            self.pos += 1
        return t

    def expect(self, kind: TokenKind, what: str) -> Token:
        if self.tok.kind is not kind:
            self.fail(f"expected {what}, found {self._describe(self.tok)}")
        return self.advance()

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.span, self.text)

    @staticmethod
    def _describe(tok: Token) -> str:
        return "end of input" if tok.kind is TokenKind.EOF else repr(tok.lexeme)

    def hamiltonian(self) -> HamiltonianIR:
        terms = []
        sign = 1
        if self.tok.kind in (TokenKind.PLUS, TokenKind.MINUS):
            sign = 1 if self.advance().kind is TokenKind.PLUS else -1
        terms.append((sign, self.term()))
        while self.tok.kind in (TokenKind.PLUS, TokenKind.MINUS):
            sign = 1 if self.advance().kind is TokenKind.PLUS else -1
            terms.append((sign, self.term()))
        if self.tok.kind is not TokenKind.EOF:
            self.fail(f"unexpected {self._describe(self.tok)}")
        return HamiltonianIR(tuple(terms))

    def term(self) -> InteractionTerm:
        start = self.tok
        coupling = self.coeff()
        factors: list[tuple[FieldBilinear, Token]] = []
        scalars: list[str] = []
        self.expect(TokenKind.STAR, "'*' after coupling")
        while True:
            if self.tok.kind is TokenKind.LPAREN:
                factors.append(self.bilinear())
            elif self.tok.kind is TokenKind.IDENT:
                name = self.advance().lexeme
                if name in _BARRED or name in SPECIES or name in ("g5", "i"):
                    self.fail(f"{name!r} cannot stand alone as a scalar field", self.tokens[self.pos - 1])
                scalars.append(name)
            else:
                self.fail(f"expected a bilinear '(...)' or scalar field, found {self._describe(self.tok)}")
            if self.tok.kind is not TokenKind.STAR:
                break
            self.advance()
        if not factors:
            self.fail("a term needs at least one field bilinear", start)
        contractions = self.contract(factors, start)
        if self.static_propagator and scalars:
            coupling = replace(coupling, absorbed=coupling.absorbed + tuple(scalars))
            scalars = []
        return InteractionTerm(coupling, tuple(f for f, _ in factors), contractions, tuple(scalars))

    def coeff(self) -> CouplingSymbol:
        tok = self.expect(TokenKind.IDENT, "a coupling name")
        if tok.lexeme == "i":
            if self.tok.kind is not TokenKind.STAR:
                self.fail("expected '*' after i")
            self.advance()
            name_tok = self.expect(TokenKind.IDENT, "a coupling name after 'i*'")
            self._check_coupling_name(name_tok)
            return CouplingSymbol(name_tok.lexeme, imaginary_unit=True)
        self._check_coupling_name(tok)
        return CouplingSymbol(tok.lexeme)

    def _check_coupling_name(self, tok: Token):
        if tok.lexeme in _BARRED or tok.lexeme in SPECIES or tok.lexeme in ("g5", "i"):
            self.fail(f"{tok.lexeme!r} is reserved and cannot name a coupling", tok)

    def bilinear(self) -> tuple[FieldBilinear, Token]:
        open_tok = self.advance()
        bar = self.expect(TokenKind.IDENT, "a barred field (Nbar or ebar)")
        if bar.lexeme not in _BARRED:
            self.fail(f"expected a barred field (Nbar or ebar), found {bar.lexeme!r}", bar)
        structure, index_tok = self.gamma_struct()
        fld = self.expect(TokenKind.IDENT, "a field (N or e)")
        if fld.lexeme not in SPECIES:
            self.fail(f"expected a field (N or e), found {fld.lexeme!r}", fld)
        close = self.expect(TokenKind.RPAREN, "')'")
        if _BARRED[bar.lexeme] != SPECIES[fld.lexeme]:
            raise SemanticError(
                f"species mismatch: {bar.lexeme} paired with {fld.lexeme}",
                (open_tok.span[0], close.span[1]), self.text)
        return FieldBilinear(SPECIES[fld.lexeme], structure), (index_tok or open_tok)

    def gamma_struct(self) -> tuple[GammaStructure, Token | None]:
        tok = self.tok
        if tok.kind is TokenKind.NUMBER:
            if tok.lexeme != "1":
                self.fail(f"only '1' is a valid scalar structure, found {tok.lexeme!r}")
            self.advance()
            return GammaStructure(Structure.SCALAR), None
        if tok.kind is TokenKind.IDENT and tok.lexeme == "g5":
            self.advance()
            return GammaStructure(Structure.PSEUDOSCALAR), None
        if tok.kind in (TokenKind.BRACKET_INDEX, TokenKind.CARET_INDEX):
            self.advance()
            if self.tok.kind is TokenKind.IDENT and self.tok.lexeme == "g5":
                self.advance()
                return GammaStructure(Structure.AXIAL_VECTOR, tok.index_name), tok
            return GammaStructure(Structure.VECTOR, tok.index_name), tok
        self.fail(f"expected a gamma structure (1, g5, g[mu], g[mu] g5), found {self._describe(tok)}")

    def contract(self, factors, term_start: Token) -> frozenset:
        seen: dict[str, list[tuple[int, Token]]] = {}
        for k, (f, tok) in enumerate(factors):
            if f.structure.index is not None:
                seen.setdefault(f.structure.index, []).append((k, tok))
        pairs = []
        for name, uses in seen.items():
            if len(uses) == 1:
                raise SemanticError(f"unbound index {name!r} appears only once", uses[0][1].span, self.text)
            if len(uses) > 2:
                raise SemanticError(f"index {name!r} appears {len(uses)} times", uses[2][1].span, self.text)
            pairs.append((name, (uses[0][0], uses[1][0])))
        return frozenset(pairs)


def parse(text: str, *, static_propagator: bool = False) -> HamiltonianIR:
    """Parse Hamiltonian text into a validated IR.

    With ``static_propagator`` set, scalar fields such as the axion field are
    folded into the term's coupling.
    """
    return _Parser(text, static_propagator).hamiltonian()


def load_ham_file(path, *, static_propagator: bool = False) -> HamiltonianIR:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), static_propagator=static_propagator)


# --------------------------------------------------------------------- builtins

_VV = "GF*(Nbar g[mu] N)*(ebar g[mu] e)"
_AV = "GF*(Nbar g[mu] g5 N)*(ebar g[mu] e)"
_VA = "GF*(Nbar g[mu] N)*(ebar g[mu] g5 e)"
_AA = "GF*(Nbar g[mu] g5 N)*(ebar g[mu] g5 e)"

BUILTIN_TEXT = {
    "H_VV": _VV,
    "H_AV": _AV,
    "H_VA": _VA,
    "H_AA": _AA,
    "H_NC": f"{_VV} - {_AV} - {_VA} + {_AA}",
    "H_ax": "i*Ka*(Nbar 1 N)*(ebar g5 e)",
}


def builtin_library() -> dict[str, HamiltonianIR]:
    return {name: parse(text) for name, text in BUILTIN_TEXT.items()}


def builtin(name: str) -> HamiltonianIR:
    try:
        return parse(BUILTIN_TEXT[name])
    except KeyError:
        raise KeyError(f"no builtin Hamiltonian {name!r}; known: {', '.join(BUILTIN_TEXT)}") from None
