"""Formula AST, surface-syntax parser and printer, and variable substitution.

Surface syntax::

    formula := imp
    imp     := or ("->" imp)?
    or      := and ("|" and)*
    and     := neg ("&" neg)*
    neg     := "~" neg | atom
    atom    := ident | ident "(" ident ("," ident)* ")" | "(" formula ")"
             | "forall" ident neg | "exists" ident neg | "bot" | "top"

A quantifier takes a single ``neg``-level unit as its body, so
``forall v P(v) | Q(v)`` is a disjunction whose left side is quantified.
Unicode connectives (``¬ ∧ ∨ → ∀ ∃ ⊥ ⊤``) are accepted as synonyms.

``bot`` abbreviates ``p0 & ~p0`` and ``top`` abbreviates ``~(p0 & ~p0)``;
the atom ``p0`` is reserved for this purpose and rejected in user input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

__all__ = [
    "PropAtom", "PredAtom", "Neg", "And", "Or", "Imp", "Forall", "Exists",
    "Formula", "Profile", "PROPOSITIONAL", "FIRST_ORDER", "WITH_IMPLICATION", "FULL",
    "FormulaSyntaxError", "ProfileError", "SubstitutionError",
    "RESERVED_ATOM", "BOT", "TOP",
    "parse", "render", "free_vars", "all_vars", "substitutable", "substitute",
    "subformulas", "size", "depth", "atoms", "is_propositional", "uses_implication",
    "check_profile",
]

RESERVED_ATOM = "p0"


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropAtom:
    name: str

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class PredAtom:
    name: str
    args: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("predicate atoms need at least one argument")

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Neg:
    body: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return render(self)


Formula = Union[PropAtom, PredAtom, Neg, And, Or, Imp, Forall, Exists]
_BINARY = (And, Or, Imp)
_QUANT = (Forall, Exists)

BOT: Formula = And(PropAtom(RESERVED_ATOM), Neg(PropAtom(RESERVED_ATOM)))
TOP: Formula = Neg(BOT)


@dataclass(frozen=True)
class Profile:
    """Which optional parts of the language are enabled."""

    implication: bool = False
    quantifiers: bool = False


PROPOSITIONAL = Profile()
FIRST_ORDER = Profile(quantifiers=True)
WITH_IMPLICATION = Profile(implication=True)
FULL = Profile(implication=True, quantifiers=True)


class FormulaSyntaxError(ValueError):
    """Malformed input; ``offset`` is the byte offset into the UTF-8 text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class ProfileError(ValueError):
    """A construct was used that the active language profile disables."""


class SubstitutionError(ValueError):
    """Substitution would capture a variable."""


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_SYMBOLS = {
    "~": "~", "¬": "~",
    "&": "&", "∧": "&",
    "|": "|", "∨": "|",
    "→": "->",
    "(": "(", ")": ")", ",": ",",
    "∀": "forall", "∃": "exists", "⊥": "bot", "⊤": "top",
}
_KEYWORDS = {"forall", "exists", "bot", "top"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # one of the symbol kinds, "ident", or "end"
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    n = len(text)

    def off(k: int) -> int:
        return len(text[:k].encode("utf-8"))

    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif text.startswith("->", i):
            toks.append(_Tok("->", "->", off(i)))
            i += 2
        elif ch in _SYMBOLS:
            kind = _SYMBOLS[ch]
            toks.append(_Tok(kind, ch, off(i)))
            i += 1
        elif ch.isascii() and (ch.isalpha() or ch == "_"):
            j = i + 1
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            toks.append(_Tok(word if word in _KEYWORDS else "ident", word, off(i)))
            i = j
        else:
            raise FormulaSyntaxError(f"unexpected character {ch!r}", off(i))
    toks.append(_Tok("end", "", off(n)))
    return toks


class _Parser:
    def __init__(self, text: str, profile: Profile):
        self.toks = _tokenize(text)
        self.pos = 0
        self.profile = profile

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def take(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            want = "identifier" if kind == "ident" else repr(kind)
            got = "end of input" if tok.kind == "end" else repr(tok.text)
            raise FormulaSyntaxError(f"expected {want}, found {got}", tok.offset)
        self.pos += 1
        return tok

    def formula(self) -> Formula:
        return self.imp()

    def imp(self) -> Formula:
        left = self.disj()
        tok = self.peek()
        if tok.kind == "->":
            if not self.profile.implication:
                raise ProfileError(f"implication is disabled in this profile (at byte {tok.offset})")
            self.pos += 1
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek().kind == "|":
            self.pos += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.neg()
        while self.peek().kind == "&":
            self.pos += 1
            f = And(f, self.neg())
        return f

    def neg(self) -> Formula:
        if self.peek().kind == "~":
            self.pos += 1
            return Neg(self.neg())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "(":
            self.pos += 1
            f = self.formula()
            self.take(")")
            return f
        if tok.kind in ("forall", "exists"):
            if not self.profile.quantifiers:
                raise ProfileError(f"quantifiers are disabled in this profile (at byte {tok.offset})")
            self.pos += 1
            var = self.take("ident").text
            body = self.neg()
            return Forall(var, body) if tok.kind == "forall" else Exists(var, body)
        if tok.kind == "bot":
            self.pos += 1
            return BOT
        if tok.kind == "top":
            self.pos += 1
            return TOP
        if tok.kind == "ident":
            self.pos += 1
            if tok.text == RESERVED_ATOM:
                raise FormulaSyntaxError(f"{RESERVED_ATOM!r} is reserved for bot/top", tok.offset)
            if self.peek().kind == "(":
                if not self.profile.quantifiers:
                    raise ProfileError(
                        f"predicate atoms need the first-order profile (at byte {tok.offset})")
                self.pos += 1
                args = [self.take("ident").text]
                while self.peek().kind == ",":
                    self.pos += 1
                    args.append(self.take("ident").text)
                self.take(")")
                return PredAtom(tok.text, tuple(args))
            return PropAtom(tok.text)
        got = "end of input" if tok.kind == "end" else repr(tok.text)
        raise FormulaSyntaxError(f"expected a formula, found {got}", tok.offset)


def parse(text: str, profile: Profile = FULL) -> Formula:
    """Parse ``text`` into a formula, enforcing ``profile``."""
    p = _Parser(text, profile)
    f = p.formula()
    tok = p.peek()
    if tok.kind != "end":
        raise FormulaSyntaxError(f"unexpected {tok.text!r} after formula", tok.offset)
    return f


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def _prec(f: Formula) -> int:
    if f == BOT:
        return _PREC_UNARY
    if isinstance(f, Imp):
        return _PREC_IMP
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    return _PREC_UNARY


def _wrap(f: Formula, need: int) -> str:
    s = render(f)
    return f"({s})" if _prec(f) < need else s


def render(f: Formula) -> str:
    """Minimal-parenthesis rendering that parses back to ``f``."""
    if f == BOT:
        return "bot"
    if f == TOP:
        return "top"
    if isinstance(f, PropAtom):
        return f.name
    if isinstance(f, PredAtom):
        return f"{f.name}({', '.join(f.args)})"
    if isinstance(f, Neg):
        return "~" + _wrap(f.body, _PREC_UNARY)
    if isinstance(f, And):
        return f"{_wrap(f.left, _PREC_AND)} & {_wrap(f.right, _PREC_AND + 1)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, _PREC_OR)} | {_wrap(f.right, _PREC_OR + 1)}"
    if isinstance(f, Imp):
        return f"{_wrap(f.left, _PREC_IMP + 1)} -> {_wrap(f.right, _PREC_IMP)}"
    if isinstance(f, (Forall, Exists)):
        kw = "forall" if isinstance(f, Forall) else "exists"
        return f"{kw} {f.var} {_wrap(f.body, _PREC_UNARY)}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Structural queries
# ---------------------------------------------------------------------------

def _children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Neg, Forall, Exists)):
        return (f.body,)
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    return ()


def _walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(_children(g))


def subformulas(f: Formula) -> frozenset:
    """All subformulas of ``f``, including ``f``."""
    return frozenset(_walk(f))


def size(f: Formula) -> int:
    """Number of AST nodes."""
    return sum(1 for _ in _walk(f))


def depth(f: Formula) -> int:
    """Height of the AST; atoms have depth 0."""
    kids = _children(f)
    return 0 if not kids else 1 + max(depth(k) for k in kids)


def atoms(f: Formula) -> frozenset:
    """Names of propositional atoms occurring in ``f``."""
    return frozenset(g.name for g in _walk(f) if isinstance(g, PropAtom))


def is_propositional(f: Formula) -> bool:
    return not any(isinstance(g, (PredAtom, Forall, Exists)) for g in _walk(f))


def uses_implication(f: Formula) -> bool:
    return any(isinstance(g, Imp) for g in _walk(f))


def check_profile(f: Formula, profile: Profile) -> None:
    """Raise ProfileError if ``f`` uses a construct ``profile`` disables."""
    if not profile.implication and uses_implication(f):
        raise ProfileError("implication is disabled in this profile")
    if not profile.quantifiers and not is_propositional(f):
        raise ProfileError("first-order constructs are disabled in this profile")


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, PredAtom):
        return frozenset(f.args)
    if isinstance(f, PropAtom):
        return frozenset()
    if isinstance(f, _QUANT):
        return free_vars(f.body) - {f.var}
    out: frozenset = frozenset()
    for k in _children(f):
        out |= free_vars(k)
    return out


def all_vars(f: Formula) -> frozenset:
    """Every variable occurring in ``f``, free, bound, or as a binder."""
    out: set[str] = set()
    for g in _walk(f):
        if isinstance(g, PredAtom):
            out.update(g.args)
        elif isinstance(g, _QUANT):
            out.add(g.var)
    return frozenset(out)


def substitutable(f: Formula, v: str, u: str) -> bool:
    """True iff no free ``v`` in ``f`` sits under a quantifier binding ``u``."""
    if isinstance(f, (PropAtom, PredAtom)):
        return True
    if isinstance(f, _QUANT):
        if f.var == v:
            return True  # v is not free below this point
        if f.var == u:
            return v not in free_vars(f.body)
        return substitutable(f.body, v, u)
    return all(substitutable(k, v, u) for k in _children(f))


def _subst(f: Formula, v: str, u: str) -> Formula:
    if isinstance(f, PropAtom):
        return f
    if isinstance(f, PredAtom):
        return PredAtom(f.name, tuple(u if a == v else a for a in f.args))
    if isinstance(f, Neg):
        return Neg(_subst(f.body, v, u))
    if isinstance(f, _BINARY):
        return type(f)(_subst(f.left, v, u), _subst(f.right, v, u))
    if isinstance(f, _QUANT):
        if f.var == v:
            return f
        return type(f)(f.var, _subst(f.body, v, u))
    raise TypeError(f"not a formula: {f!r}")


def substitute(f: Formula, v: str, u: str) -> Formula:
    """Replace every free ``v`` in ``f`` by ``u``."""
    if not substitutable(f, v, u):
        raise SubstitutionError(f"{u} is not substitutable for {v} in {render(f)}")
    return _subst(f, v, u)
