"""Syntactic translations and a classical modal/tense evaluator.

* ``g``: orthologic into F (double-negate atoms, rewrite disjunction).
* ``t``: F into tense logic, read over pseudosymmetric reflexive frames.
* ``m``: the ``{&, ~}`` fragment into the modal logic of reflexive
  symmetric frames.

Modal surface syntax extends the formula grammar with the prefix operators
``H P F [] <>``; the letters ``H``, ``P``, ``F`` are reserved and written
with a trailing space (``H F p``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Union

from .frames import Frame, Model, extension, fixpoints, frame_condition, reflexive_frames
from .syntax import (
    RESERVED_ATOM, And, Exists, Forall, Formula, FormulaSyntaxError, Neg, Or, PredAtom, PropAtom,
)

__all__ = [
    "MAtom", "MUnary", "MBinary", "ModalFormula", "TranslationError", "MixedProfileError",
    "TENSE_OPS", "BOX_OPS", "profile", "render_modal", "parse_modal",
    "g_translate", "t_translate", "m_translate", "TRANSLATIONS",
    "modal_extension", "modal_eval", "transfer_failures", "TransferReport", "transfer_sweep",
]

TENSE_OPS = frozenset({"H", "P", "F"})
BOX_OPS = frozenset({"[]", "<>"})
_UNARY = frozenset({"~"}) | TENSE_OPS | BOX_OPS
_BIN = ("&", "|", "->")


class TranslationError(ValueError):
    """The formula lies outside the domain of the translation."""


class MixedProfileError(ValueError):
    """Tense and box operators in one formula."""


@dataclass(frozen=True)
class MAtom:
    name: str

    def __str__(self) -> str:
        return render_modal(self)


@dataclass(frozen=True)
class MUnary:
    op: str
    body: "ModalFormula"

    def __post_init__(self) -> None:
        if self.op not in _UNARY:
            raise ValueError(f"unknown unary operator {self.op!r}")

    def __str__(self) -> str:
        return render_modal(self)


@dataclass(frozen=True)
class MBinary:
    op: str
    left: "ModalFormula"
    right: "ModalFormula"

    def __post_init__(self) -> None:
        if self.op not in _BIN:
            raise ValueError(f"unknown binary operator {self.op!r}")

    def __str__(self) -> str:
        return render_modal(self)


ModalFormula = Union[MAtom, MUnary, MBinary]


def _ops(f: ModalFormula) -> Iterator[str]:
    stack = [f]
    while stack:
        h = stack.pop()
        if isinstance(h, MUnary):
            yield h.op
            stack.append(h.body)
        elif isinstance(h, MBinary):
            stack += [h.left, h.right]


def profile(f: ModalFormula) -> str:
    """``"tense"``, ``"box"`` or ``"plain"``; mixing raises ``MixedProfileError``."""
    ops = set(_ops(f))
    tense, box = bool(ops & TENSE_OPS), bool(ops & BOX_OPS)
    if tense and box:
        raise MixedProfileError("tense and box operators in one formula")
    return "tense" if tense else "box" if box else "plain"


# ---------------------------------------------------------------------------
# Printer and parser
# ---------------------------------------------------------------------------

_PREC = {"->": 1, "|": 2, "&": 3}


def _mprec(f: ModalFormula) -> int:
    return _PREC[f.op] if isinstance(f, MBinary) else 4


def _mwrap(f: ModalFormula, need: int) -> str:
    s = render_modal(f)
    return f"({s})" if _mprec(f) < need else s


def render_modal(f: ModalFormula) -> str:
    if isinstance(f, MAtom):
        return f.name
    if isinstance(f, MUnary):
        sep = " " if f.op in TENSE_OPS else ""
        return f.op + sep + _mwrap(f.body, 4)
    p = _PREC[f.op]
    if f.op == "->":
        return f"{_mwrap(f.left, p + 1)} -> {_mwrap(f.right, p)}"
    return f"{_mwrap(f.left, p)} {f.op} {_mwrap(f.right, p + 1)}"


_TOKEN = re.compile(r"\s*(?:(->|\[\]|<>|[~&|()])|([A-Za-z_][A-Za-z0-9_]*))")


def _mtokens(text: str) -> list[tuple[str, str, int]]:
    out, i = [], 0
    while True:
        while i < len(text) and text[i].isspace():
            i += 1
        if i >= len(text):
            break
        m = _TOKEN.match(text, i)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[i]!r}", len(text[:i].encode()))
        sym, word = m.group(1), m.group(2)
        start = m.start(1) if sym else m.start(2)
        kind = sym if sym else (word if word in TENSE_OPS else "ident")
        out.append((kind, sym or word, len(text[:start].encode())))
        i = m.end()
    out.append(("end", "", len(text.encode())))
    return out


def parse_modal(text: str) -> ModalFormula:
    """Parse the modal surface syntax; mixed tense/box input is rejected."""
    toks = _mtokens(text)
    pos = 0

    def peek() -> str:
        return toks[pos][0]

    def fail(msg: str):
        raise FormulaSyntaxError(msg, toks[pos][2])

    def binary(level: int) -> ModalFormula:
        nonlocal pos
        if level == 1:
            left = binary(2)
            if peek() == "->":
                pos += 1
                return MBinary("->", left, binary(1))
            return left
        op = "|" if level == 2 else "&"
        f = binary(level + 1) if level == 2 else unary()
        while peek() == op:
            pos += 1
            f = MBinary(op, f, binary(level + 1) if level == 2 else unary())
        return f

    def unary() -> ModalFormula:
        nonlocal pos
        kind, text_, _ = toks[pos]
        if kind in _UNARY:
            pos += 1
            return MUnary(kind, unary())
        if kind == "(":
            pos += 1
            f = binary(1)
            if peek() != ")":
                fail("expected ')'")
            pos += 1
            return f
        if kind == "ident":
            pos += 1
            return MAtom(text_)
        fail("expected a formula")

    f = binary(1)
    if peek() != "end":
        fail(f"unexpected {toks[pos][1]!r} after formula")
    try:
        profile(f)
    except MixedProfileError as e:
        raise FormulaSyntaxError(str(e), 0) from None
    return f


# ---------------------------------------------------------------------------
# Translations
# ---------------------------------------------------------------------------

def g_translate(f: Formula) -> Formula:
    """Orthologic into F; quantifiers commute, ``exists`` becomes ``~forall~``."""
    if isinstance(f, (PropAtom, PredAtom)):
        return Neg(Neg(f))
    if isinstance(f, Neg):
        return Neg(g_translate(f.body))
    if isinstance(f, And):
        return And(g_translate(f.left), g_translate(f.right))
    if isinstance(f, Or):
        return Neg(And(Neg(g_translate(f.left)), Neg(g_translate(f.right))))
    if isinstance(f, Forall):
        return Forall(f.var, g_translate(f.body))
    if isinstance(f, Exists):
        return Neg(Forall(f.var, Neg(g_translate(f.body))))
    raise TranslationError(f"g is not defined on {type(f).__name__}")


def _H(a): return MUnary("H", a)
def _F(a): return MUnary("F", a)
def _not(a): return MUnary("~", a)
def _box(a): return MUnary("[]", a)


@dataclass(frozen=True)
class _Rules:
    """A compositional translation: an atom clause plus one clause per connective."""

    name: str
    atom: Callable[[str], ModalFormula]
    clauses: Mapping[type, Callable[..., ModalFormula]]

    def __call__(self, f: Formula) -> ModalFormula:
        if isinstance(f, PropAtom):
            return self.atom(f.name)
        rule = self.clauses.get(type(f))
        if rule is None:
            raise TranslationError(f"{self.name} is not defined on {type(f).__name__}")
        if isinstance(f, Neg):
            return rule(self(f.body))
        return rule(self(f.left), self(f.right))


_T = _Rules("t", lambda p: _H(_F(MAtom(p))), {
    Neg: lambda a: _H(_not(a)),
    And: lambda a, b: MBinary("&", a, b),
    Or: lambda a, b: _H(_F(MBinary("|", a, b))),
})

_M = _Rules("m", MAtom, {
    Neg: lambda a: _box(_not(a)),
    And: lambda a, b: MBinary("&", a, b),
})


def t_translate(f: Formula) -> ModalFormula:
    """F into tense logic: atoms become ``H F p``, negation ``H ~``."""
    return _T(f)


def m_translate(f: Formula) -> ModalFormula:
    """The ``{&, ~}`` fragment into the box language; atoms stay put."""
    return _M(f)


TRANSLATIONS = {"t": _T, "m": _M}


# ---------------------------------------------------------------------------
# Classical evaluation
# ---------------------------------------------------------------------------

def modal_extension(M: Model, f: ModalFormula, mode: str | None = None) -> int:
    """States satisfying ``f`` classically; valuations may be arbitrary sets.

    ``H``/``P`` look at states open to the current one and ``F`` at states
    it is open to.  ``[]``/``<>`` use the symmetric closure of the relation.
    ``mode`` (``"tense"`` or ``"box"``) restricts which operators may occur.
    """
    prof = profile(f)
    if mode not in (None, "tense", "box"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode is not None and prof not in ("plain", mode):
        raise MixedProfileError(f"{prof} operators in a {mode} evaluation")
    F = M.frame
    full = F.full
    sym = [F.rel[x] | F.pred[x] for x in F.states]

    def every(nbrs, A):
        return sum(1 << x for x in F.states if not nbrs[x] & ~A)

    def some(nbrs, A):
        return sum(1 << x for x in F.states if nbrs[x] & A)

    def go(h: ModalFormula) -> int:
        if isinstance(h, MAtom):
            if h.name in M.valuation:
                return M.valuation[h.name]
            if h.name == RESERVED_ATOM:
                return F.absurd_states
            raise KeyError(f"atom {h.name!r} has no value")
        if isinstance(h, MBinary):
            a, b = go(h.left), go(h.right)
            if h.op == "&":
                return a & b
            if h.op == "|":
                return a | b
            return (full & ~a) | b
        A = go(h.body)
        return {
            "~": lambda: full & ~A,
            "H": lambda: every(F.pred, A),
            "P": lambda: some(F.pred, A),
            "F": lambda: some(F.rel, A),
            "[]": lambda: every(sym, A),
            "<>": lambda: some(sym, A),
        }[h.op]()

    return go(f)


def modal_eval(M: Model, x: int, f: ModalFormula, mode: str | None = None) -> bool:
    return bool((modal_extension(M, f, mode) >> x) & 1)


def transfer_failures(M: Model, f: Formula, which: str) -> list[int]:
    """States where ``f`` and its ``t``/``m`` translation disagree."""
    lhs = extension(M, f)
    rhs = modal_extension(M, TRANSLATIONS[which](f))
    return [x for x in M.frame.states if ((lhs ^ rhs) >> x) & 1]


# ---------------------------------------------------------------------------
# Exhaustive transfer sweep
# ---------------------------------------------------------------------------

@dataclass
class TransferReport:
    which: str
    max_states: int
    max_depth: int
    frames: int = 0
    pairs: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"which": self.which, "max_states": self.max_states, "max_depth": self.max_depth,
                "frames": self.frames, "pairs": self.pairs, "failures": self.failures, "ok": self.ok}


def _reachable_pairs(F: Frame, rules: _Rules, max_depth: int) -> set[tuple[int, int]]:
    """Every ``(||phi||, ||tr(phi)||)`` for formulas of depth at most ``max_depth``.

    Atoms range over all fixpoints.  A formula's pair depends only on the
    pairs of its immediate subformulas, so closing the atom pairs under each
    connective, one level per round, reaches every formula and valuation.
    The object side goes through ``frames.extension`` and the modal side
    through ``modal_extension`` applied to the translation's own clauses.
    """
    a, b = PropAtom("a"), PropAtom("b")
    ma, mb = MAtom("a"), MAtom("b")
    objects = {Neg: Neg(a), And: And(a, b), Or: Or(a, b)}
    modals = {kind: rule(ma) if kind is Neg else rule(ma, mb) for kind, rule in rules.clauses.items()}

    def lift(kind, P, Q=None):
        Q = Q or P
        lhs = extension(Model(F, {"a": P[0], "b": Q[0]}, check=False), objects[kind])
        rhs = modal_extension(Model(F, {"a": P[1], "b": Q[1]}, check=False), modals[kind])
        return lhs, rhs

    level = {(A, modal_extension(Model(F, {"p": A}, check=False), rules.atom("p"))) for A in fixpoints(F)}
    seen = set(level)
    for _ in range(max_depth):
        # a formula of the next depth has an immediate subformula of the current one
        new = set()
        for P in level:
            new.add(lift(Neg, P))
            for Q in seen:
                for kind in modals:
                    if kind is not Neg:
                        new |= {lift(kind, P, Q), lift(kind, Q, P)}
        level = new - seen
        if not level:
            break
        seen |= level
    return seen


def transfer_sweep(which: str, max_states: int = 5, max_depth: int = 4,
                   frames: Iterable[Frame] | None = None) -> TransferReport:
    """Check a translation on every pseudosymmetric reflexive frame up to isomorphism.

    Both forcing and classical satisfaction are invariant under relabelling
    states, so one frame per isomorphism class suffices.
    """
    rules = TRANSLATIONS[which]
    report = TransferReport(which, max_states, max_depth)
    if frames is None:
        frames = (F for n in range(1, max_states + 1) for F in reflexive_frames(n)
                  if frame_condition(F, "pseudosymmetric"))
    for F in frames:
        report.frames += 1
        pairs = _reachable_pairs(F, rules, max_depth)
        report.pairs += len(pairs)
        for lhs, rhs in sorted(pairs):
            if lhs != rhs:
                report.failures.append({"frame": F.to_json(), "object": F.members(lhs),
                                        "modal": F.members(rhs)})
    return report
