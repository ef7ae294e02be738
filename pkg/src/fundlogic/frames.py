"""Relational frames, their closure operator, and forcing.

A frame is a finite set of states ``0..n-1`` with a relation ``x <| y``
("x is open to y").  Sets of states are bitmasks.  ``rel[x]`` holds the
states ``x`` is open to and ``pred[x]`` the states open to ``x``.

Diagrams conventionally draw ``y -> x`` for ``x <| y``; the interchange
format stores ``<|`` itself, row-major, so ``rel[x][y] = 1`` iff ``x <| y``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .algebra import Algebra, Lattice, _bits
from .syntax import (
    RESERVED_ATOM, And, Exists, Forall, Formula, Imp, Neg, Or, PredAtom, PropAtom, render,
)

__all__ = [
    "Frame", "Model", "NotAFixpoint", "FRAME_CONDITIONS", "CORRESPONDENCES",
    "closure", "neg", "imp", "cond", "neg_rel", "fixpoints", "naive_fixpoints",
    "is_fixpoint", "fixpoint_lattice", "fixpoint_algebra",
    "pre_refines", "post_refines", "refines", "compossible_with", "absurd",
    "frame_condition", "extension", "force", "correspondence_test",
    "figure_frames", "distributivity_model", "reflexive_frames",
]


class NotAFixpoint(ValueError):
    pass


@dataclass(frozen=True)
class Frame:
    """A finite relational frame; ``rel[x]`` is the bitmask of states ``x`` is open to."""

    rel: tuple[int, ...]
    labels: tuple[str, ...] | None = field(default=None, compare=False)
    pred: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        rel = tuple(self.rel)
        n = len(rel)
        if any(r >> n for r in rel):
            raise ValueError("relation mentions a state outside the frame")
        object.__setattr__(self, "rel", rel)
        pred = [0] * n
        for x in range(n):
            for y in _bits(rel[x]):
                pred[y] |= 1 << x
        object.__setattr__(self, "pred", tuple(pred))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != n:
                raise ValueError("one label per state")

    # construction ---------------------------------------------------------

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]], labels=None,
                   reflexive: bool = False) -> "Frame":
        """``(x, y)`` in ``pairs`` means ``x <| y``."""
        rel = [(1 << x) if reflexive else 0 for x in range(n)]
        for x, y in pairs:
            rel[x] |= 1 << y
        return cls(tuple(rel), labels)

    @classmethod
    def from_edges(cls, labels: Sequence[str], edges: Iterable[str],
                   reflexive: bool = True) -> "Frame":
        """Edges written ``"x<y"`` (x open to y) or ``"x~y"`` (both ways)."""
        idx = {name: i for i, name in enumerate(labels)}
        pairs = []
        for e in edges:
            if "~" in e:
                a, b = e.split("~")
                pairs += [(idx[a], idx[b]), (idx[b], idx[a])]
            else:
                a, b = e.split("<")
                pairs.append((idx[a], idx[b]))
        return cls.from_pairs(len(labels), pairs, labels, reflexive)

    @classmethod
    def from_code(cls, n: int, code: int) -> "Frame":
        """Frame number ``code`` among the ``2**(n*n)`` frames on ``n`` states."""
        mask = (1 << n) - 1
        return cls(tuple((code >> (x * n)) & mask for x in range(n)))

    def to_json(self) -> dict:
        obj = {"size": self.n, "rel": [int(self.opens(x, y)) for x in range(self.n) for y in range(self.n)]}
        if self.labels:
            obj["labels"] = list(self.labels)
        return obj

    @classmethod
    def from_json(cls, obj: Mapping | str) -> "Frame":
        if isinstance(obj, str):
            obj = json.loads(obj)
        n = obj["size"]
        bits = obj["rel"]
        if isinstance(bits, str):
            bits = [int(c) for c in bits if c in "01"]
        if bits and isinstance(bits[0], list):
            bits = [b for row in bits for b in row]
        if len(bits) != n * n:
            raise ValueError("rel must have size*size entries")
        rel = tuple(sum(1 << y for y in range(n) if bits[x * n + y]) for x in range(n))
        return cls(rel, tuple(obj["labels"]) if obj.get("labels") else None)

    # queries --------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.rel)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def states(self) -> range:
        return range(self.n)

    def opens(self, x: int, y: int) -> bool:
        """``x <| y``."""
        return bool((self.rel[x] >> y) & 1)

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def members(self, A: int) -> list[str]:
        return [self.label(x) for x in _bits(A)]

    def mask(self, names: Iterable[str]) -> int:
        idx = {self.label(x): x for x in self.states}
        return sum(1 << idx[s] for s in names)

    @cached_property
    def absurd_states(self) -> int:
        return sum(1 << x for x in self.states if not self.pred[x])

    def symmetric_closure(self) -> "Frame":
        return Frame(tuple(self.rel[x] | self.pred[x] for x in self.states), self.labels)

    def with_edge_toggled(self, x: int, y: int) -> "Frame":
        rel = list(self.rel)
        rel[x] ^= 1 << y
        return Frame(tuple(rel), self.labels)


# ---------------------------------------------------------------------------
# Operations on sets of states
# ---------------------------------------------------------------------------

def _down(F: Frame, A: int) -> int:
    """States open to some member of ``A``."""
    d = 0
    for a in _bits(A):
        d |= F.pred[a]
    return d


def closure(F: Frame, A: int) -> int:
    """``{x | every x' <| x is open to some member of A}``."""
    d = _down(F, A)
    return sum(1 << x for x in F.states if not F.pred[x] & ~d)


def is_fixpoint(F: Frame, A: int) -> bool:
    return closure(F, A) == A


def _check(F: Frame, *sets: int) -> None:
    for A in sets:
        if not is_fixpoint(F, A):
            raise NotAFixpoint(f"{F.members(A)} is not a fixpoint")


def neg(F: Frame, A: int, check: bool = True) -> int:
    """``{x | no member of A is open to x}``."""
    if check:
        _check(F, A)
    return sum(1 << x for x in F.states if not F.pred[x] & A)


def imp(F: Frame, A: int, B: int, check: bool = True) -> int:
    """``{x | every x' <| x in A is open to some member of B}``."""
    if check:
        _check(F, A, B)
    d = _down(F, B)
    return sum(1 << x for x in F.states if not F.pred[x] & A & ~d)


def cond(F: Frame, A: int, B: int, check: bool = True) -> int:
    """The conditional ``A ->> B = A -> (A & B)``."""
    if check:
        _check(F, A, B)
    return imp(F, A, A & B, check=False)


def neg_rel(F: Frame, A: int, fix: int, check: bool = True) -> int:
    """Negation relative to the fixpoint ``fix``: ``A -> fix``."""
    if check:
        _check(F, A, fix)
    return imp(F, A, fix, check=False)


def fixpoints(F: Frame) -> list[int]:
    """All fixpoints by next-closure, in lectic order."""
    n, full = F.n, F.full
    A = closure(F, 0)
    out = [A]
    while A != full:
        for i in reversed(range(n)):
            bit = 1 << i
            if A & bit:
                A &= ~bit
                continue
            B = closure(F, A | bit)
            if not (B & ~A) & (bit - 1):
                A = B
                break
        out.append(A)
    return out


def naive_fixpoints(F: Frame) -> list[int]:
    """Fixpoints by filtering every subset; a test oracle."""
    return [A for A in range(1 << F.n) if closure(F, A) == A]


def fixpoint_lattice(F: Frame) -> tuple[Lattice, list[int]]:
    """The fixpoint lattice ordered by inclusion, plus element -> fixpoint."""
    fixes = sorted(fixpoints(F), key=lambda A: (bin(A).count("1"), A))
    up = tuple(sum(1 << j for j, B in enumerate(fixes) if A & ~B == 0) for A in fixes)
    return Lattice(up), fixes


def fixpoint_algebra(F: Frame, negation: str | None = "neg", implication: str | None = None,
                     fix: int | None = None) -> tuple[Algebra, list[int]]:
    """The fixpoint lattice with frame-induced operations as tables.

    ``negation`` is ``"neg"``, ``"neg_rel"`` (relative to ``fix``) or None;
    ``implication`` is ``"imp"``, ``"cond"`` or None.
    """
    L, fixes = fixpoint_lattice(F)
    index = {A: i for i, A in enumerate(fixes)}
    neg_t = imp_t = None
    if negation == "neg":
        neg_t = tuple(index[neg(F, A, check=False)] for A in fixes)
    elif negation == "neg_rel":
        neg_t = tuple(index[neg_rel(F, A, fix, check=False)] for A in fixes)
    if implication is not None:
        op = imp if implication == "imp" else cond
        imp_t = tuple(tuple(index[op(F, A, B, check=False)] for B in fixes) for A in fixes)
    return Algebra(L, neg_t, imp_t), fixes


# ---------------------------------------------------------------------------
# Refinement and frame conditions
# ---------------------------------------------------------------------------

def pre_refines(F: Frame, x: int, y: int) -> bool:
    """Every state open to ``x`` is open to ``y``."""
    return not F.pred[x] & ~F.pred[y]


def post_refines(F: Frame, x: int, y: int) -> bool:
    """Every state ``x`` is open to, ``y`` is open to."""
    return not F.rel[x] & ~F.rel[y]


def refines(F: Frame, x: int, y: int) -> bool:
    return pre_refines(F, x, y) and post_refines(F, x, y)


def absurd(F: Frame, x: int) -> bool:
    return not F.pred[x]


def compossible_with(F: Frame, x: int, y: int) -> bool:
    """Some non-absurd state refines ``x`` and pre-refines ``y``."""
    return any(not absurd(F, w) and refines(F, w, x) and pre_refines(F, w, y) for w in F.states)


def _edges(F: Frame) -> Iterator[tuple[int, int]]:
    """Pairs ``(x, y)`` with ``y <| x``."""
    for x in F.states:
        for y in _bits(F.pred[x]):
            yield x, y


def _pre(F, z, x):
    return not F.pred[z] & ~F.pred[x]


def _post(F, z, y):
    return not F.rel[z] & ~F.rel[y]


def _reflexive(F):
    return all(F.opens(x, x) for x in F.states)


def _symmetric(F):
    return F.rel == F.pred


def _corr1b(F):
    return all(any(_pre(F, z, x) for z in _bits(F.pred[x])) for x in F.states if F.pred[x])


def _pseudosymmetric(F):
    return all(any(_pre(F, z, x) for z in _bits(F.pred[y])) for x, y in _edges(F))


def _strongly_pseudosymmetric(F):
    return all(any(_pre(F, z, x) and _pre(F, x, z) for z in _bits(F.pred[y])) for x, y in _edges(F))


def _weakly_compossible(F):
    return all(any(F.pred[z] and _pre(F, z, y) and _pre(F, z, x) for z in F.states)
               for x, y in _edges(F))


def _compossible(F):
    return all(compossible_with(F, x, y) for x in F.states for y in _bits(F.rel[x]))


def _corr4b(F):
    return all(any(not F.pred[y2] & ~F.rel[y] for y2 in _bits(F.pred[x])) for x, y in _edges(F))


def _imp_corr0b(F):
    return all(any(_pre(F, z, y) for z in _bits(F.rel[y])) for _, y in _edges(F))


def _right_pre_interpolation(F):
    return all(any(_post(F, z, y) and _pre(F, z, x) for z in _bits(F.pred[x])) for x, y in _edges(F))


def _left_pre_interpolation(F):
    return all(any(_post(F, z, y) and _pre(F, z, x) for z in _bits(F.pred[y])) for x, y in _edges(F))


def _left_post_extendability(F):
    return all(any(_pre(F, z, y) and _pre(F, z, x) for z in _bits(F.rel[y])) for x, y in _edges(F))


FRAME_CONDITIONS: dict[str, Callable[[Frame], bool]] = {
    "reflexive": _reflexive,
    "symmetric": _symmetric,
    "corr1b": _corr1b,
    "pseudosymmetric": _pseudosymmetric,
    "strongly_pseudosymmetric": _strongly_pseudosymmetric,
    "weakly_compossible": _weakly_compossible,
    "compossible": _compossible,
    "corr4b": _corr4b,
    "imp_corr0b": _imp_corr0b,
    "right_pre_interpolation": _right_pre_interpolation,
    "left_pre_interpolation": _left_pre_interpolation,
    "left_post_extendability": _left_post_extendability,
}


def frame_condition(F: Frame, which: str) -> bool:
    try:
        return FRAME_CONDITIONS[which](F)
    except KeyError:
        raise ValueError(f"unknown frame condition {which!r}") from None


# ---------------------------------------------------------------------------
# Algebraic properties of the fixpoints, paired with frame conditions
# ---------------------------------------------------------------------------

def _ops(F: Frame, fixes: list[int]):
    zero = closure(F, 0)
    negs = {A: neg(F, A, check=False) for A in fixes}
    imps = {(A, B): imp(F, A, B, check=False) for A in fixes for B in fixes}
    return zero, negs, imps


def _a_corr1(F, fixes, zero, negs, imps):
    return all(A & negs[A] == zero for A in fixes)


def _a_corr2(F, fixes, zero, negs, imps):
    return all(not A & ~negs[negs[A]] for A in fixes)


def _a_corr3(F, fixes, zero, negs, imps):
    return all(A & B != zero or not A & ~negs[B] for A in fixes for B in fixes)


def _a_corr4(F, fixes, zero, negs, imps):
    return all(not negs[negs[A]] & ~A for A in fixes)


def _a_imp1(F, fixes, zero, negs, imps):
    return all(imps[B, B] == F.full for B in fixes)


def _a_imp2(F, fixes, zero, negs, imps):
    return all(not A & imps[A, B] & ~B for A in fixes for B in fixes)


def _a_imp3(F, fixes, zero, negs, imps):
    return all(not A & ~imps[imps[A, B], B] for A in fixes for B in fixes)


def _a_imp4(F, fixes, zero, negs, imps):
    return all(A & C & ~B or not A & ~imps[C, B] for A in fixes for B in fixes for C in fixes)


@dataclass(frozen=True)
class Correspondence:
    key: str
    condition: str
    property: str
    check: Callable


CORRESPONDENCES: dict[str, Correspondence] = {c.key: c for c in (
    Correspondence("corr1", "corr1b", "A & ~A = 0", _a_corr1),
    Correspondence("corr2", "pseudosymmetric", "A <= ~~A", _a_corr2),
    Correspondence("corr3", "weakly_compossible", "A & B = 0 implies A <= ~B", _a_corr3),
    Correspondence("corr4", "corr4b", "~~A <= A", _a_corr4),
    Correspondence("imp1", "imp_corr0b", "B -> B = X", _a_imp1),
    Correspondence("imp2", "right_pre_interpolation", "A & (A -> B) <= B", _a_imp2),
    Correspondence("imp3", "left_pre_interpolation", "A <= (A -> B) -> B", _a_imp3),
    Correspondence("imp4", "left_post_extendability", "A & C <= B implies A <= C -> B", _a_imp4),
)}


def _sweep_chunk(args: tuple[int, int, int, tuple[str, ...]]) -> dict[str, tuple[int, int, list[int]]]:
    n, start, stop, keys = args
    stats = {k: [0, 0, []] for k in keys}  # frames where (b) holds, violations, sample codes
    for code in range(start, stop):
        F = Frame.from_code(n, code)
        fixes = fixpoints(F)
        ops = _ops(F, fixes)
        for k in keys:
            c = CORRESPONDENCES[k]
            b = FRAME_CONDITIONS[c.condition](F)
            a = c.check(F, fixes, *ops)
            s = stats[k]
            s[0] += b
            if a != b:
                s[1] += 1
                if len(s[2]) < 5:
                    s[2].append(code)
    return {k: (v[0], v[1], v[2]) for k, v in stats.items()}


@dataclass
class CorrespondenceReport:
    key: str
    condition: str
    property: str
    frames: int = 0
    holding: int = 0
    violations: int = 0
    examples: list[tuple[int, int]] = field(default_factory=list)  # (size, code)

    @property
    def ok(self) -> bool:
        return self.violations == 0


def correspondence_test(which: str | Sequence[str] = "all", max_size: int = 4,
                        jobs: int = 1, chunk: int = 4096) -> dict[str, CorrespondenceReport]:
    """Compare each frame condition with its fixpoint property on every frame up to ``max_size``."""
    keys = tuple(CORRESPONDENCES) if which == "all" else (which,) if isinstance(which, str) else tuple(which)
    for k in keys:
        if k not in CORRESPONDENCES:
            raise ValueError(f"unknown correspondence {k!r}")
    reports = {k: CorrespondenceReport(k, CORRESPONDENCES[k].condition, CORRESPONDENCES[k].property)
               for k in keys}
    tasks = []
    for n in range(1, max_size + 1):
        total = 1 << (n * n)
        tasks += [(n, s, min(s + chunk, total), keys) for s in range(0, total, chunk)]
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_sweep_chunk, tasks))
    else:
        results = [_sweep_chunk(t) for t in tasks]
    # aggregate in task order so output does not depend on scheduling
    for (n, start, stop, _), res in zip(tasks, results):
        for k, (holding, bad, codes) in res.items():
            r = reports[k]
            r.frames += stop - start
            r.holding += holding
            r.violations += bad
            r.examples += [(n, c) for c in codes][: max(0, 5 - len(r.examples))]
    return reports


# ---------------------------------------------------------------------------
# Models and forcing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Model:
    """A frame with fixpoint values for atoms and, optionally, predicates over a finite domain."""

    frame: Frame
    valuation: Mapping[str, int] = field(default_factory=dict)
    domain: int = 0
    predicates: Mapping[tuple[str, tuple[int, ...]], int] = field(default_factory=dict)
    check: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "valuation", dict(self.valuation))
        object.__setattr__(self, "predicates", {(k[0], tuple(k[1])): v for k, v in self.predicates.items()})
        if self.check:
            for name, A in self.valuation.items():
                if not is_fixpoint(self.frame, A):
                    raise NotAFixpoint(f"value of {name} is not a fixpoint")
            for key, A in self.predicates.items():
                if not is_fixpoint(self.frame, A):
                    raise NotAFixpoint(f"value of {key[0]}{key[1]} is not a fixpoint")

    def to_json(self) -> dict:
        obj = self.frame.to_json()
        obj["valuation"] = {k: self.frame.members(v) for k, v in sorted(self.valuation.items())}
        return obj

    @classmethod
    def from_json(cls, obj: Mapping | str) -> "Model":
        if isinstance(obj, str):
            obj = json.loads(obj)
        F = Frame.from_json(obj)
        val = {}
        for name, v in obj.get("valuation", {}).items():
            val[name] = v if isinstance(v, int) else F.mask(str(s) for s in v)
        return cls(F, val)


class UninterpretedError(KeyError):
    pass


def extension(M: Model, f: Formula, g: Mapping[str, int] | None = None, arrow: str = "cond") -> int:
    """The set of states forcing ``f`` under assignment ``g``.

    ``arrow`` selects the reading of ``->``: ``"cond"`` for ``A ->> B`` or
    ``"imp"`` for ``A -> B``.  The reserved atom defaults to the absurd
    states, which makes ``bot`` denote the least fixpoint.
    """
    F = M.frame
    g = dict(g or {})

    def go(h, g):
        if isinstance(h, PropAtom):
            if h.name in M.valuation:
                return M.valuation[h.name]
            if h.name == RESERVED_ATOM:
                return F.absurd_states
            raise UninterpretedError(f"atom {h.name!r} has no value")
        if isinstance(h, PredAtom):
            try:
                key = (h.name, tuple(g[v] for v in h.args))
            except KeyError as e:
                raise UninterpretedError(f"variable {e.args[0]!r} is unassigned") from None
            if key not in M.predicates:
                raise UninterpretedError(f"{h.name}{key[1]} has no value")
            return M.predicates[key]
        if isinstance(h, Neg):
            return neg(F, go(h.body, g), check=False)
        if isinstance(h, And):
            return go(h.left, g) & go(h.right, g)
        if isinstance(h, Or):
            return closure(F, go(h.left, g) | go(h.right, g))
        if isinstance(h, Imp):
            op = cond if arrow == "cond" else imp
            return op(F, go(h.left, g), go(h.right, g), check=False)
        if isinstance(h, (Forall, Exists)):
            if M.domain <= 0:
                raise UninterpretedError("quantifier over an empty domain")
            parts = [go(h.body, {**g, h.var: d}) for d in range(M.domain)]
            if isinstance(h, Forall):
                out = F.full
                for A in parts:
                    out &= A
                return out
            out = 0
            for A in parts:
                out |= A
            return closure(F, out)
        raise TypeError(f"not a formula: {h!r}")

    return go(f, g)


def force(M: Model, x: int, f: Formula, g: Mapping[str, int] | None = None, arrow: str = "cond") -> bool:
    return bool((extension(M, f, g, arrow) >> x) & 1)


# ---------------------------------------------------------------------------
# Enumeration up to isomorphism
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _reflexive_codes(n: int) -> tuple[int, ...]:
    """Least code in each relabelling class of reflexive frames on ``n`` states.

    A code packs the off-diagonal edges into bits; every relabelling is
    applied to all codes at once and the running minimum is kept.
    """
    off = [(x, y) for x in range(n) for y in range(n) if x != y]
    pos = {e: i for i, e in enumerate(off)}
    codes = np.arange(1 << len(off), dtype=np.uint32)
    best = codes.copy()
    for p in itertools.permutations(range(n)):
        out = np.zeros_like(codes)
        for i, (x, y) in enumerate(off):
            out |= ((codes >> np.uint32(i)) & np.uint32(1)) << np.uint32(pos[p[x], p[y]])
        np.minimum(best, out, out=best)
    return tuple(int(c) for c in np.unique(best))


def reflexive_frames(n: int) -> list[Frame]:
    """One reflexive frame on ``n`` states per isomorphism class."""
    off = [(x, y) for x in range(n) for y in range(n) if x != y]
    return [Frame.from_pairs(n, [off[i] for i in range(len(off)) if (c >> i) & 1], reflexive=True)
            for c in _reflexive_codes(n)]


# ---------------------------------------------------------------------------
# Frames from the figures (reflexive loops added explicitly)
# ---------------------------------------------------------------------------

def figure_frames() -> dict[str, Frame]:
    """The worked example frames; fixpoint lattices N5 (first three) and O6 (last two)."""
    return {
        "n5-left": Frame.from_edges("xyzw", ["x~y", "z<y", "y~w", "z~w"]),
        "n5-middle": Frame.from_edges("xyzw", ["x~y", "y<z", "y~w", "z~w"]),
        "n5-right": Frame.from_edges("xyz", ["y<x", "z<y"]),
        "o6-left": Frame.from_edges("xyzw", ["x~y", "y~w", "w~z"]),
        "o6-right": Frame.from_edges(
            "xyzwuv",
            ["x~y", "y~v", "v~u", "x~u", "z~w", "u~w", "v~z", "y~u", "v~w", "x<v", "z<u"]),
    }


def distributivity_model() -> Model:
    """The model refuting ``p & (q | r) |- (p & q) | (p & r)`` on the middle N5 frame."""
    F = figure_frames()["n5-middle"]
    return Model(F, {"p": F.mask("xy"), "q": F.mask("x"), "r": F.mask("wz")})
