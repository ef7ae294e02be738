"""From finite lattices with operations to relational frames.

Pair frames take a set ``P`` of element pairs with ``(a, b) <| (c, d)`` iff
``c`` is not below ``b``, and send ``a`` to ``{(x, y) in P | x <= a}``.
Filter-ideal frames take disjoint filter/ideal pairs that respect the
operation and send ``a`` to the states whose filter contains it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .algebra import Algebra, Lattice, _bits, classify_implication, classify_negation
from .frames import Frame, closure, cond, fixpoints, imp, is_fixpoint, neg, neg_rel

__all__ = [
    "Representation", "RepresentationError", "EmbeddingReport",
    "pair_frame", "is_separating", "frame_from_negation", "frame_from_antitone",
    "frame_from_preconditional", "two_relation", "frame_from_preimplication",
    "filter_ideal", "verify_embedding", "verify_iso", "dense_sets",
]


class RepresentationError(ValueError):
    pass


@dataclass(frozen=True)
class Representation:
    """A frame, the image of each lattice element, and the operations to preserve.

    ``neg_op`` is one of ``"neg"``, ``"neg_rel"`` (relative to ``fix``) or
    ``"neg_black"`` (``neg`` computed on ``black``); ``imp_op`` is ``"imp"``
    or ``"cond"``.
    """

    lattice: Lattice
    frame: Frame
    images: tuple[int, ...]
    states: tuple = ()
    neg: tuple[int, ...] | None = None
    imp: tuple[tuple[int, ...], ...] | None = None
    neg_op: str | None = None
    imp_op: str | None = None
    fix: int | None = None
    black: Frame | None = None

    def embed(self, a: int) -> int:
        return self.images[a]

    def to_json(self) -> dict:
        return {
            "frame": self.frame.to_json(),
            "embedding": {self.lattice.label(a): self.frame.members(m) for a, m in enumerate(self.images)},
        }


# ---------------------------------------------------------------------------
# Pair frames
# ---------------------------------------------------------------------------

def _pair_label(L: Lattice, p: tuple[int, int]) -> str:
    return f"({L.label(p[0])},{L.label(p[1])})"


def pair_frame(L: Lattice, pairs: Iterable[tuple[int, int]]) -> tuple[Frame, tuple[tuple[int, int], ...], tuple[int, ...]]:
    """The frame on a set of pairs and the map ``a -> {(x, y) | x <= a}``."""
    P = tuple(sorted(set(pairs)))
    rel = tuple(sum(1 << j for j, (c, d) in enumerate(P) if not L.le(c, b)) for (a, b) in P)
    frame = Frame(rel, tuple(_pair_label(L, p) for p in P))
    images = tuple(sum(1 << i for i, (x, _) in enumerate(P) if L.le(x, a)) for a in L.elements)
    return frame, P, images


def is_separating(L: Lattice, pairs: Sequence[tuple[int, int]]) -> bool:
    """Both separation clauses, checked literally."""
    P = list(pairs)
    opens = lambda p, q: not L.le(q[0], p[1])  # noqa: E731  p <| q
    for a in L.elements:
        for b in L.elements:
            if not L.le(a, b) and not any(L.le(c, a) and not L.le(c, b) for c, _ in P):
                return False
    for b in L.elements:
        for q in P:
            if L.le(q[0], b):
                continue
            if not any(opens(p, q) and all(not L.le(r[0], b) for r in P if opens(p, r)) for p in P):
                return False
    return True


def dense_sets(L: Lattice, dense: str = "all") -> tuple[list[int], list[int]]:
    """``V`` and ``Lambda``: every element, or the irreducibles."""
    if dense == "all":
        return list(L.elements), list(L.elements)
    if dense == "irreducible":
        return L.join_irreducibles(), L.meet_irreducibles()
    raise ValueError(f"unknown density option {dense!r}")


def _check_dense(L: Lattice, V, Lam) -> None:
    if not L.is_join_dense(V):
        raise RepresentationError("V is not join-dense")
    if not L.is_meet_dense(Lam):
        raise RepresentationError("Lambda is not meet-dense")


_NEG_PARTS = {"pre": 1, "proto": 2, "ultraweak": 3, "weak": 4}


def frame_from_negation(L: Lattice, negation: Sequence[int], cls: str = "weak",
                        V: Iterable[int] | None = None, Lam: Iterable[int] | None = None) -> Representation:
    """Pair frame for a pre-, proto-, ultraweak or weak negation."""
    if cls not in _NEG_PARTS:
        raise RepresentationError(f"unknown negation class {cls!r}")
    negation = tuple(negation)
    if cls not in classify_negation(L, negation):
        raise RepresentationError(f"negation is not of class {cls}")
    V = list(L.elements) if V is None else list(V)
    Lam = list(L.elements) if Lam is None else list(Lam)
    _check_dense(L, V, Lam)
    z, o = L.bottom, L.top
    if cls == "pre":
        P = [(a, negation[a]) for a in L.elements] + [(o, b) for b in Lam]
    elif cls == "proto":
        P = [(a, negation[a]) for a in L.elements if a != z] + [(o, b) for b in Lam if b != o]
    elif cls == "ultraweak":
        P = [(a, negation[a]) for a in V] + [(o, b) for b in Lam]
    else:
        P = [(a, negation[a]) for a in V if a != z] + [(o, b) for b in Lam if b != o]
    frame, states, images = pair_frame(L, P)
    return Representation(L, frame, images, states, neg=negation, neg_op="neg")


def frame_from_antitone(L: Lattice, negation: Sequence[int], Lam: Iterable[int] | None = None) -> Representation:
    """Pair frame for any antitone negation, read as negation relative to a fixpoint."""
    negation = tuple(negation)
    if not all(L.le(negation[b], negation[a]) for a in L.elements for b in L.elements if L.le(a, b)):
        raise RepresentationError("negation is not antitone")
    Lam = list(L.elements) if Lam is None else list(Lam)
    _check_dense(L, L.elements, Lam)
    o = L.top
    P = [(a, negation[a]) for a in L.elements] + [(o, b) for b in Lam]
    frame, states, images = pair_frame(L, P)
    seed = states.index((negation[o], negation[negation[o]]))
    fix = closure(frame, 1 << seed)
    return Representation(L, frame, images, states, neg=negation, neg_op="neg_rel", fix=fix)


def frame_from_preconditional(L: Lattice, implication) -> Representation:
    """Pair frame ``{(x, x -> y)}`` for a preconditional, read with the conditional."""
    implication = tuple(tuple(r) for r in implication)
    if "preconditional" not in classify_implication(L, implication):
        raise RepresentationError("operation is not a preconditional")
    P = [(x, implication[x][y]) for x in L.elements for y in L.elements]
    frame, states, images = pair_frame(L, P)
    return Representation(L, frame, images, states, imp=implication, imp_op="cond")


def two_relation(L: Lattice, implication, negation: Sequence[int]) -> Representation:
    """The preconditional frame plus a second relation interpreting an antitone negation."""
    rep = frame_from_preconditional(L, implication)
    negation = tuple(negation)
    z = L.bottom
    if not all(L.le(negation[b], negation[a]) for a in L.elements for b in L.elements if L.le(a, b)):
        raise RepresentationError("negation is not antitone")
    if not all(L.le(rep.imp[a][z], negation[a]) for a in L.elements):
        raise RepresentationError("need a -> 0 <= ~a")
    P = rep.states
    black = []
    for i, (x1, _) in enumerate(P):
        row = 0
        for j, (x, _) in enumerate(P):
            # (x1, .) black-opens (x, .) iff it opens it and x <= ~a implies x1 not <= a
            if rep.frame.opens(i, j) and all(not L.le(x1, a) for a in L.elements if L.le(x, negation[a])):
                row |= 1 << j
        black.append(row)
    black_frame = Frame(tuple(black), rep.frame.labels)
    return Representation(L, rep.frame, rep.images, P, neg=negation, imp=rep.imp,
                          neg_op="neg_black", imp_op="cond", black=black_frame)


_IMP_CLASSES = {
    1: "preimplication", 2: "protoimplication", 3: "ultraweak-pseudoimplication",
    4: "weak-pseudoimplication", 5: "relative-pseudocomplementation",
}


def frame_from_preimplication(L: Lattice, implication, part: int = 1,
                              V: Iterable[int] | None = None, Lam: Iterable[int] | None = None) -> Representation:
    """Pair frame for a preimplication and its stronger classes, read with ``->``."""
    if part not in _IMP_CLASSES:
        raise RepresentationError("part must be 1..5")
    implication = tuple(tuple(r) for r in implication)
    if _IMP_CLASSES[part] not in classify_implication(L, implication):
        raise RepresentationError(f"operation is not a {_IMP_CLASSES[part]}")
    V = list(L.elements) if V is None else list(V)
    Lam = list(L.elements) if Lam is None else list(Lam)
    _check_dense(L, V, Lam)
    r, o, le = L.elements, L.top, L.le
    i = implication
    if part == 1:
        P = [(a, i[a][b]) for a in r for b in r]
    elif part == 2:
        P = [(a, i[a][b]) for a in r for b in r if not le(a, b)]
    elif part == 3:
        P = [(a, i[a][b]) for a in V for b in r] + [(o, i[o][b]) for b in Lam]
    elif part == 4:
        P = [(a, i[a][b]) for a in V for b in r if not le(a, b)]
    else:
        P = [(a, i[a][b]) for a in V for b in Lam if not le(a, b)]
    frame, states, images = pair_frame(L, P)
    return Representation(L, frame, images, states, imp=implication, imp_op="imp")


# ---------------------------------------------------------------------------
# Filter-ideal frames
# ---------------------------------------------------------------------------

def filter_ideal(L: Lattice, negation: Sequence[int] | None = None, implication=None,
                 disjoint: bool | None = None) -> Representation:
    """Filter-ideal frame for a protocomplementation or a preimplication.

    With a negation, states are disjoint pairs with ``~a`` in ``I`` for every
    ``a`` in ``F``.  With an implication, ``a`` in ``F`` and ``b`` in ``I``
    force ``a -> b`` into ``I``; disjointness is optional there.
    """
    if (negation is None) == (implication is None):
        raise RepresentationError("give exactly one of a negation or an implication")
    filters, ideals = L.filters(), L.ideals()
    states = []
    if negation is not None:
        negation = tuple(negation)
        if "proto" not in classify_negation(L, negation):
            raise RepresentationError("negation is not a protocomplementation")
        disjoint = True if disjoint is None else disjoint
        for F in filters:
            img = 0
            for a in _bits(F):
                img |= 1 << negation[a]
            for I in ideals:
                if (not disjoint or not F & I) and not img & ~I:
                    states.append((F, I))
    else:
        implication = tuple(tuple(r) for r in implication)
        if "preimplication" not in classify_implication(L, implication):
            raise RepresentationError("operation is not a preimplication")
        disjoint = False if disjoint is None else disjoint
        for F in filters:
            for I in ideals:
                if disjoint and F & I:
                    continue
                if all((I >> implication[a][b]) & 1 for a in _bits(F) for b in _bits(I)):
                    states.append((F, I))
    rel = tuple(sum(1 << j for j, (F2, _) in enumerate(states) if not I & F2) for (_, I) in states)
    labels = tuple(
        "{" + ",".join(L.label(a) for a in _bits(F)) + "|" + ",".join(L.label(a) for a in _bits(I)) + "}"
        for F, I in states)
    frame = Frame(rel, labels)
    images = tuple(sum(1 << k for k, (F, _) in enumerate(states) if (F >> a) & 1) for a in L.elements)
    if negation is not None:
        return Representation(L, frame, images, tuple(states), neg=negation, neg_op="neg")
    return Representation(L, frame, images, tuple(states), imp=implication, imp_op="imp")


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass
class EmbeddingReport:
    failures: list[str] = field(default_factory=list)
    iso_checked: bool = False

    @property
    def ok(self) -> bool:
        return not self.failures

    def __str__(self) -> str:
        if self.ok:
            return "isomorphism" if self.iso_checked else "embedding"
        return "; ".join(self.failures)


def _frame_neg(rep: Representation, A: int) -> int:
    if rep.neg_op == "neg":
        return neg(rep.frame, A, check=False)
    if rep.neg_op == "neg_rel":
        return neg_rel(rep.frame, A, rep.fix, check=False)
    if rep.neg_op == "neg_black":
        return neg(rep.black, A, check=False)
    raise ValueError(f"unknown negation reading {rep.neg_op!r}")


def _frame_imp(rep: Representation, A: int, B: int) -> int:
    op = imp if rep.imp_op == "imp" else cond
    return op(rep.frame, A, B, check=False)


def verify_embedding(rep: Representation, limit: int = 10) -> EmbeddingReport:
    """Check that the element map is injective and preserves bounds, meets, joins and the operations."""
    L, F, f = rep.lattice, rep.frame, rep.images
    out = EmbeddingReport()
    fail = out.failures

    def note(msg: str) -> None:
        if len(fail) < limit:
            fail.append(msg)

    lab = L.label
    for a in L.elements:
        if not is_fixpoint(F, f[a]):
            note(f"f({lab(a)}) is not a fixpoint")
    if len(set(f)) != L.n:
        note("f is not injective")
    if f[L.top] != F.full:
        note("f(1) is not the whole frame")
    if f[L.bottom] != closure(F, 0):
        note("f(0) is not the least fixpoint")
    for a in L.elements:
        for b in L.elements:
            if f[L.meet(a, b)] != f[a] & f[b]:
                note(f"meet of {lab(a)},{lab(b)} not preserved")
            if f[L.join(a, b)] != closure(F, f[a] | f[b]):
                note(f"join of {lab(a)},{lab(b)} not preserved")
            if rep.imp is not None and f[rep.imp[a][b]] != _frame_imp(rep, f[a], f[b]):
                note(f"{lab(a)} -> {lab(b)} not preserved")
        if rep.neg is not None and f[rep.neg[a]] != _frame_neg(rep, f[a]):
            note(f"~{lab(a)} not preserved")
    return out


def verify_iso(rep: Representation, limit: int = 10) -> EmbeddingReport:
    """``verify_embedding`` plus surjectivity onto the fixpoints."""
    out = verify_embedding(rep, limit)
    out.iso_checked = True
    extra = set(fixpoints(rep.frame)) - set(rep.images)
    if extra:
        out.failures.append(f"{len(extra)} fixpoints are not images")
    return out


def algebra_of(rep: Representation) -> Algebra:
    return Algebra(rep.lattice, rep.neg, rep.imp)
