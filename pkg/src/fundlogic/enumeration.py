"""Enumeration of finite lattices and their negation expansions up to isomorphism.

Lattices of size n+1 are grown from lattices of size n: deleting an atom
from a lattice with at least three elements leaves a lattice, so every
(n+1)-element lattice is some n-element lattice with a new atom inserted
below an up-set of non-bottom elements.  Duplicates are removed with a
canonical form.

The canonical form is the lexicographically least relabelled order among
labellings that respect a refined colouring of the elements (colour classes
sorted, bottom first, top last, every labelling a linear extension).
Automorphisms come out of the same search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .algebra import Algebra, Lattice, _bits

__all__ = [
    "canonical_form", "automorphisms", "enumerate_lattices", "enumerate_expansions",
    "count_expansions", "count_expansions_burnside", "census", "census_counts", "CENSUS_ROWS", "CensusRow", "is_isomorphic",
]


# ---------------------------------------------------------------------------
# Canonical forms
# ---------------------------------------------------------------------------

def _colour_classes(up: Sequence[int]) -> list[list[int]]:
    """Partition elements into classes of a stable order-invariant colouring."""
    n = len(up)
    down = [0] * n
    for a in range(n):
        for b in _bits(up[a]):
            down[b] |= 1 << a
    colour = [(bin(down[a]).count("1"), bin(up[a]).count("1")) for a in range(n)]
    while True:
        sig = [
            (colour[a],
             tuple(sorted(colour[b] for b in _bits(up[a]) if b != a)),
             tuple(sorted(colour[b] for b in _bits(down[a]) if b != a)))
            for a in range(n)
        ]
        keys = sorted(set(sig))
        rank = {k: i for i, k in enumerate(keys)}
        new = [(colour[a][0], rank[sig[a]]) for a in range(n)]
        # keep the down-set size as the leading key so labellings stay linear extensions
        if len(set(new)) == len(set(colour)):
            break
        colour = new
    classes: dict = {}
    for a in range(n):
        classes.setdefault(colour[a], []).append(a)
    return [classes[k] for k in sorted(classes)]


def _labellings(classes: list[list[int]]) -> Iterator[list[int]]:
    """All maps old element -> new index that keep classes in order."""
    n = sum(len(c) for c in classes)
    starts = list(itertools.accumulate([0] + [len(c) for c in classes]))[:-1]
    for combo in itertools.product(*(itertools.permutations(c) for c in classes)):
        perm = [0] * n
        for start, block in zip(starts, combo):
            for offset, a in enumerate(block):
                perm[a] = start + offset
        yield perm


def _relabel(up: Sequence[int], perm: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(up)
    for a, mask in enumerate(up):
        m = 0
        for b in _bits(mask):
            m |= 1 << perm[b]
        out[perm[a]] = m
    return tuple(out)


def canonical_form(L: Lattice) -> tuple[int, ...]:
    """Canonical up-mask tuple; isomorphic lattices get equal tuples."""
    return _canonical(L.up)[0]


@lru_cache(maxsize=None)
def _canonical(up: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    classes = _colour_classes(up)
    best = None
    best_perm = None
    for perm in _labellings(classes):
        cand = _relabel(up, perm)
        if best is None or cand < best:
            best, best_perm = cand, tuple(perm)
    return best, best_perm


def automorphisms(L: Lattice) -> list[tuple[int, ...]]:
    """All order automorphisms of ``L`` as permutation tuples."""
    up = L.up
    return [tuple(p) for p in _labellings(_colour_classes(up)) if _relabel(up, p) == up]


def _canonical_lattice(up: tuple[int, ...]) -> Lattice:
    return Lattice(_canonical(up)[0])


# ---------------------------------------------------------------------------
# Lattices
# ---------------------------------------------------------------------------

def _extensions(L: Lattice) -> Iterator[tuple[int, ...]]:
    """Up-mask tuples of lattices obtained by inserting a new atom into L."""
    n = L.n
    z, o = L.bottom, L.top
    others = [a for a in L.elements if a != z]
    for r in range(1, len(others) + 1):
        for combo in itertools.combinations(others, r):
            U = sum(1 << a for a in combo)
            if not (U >> o) & 1:
                continue
            if any(L.up[a] & ~U for a in combo):
                continue  # not an up-set
            # each non-bottom x needs a least element of U above it to be its join with the atom
            ok = True
            for x in others:
                above = U & L.up[x]
                if not any(L.up[c] & above == above for c in _bits(above)):
                    ok = False
                    break
            if not ok:
                continue
            new = n
            up = list(L.up) + [U | (1 << new)]
            up[z] |= 1 << new
            yield tuple(up)


@lru_cache(maxsize=None)
def _lattices(n: int) -> tuple[Lattice, ...]:
    if n <= 0:
        return ()
    if n <= 2:
        return (_canonical_lattice(Lattice.chain(n).up),)
    seen: dict[tuple[int, ...], None] = {}
    for L in _lattices(n - 1):
        for up in _extensions(L):
            seen.setdefault(_canonical(up)[0], None)
    return tuple(Lattice(up) for up in sorted(seen))


def enumerate_lattices(n: int) -> Iterator[Lattice]:
    """One lattice per isomorphism class, in sorted canonical order."""
    yield from _lattices(n)


# ---------------------------------------------------------------------------
# Negation expansions
# ---------------------------------------------------------------------------

_NEEDS_NEG_BOTTOM_TOP = {"proto", "ultraweak", "weak", "ortho"}
_NEEDS_SEMI = {"proto", "weak", "ortho"}


def _negations(L: Lattice, cls: str) -> Iterator[tuple[int, ...]]:
    """All antitone negations on canonical ``L`` belonging to class ``cls``."""
    if cls == "pseudo":
        pc = L.pseudocomplementation
        if pc is not None:
            yield pc
        return
    n, z, o = L.n, L.bottom, L.top
    m, up, down = L.meet_t, L.up, L.down
    # canonical lattices list elements in a linear extension, bottom first
    order = sorted(L.elements, key=lambda a: bin(down[a]).count("1"))
    neg = [-1] * n
    semi = cls in _NEEDS_SEMI
    full = (1 << n) - 1

    def rec(i: int):
        if i == n:
            t = tuple(neg)
            if cls in ("ultraweak", "weak", "ortho") and not all(L.le(a, t[t[a]]) for a in range(n)):
                return
            if cls == "ortho" and not all(t[t[a]] == a and L.join(a, t[a]) == o for a in range(n)):
                return
            yield t
            return
        b = order[i]
        # antitone: neg[b] must lie below neg[a] for every assigned a <= b
        allowed = full
        for a in _bits(down[b]):
            if neg[a] >= 0:
                allowed &= down[neg[a]]
        if b == o:
            allowed &= 1 << z
        if b == z and cls in _NEEDS_NEG_BOTTOM_TOP:
            allowed &= 1 << o
        for c in _bits(allowed):
            if semi and m[b][c] != z:
                continue
            neg[b] = c
            yield from rec(i + 1)
        neg[b] = -1

    yield from rec(0)


def _orbit_min(neg: tuple[int, ...], auts: list[tuple[int, ...]]) -> tuple[int, ...]:
    best = neg
    for p in auts:
        conj = [0] * len(neg)
        for a, v in enumerate(neg):
            conj[p[a]] = p[v]
        c = tuple(conj)
        if c < best:
            best = c
    return best


def enumerate_expansions(n: int, cls: str) -> Iterator[Algebra]:
    """One (lattice, negation) pair per isomorphism class of pairs."""
    if cls not in ("pre", "proto", "ultraweak", "weak", "pseudo", "ortho"):
        raise ValueError(f"unknown negation class {cls!r}")
    for L in _lattices(n):
        auts = automorphisms(L) if cls != "pseudo" else []
        for neg in _negations(L, cls):
            if cls == "pseudo" or _orbit_min(neg, auts) == neg:
                yield Algebra(L, neg)


def count_expansions(n: int, cls: str) -> int:
    return sum(1 for _ in enumerate_expansions(n, cls))


@dataclass(frozen=True)
class CensusRow:
    key: str
    title: str


CENSUS_ROWS = (
    CensusRow("weak", "lattices with weak pseudocomp."),
    CensusRow("lattices", "lattices"),
    CensusRow("pseudo", "pseudocomplemented lattices"),
    CensusRow("distributive", "distributive lattices"),
    CensusRow("ortho", "ortholattices"),
)


def census_counts(n: int) -> dict[str, int]:
    """Counts for one size, one entry per census row."""
    lats = _lattices(n)
    return {
        "weak": count_expansions(n, "weak"),
        "lattices": len(lats),
        "pseudo": sum(1 for L in lats if L.is_pseudocomplemented),
        "distributive": sum(1 for L in lats if L.is_distributive),
        "ortho": count_expansions(n, "ortho"),
    }


def _census_worker(n: int) -> tuple[int, dict[str, int]]:
    return n, census_counts(n)


def census(sizes: Sequence[int], jobs: int = 1) -> dict[int, dict[str, int]]:
    """Census table keyed by size; parallel over sizes when ``jobs > 1``."""
    sizes = list(sizes)
    if jobs > 1 and len(sizes) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(jobs, len(sizes))) as ex:
            results = dict(ex.map(_census_worker, sizes))
    else:
        results = dict(_census_worker(n) for n in sizes)
    return {n: results[n] for n in sizes}


def is_isomorphic(A: Algebra, B: Algebra) -> bool:
    """Brute-force isomorphism test for (lattice, negation) pairs; a test oracle."""
    if A.n != B.n:
        return False
    for perm in itertools.permutations(range(A.n)):
        if A.lattice.permuted(perm).up != B.lattice.up:
            continue
        if A.neg is None or all(perm[A.neg[a]] == B.neg[perm[a]] for a in range(A.n)):
            return True
    return False


def count_expansions_burnside(n: int, cls: str) -> int:
    """Orbit count by Burnside's lemma; an independent check on the census."""
    total = 0
    for L in _lattices(n):
        auts = automorphisms(L)
        negs = list(_negations(L, cls))
        fixed = sum(1 for p in auts for t in negs if all(p[t[a]] == t[p[a]] for a in range(n)))
        if fixed % len(auts):
            raise AssertionError("Burnside sum not divisible by the group order")
        total += fixed // len(auts)
    return total
