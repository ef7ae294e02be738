"""Finite bounded lattices with negation and implication operations.

Elements are the integers ``0..n-1``.  The order is stored as bitmasks:
``up[a]`` has bit ``b`` set iff ``a <= b``.  Meets and joins are tabulated
once at construction time.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .syntax import And, Formula, Imp, Neg, Or, PropAtom, atoms, is_propositional, render

__all__ = [
    "Lattice", "Algebra", "NotALattice", "ValuationError",
    "NEGATION_CLASSES", "IMPLICATION_CLASSES",
    "classify_negation", "classify_implication", "negation_properties",
    "evaluate", "holds", "find_violation", "valuations",
    "heyting_implication", "default_preconditional", "default_preimplication",
    "material_implication", "ortho_implication", "conditional_from_negation",
    "trivial_negation",
]

NEGATION_CLASSES = ("pre", "proto", "ultraweak", "weak", "pseudo", "ortho")
IMPLICATION_CLASSES = (
    "preconditional", "preimplication", "protoimplication",
    "ultraweak-pseudoimplication", "weak-pseudoimplication", "relative-pseudocomplementation",
)


class NotALattice(ValueError):
    pass


class ValuationError(KeyError):
    pass


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Lattice:
    """A finite bounded lattice given by its order relation."""

    up: tuple[int, ...]
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        up = tuple(self.up)
        object.__setattr__(self, "up", up)
        n = len(up)
        if n == 0:
            raise NotALattice("a lattice needs at least one element")
        full = (1 << n) - 1
        down = [0] * n
        for a in range(n):
            if not (up[a] >> a) & 1:
                raise NotALattice(f"order is not reflexive at {a}")
            if up[a] & ~full:
                raise NotALattice("order mentions elements outside the carrier")
            for b in _bits(up[a]):
                down[b] |= 1 << a
        for a in range(n):
            for b in _bits(up[a]):
                if b != a and (up[b] >> a) & 1:
                    raise NotALattice(f"order is not antisymmetric at {a}, {b}")
                if up[b] & ~up[a]:
                    raise NotALattice(f"order is not transitive at {a} <= {b}")
        down_t = tuple(down)
        # the greatest element of a down-closed set S is the c with down[c] == S
        by_down = {d: c for c, d in enumerate(down_t)}
        by_up = {u: c for c, u in enumerate(up)}
        meet = [[0] * n for _ in range(n)]
        join = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                lo = down_t[a] & down_t[b]
                # greatest lower bound: lower bound whose down-set covers all lower bounds
                m = next((c for c in _bits(lo) if down_t[c] == lo), None)
                hi = up[a] & up[b]
                j = next((c for c in _bits(hi) if up[c] == hi), None)
                if m is None or j is None:
                    raise NotALattice(f"{a} and {b} lack a meet or a join")
                meet[a][b] = meet[b][a] = m
                join[a][b] = join[b][a] = j
        bottom = by_up.get(full)
        top = by_down.get(full)
        if bottom is None or top is None:
            raise NotALattice("lattice is not bounded")
        object.__setattr__(self, "down", down_t)
        object.__setattr__(self, "meet_t", tuple(map(tuple, meet)))
        object.__setattr__(self, "join_t", tuple(map(tuple, join)))
        object.__setattr__(self, "bottom", bottom)
        object.__setattr__(self, "top", top)

    # construction helpers -------------------------------------------------

    @classmethod
    def from_leq(cls, leq: Sequence[Sequence[bool]], labels=None) -> "Lattice":
        return cls(tuple(sum(1 << b for b, v in enumerate(row) if v) for row in leq), labels)

    @classmethod
    def from_covers(cls, n: int, covers: Iterable[tuple[int, int]], labels=None) -> "Lattice":
        """Lattice from its Hasse diagram; ``(a, b)`` means a is covered by b."""
        up = [1 << a for a in range(n)]
        changed = True
        edges = list(covers)
        while changed:
            changed = False
            for a, b in edges:
                new = up[a] | up[b]
                if new != up[a]:
                    up[a] = new
                    changed = True
        return cls(tuple(up), labels)

    @classmethod
    def chain(cls, n: int) -> "Lattice":
        return cls.from_covers(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def boolean(cls, k: int) -> "Lattice":
        """Power set of a k-element set; element i is the subset with bitmask i."""
        n = 1 << k
        return cls(tuple(sum(1 << b for b in range(n) if a & b == a) for a in range(n)))

    # basic queries ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.up)

    def __len__(self) -> int:
        return len(self.up)

    @property
    def elements(self) -> range:
        return range(len(self.up))

    def le(self, a: int, b: int) -> bool:
        return bool((self.up[a] >> b) & 1)

    @property
    def leq(self) -> tuple[tuple[bool, ...], ...]:
        return tuple(tuple(self.le(a, b) for b in self.elements) for a in self.elements)

    def meet(self, a: int, b: int) -> int:
        return self.meet_t[a][b]

    def join(self, a: int, b: int) -> int:
        return self.join_t[a][b]

    def meet_all(self, xs: Iterable[int]) -> int:
        r = self.top
        for x in xs:
            r = self.meet_t[r][x]
        return r

    def join_all(self, xs: Iterable[int]) -> int:
        r = self.bottom
        for x in xs:
            r = self.join_t[r][x]
        return r

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)

    def covers(self) -> list[tuple[int, int]]:
        out = []
        for a in self.elements:
            strict = self.up[a] & ~(1 << a)
            for b in _bits(strict):
                if not any(c != b and (self.up[c] >> b) & 1 for c in _bits(strict)):
                    out.append((a, b))
        return out

    @cached_property
    def is_distributive(self) -> bool:
        m, j = self.meet_t, self.join_t
        r = self.elements
        return all(m[a][j[b][c]] == j[m[a][b]][m[a][c]] for a in r for b in r for c in r)

    def pseudocomplement(self, a: int) -> int | None:
        cands = [y for y in self.elements if self.meet_t[a][y] == self.bottom]
        best = self.join_all(cands)
        return best if self.meet_t[a][best] == self.bottom else None

    @cached_property
    def pseudocomplementation(self) -> tuple[int, ...] | None:
        out = []
        for a in self.elements:
            p = self.pseudocomplement(a)
            if p is None:
                return None
            out.append(p)
        return tuple(out)

    @property
    def is_pseudocomplemented(self) -> bool:
        return self.pseudocomplementation is not None

    def join_irreducibles(self) -> list[int]:
        lower = {b: [a for a, c in self.covers() if c == b] for b in self.elements}
        return [b for b in self.elements if len(lower[b]) == 1]

    def meet_irreducibles(self) -> list[int]:
        upper = {a: [c for b, c in self.covers() if b == a] for a in self.elements}
        return [a for a in self.elements if len(upper[a]) == 1]

    def is_join_dense(self, s: Iterable[int]) -> bool:
        s = list(s)
        return all(self.join_all(x for x in s if self.le(x, a)) == a for a in self.elements)

    def is_meet_dense(self, s: Iterable[int]) -> bool:
        s = list(s)
        return all(self.meet_all(x for x in s if self.le(a, x)) == a for a in self.elements)

    def filters(self) -> list[int]:
        """All nonempty filters as bitmasks (the whole carrier included)."""
        return [m for m in range(1, 1 << self.n) if self._is_filter(m, self.up, self.meet_t)]

    def ideals(self) -> list[int]:
        """All nonempty ideals as bitmasks (the whole carrier included)."""
        return [m for m in range(1, 1 << self.n) if self._is_filter(m, self.down, self.join_t)]

    @staticmethod
    def _is_filter(mask: int, up, op) -> bool:
        members = list(_bits(mask))
        if any(up[a] & ~mask for a in members):
            return False
        return all((mask >> op[a][b]) & 1 for a in members for b in members)

    def permuted(self, perm: Sequence[int]) -> "Lattice":
        """Relabel element ``a`` as ``perm[a]``."""
        n = self.n
        up = [0] * n
        for a in self.elements:
            up[perm[a]] = sum(1 << perm[b] for b in _bits(self.up[a]))
        return Lattice(tuple(up))

    def to_json(self) -> dict:
        return {"n": self.n, "leq": [int(self.le(a, b)) for a in self.elements for b in self.elements]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Lattice":
        n = obj["n"]
        bits = obj["leq"]
        if isinstance(bits, str):
            bits = [int(c) for c in bits if c in "01"]
        if len(bits) == n and isinstance(bits[0], list):
            bits = [x for row in bits for x in row]
        if len(bits) != n * n:
            raise ValueError("leq must have n*n entries")
        return cls.from_leq([[bool(bits[a * n + b]) for b in range(n)] for a in range(n)],
                            tuple(obj["labels"]) if obj.get("labels") else None)


@dataclass(frozen=True)
class Algebra:
    """A lattice with an optional negation table and implication table."""

    lattice: Lattice
    neg: tuple[int, ...] | None = None
    imp: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self) -> None:
        n = self.lattice.n
        if self.neg is not None:
            object.__setattr__(self, "neg", tuple(self.neg))
            if len(self.neg) != n or any(not 0 <= x < n for x in self.neg):
                raise ValueError("negation table does not match the lattice")
        if self.imp is not None:
            object.__setattr__(self, "imp", tuple(tuple(r) for r in self.imp))
            if len(self.imp) != n or any(len(r) != n or any(not 0 <= x < n for x in r) for r in self.imp):
                raise ValueError("implication table does not match the lattice")

    @property
    def n(self) -> int:
        return self.lattice.n

    def to_json(self) -> dict:
        obj = self.lattice.to_json()
        if self.neg is not None:
            obj["neg"] = list(self.neg)
        if self.imp is not None:
            obj["imp"] = [list(r) for r in self.imp]
        if self.lattice.labels:
            obj["labels"] = list(self.lattice.labels)
        return obj

    @classmethod
    def from_json(cls, obj: Mapping | str) -> "Algebra":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(Lattice.from_json(obj), obj.get("neg"), obj.get("imp"))

    def implied_negation(self) -> tuple[int, ...]:
        """The negation ``a -> 0`` induced by the implication."""
        return tuple(self.imp[a][self.lattice.bottom] for a in self.lattice.elements)


# ---------------------------------------------------------------------------
# Negation classes
# ---------------------------------------------------------------------------

def negation_properties(L: Lattice, neg: Sequence[int]) -> dict[str, bool]:
    """Each row of the negation property table, evaluated exhaustively."""
    r = L.elements
    m, j = L.meet_t, L.join_t
    z, o = L.bottom, L.top
    return {
        "antitone": all(L.le(neg[b], neg[a]) for a in r for b in r if L.le(a, b)),
        "neg_top_bottom": neg[o] == z,
        "neg_bottom_top": neg[z] == o,
        "semicomplement": all(m[a][neg[a]] == z for a in r),
        "dni": all(L.le(a, neg[neg[a]]) for a in r),
        "pseudocomplement": L.pseudocomplementation == tuple(neg),
        "dne": all(L.le(neg[neg[a]], a) for a in r),
        "complement": all(m[a][neg[a]] == z and j[a][neg[a]] == o for a in r),
    }


def classify_negation(L: Lattice | Algebra, neg: Sequence[int] | None = None) -> frozenset:
    if isinstance(L, Algebra):
        L, neg = L.lattice, L.neg
    p = negation_properties(L, neg)
    anti = p["antitone"]
    out = set()
    if anti and p["neg_top_bottom"]:
        out.add("pre")
    if anti and p["semicomplement"] and p["neg_bottom_top"]:
        out.add("proto")
    if anti and p["dni"] and p["neg_top_bottom"]:
        out.add("ultraweak")
    if anti and p["semicomplement"] and p["dni"]:
        out.add("weak")
    if p["pseudocomplement"]:
        out.add("pseudo")
    if anti and p["complement"] and p["dne"] and p["dni"]:
        out.add("ortho")
    return frozenset(out)


def trivial_negation(L: Lattice) -> tuple[int, ...]:
    """The weak pseudocomplementation sending 0 to 1 and everything else to 0."""
    return tuple(L.top if a == L.bottom else L.bottom for a in L.elements)


# ---------------------------------------------------------------------------
# Implication classes
# ---------------------------------------------------------------------------

def _is_preconditional(L: Lattice, imp) -> bool:
    r = L.elements
    m, le, o = L.meet_t, L.le, L.top
    return (
        all(le(imp[o][a], a) for a in r)
        and all(le(m[a][b], imp[a][b]) for a in r for b in r)
        and all(le(imp[a][b], imp[a][m[a][b]]) for a in r for b in r)
        and all(le(imp[a][imp[b][c]], imp[b][c]) for a in r for b in r if le(b, a) for c in r)
        and all(le(imp[a][b], imp[a][c]) for a in r for b in r for c in r if le(b, c))
    )


def _is_preimplication(L: Lattice, imp) -> bool:
    r = L.elements
    le, o = L.le, L.top
    return (
        all(imp[o][a] == a for a in r)
        and all(le(imp[a][imp[a][b]], imp[a][b]) for a in r for b in r)
        and all(le(imp[b][c], imp[a][c]) for a in r for b in r if le(a, b) for c in r)
        and all(le(imp[c][a], imp[c][b]) for a in r for b in r if le(a, b) for c in r)
    )


def classify_implication(L: Lattice | Algebra, imp=None) -> frozenset:
    if isinstance(L, Algebra):
        L, imp = L.lattice, L.imp
    r = L.elements
    m, le, o = L.meet_t, L.le, L.top
    out = set()
    if _is_preconditional(L, imp):
        out.add("preconditional")
    if _is_preimplication(L, imp):
        out.add("preimplication")
        proto = all(imp[b][b] == o for b in r) and all(le(m[a][imp[a][b]], b) for a in r for b in r)
        uw = all(le(a, imp[imp[a][b]][b]) for a in r for b in r)
        if proto:
            out.add("protoimplication")
        if uw:
            out.add("ultraweak-pseudoimplication")
        if proto and uw:
            out.add("weak-pseudoimplication")
        if proto and all(le(a, imp[c][b]) for a in r for b in r for c in r if le(m[a][c], b)):
            out.add("relative-pseudocomplementation")
    return frozenset(out)


def heyting_implication(L: Lattice) -> tuple[tuple[int, ...], ...]:
    """Relative pseudocomplement ``a -> b = max{c : a & c <= b}``; needs distributivity."""
    table = []
    for a in L.elements:
        row = []
        for b in L.elements:
            cands = [c for c in L.elements if L.le(L.meet(a, c), b)]
            best = L.join_all(cands)
            if not L.le(L.meet(a, best), b):
                raise ValueError("lattice has no relative pseudocomplement")
            row.append(best)
        table.append(tuple(row))
    return tuple(table)


def default_preconditional(L: Lattice):
    """``1`` if a <= b, else ``a & b``."""
    return tuple(tuple(L.top if L.le(a, b) else L.meet(a, b) for b in L.elements) for a in L.elements)


def default_preimplication(L: Lattice):
    """``1`` if a <= b, else ``b``."""
    return tuple(tuple(L.top if L.le(a, b) else b for b in L.elements) for a in L.elements)


def material_implication(L: Lattice, neg: Sequence[int]):
    """``~a | b``."""
    return tuple(tuple(L.join(neg[a], b) for b in L.elements) for a in L.elements)


def ortho_implication(L: Lattice, neg: Sequence[int]):
    """``~(a & ~b)``."""
    return tuple(tuple(neg[L.meet(a, neg[b])] for b in L.elements) for a in L.elements)


def conditional_from_negation(L: Lattice, neg: Sequence[int]):
    """``~a | (a & b)``."""
    return tuple(tuple(L.join(neg[a], L.meet(a, b)) for b in L.elements) for a in L.elements)


# ---------------------------------------------------------------------------
# Evaluation and validity
# ---------------------------------------------------------------------------

def evaluate(f: Formula, theta: Mapping[str, int], A: Algebra) -> int:
    """Homomorphic extension of ``theta`` to ``f``."""
    L = A.lattice
    if isinstance(f, PropAtom):
        try:
            return theta[f.name]
        except KeyError:
            raise ValuationError(f"no value for atom {f.name!r}") from None
    if isinstance(f, Neg):
        if A.neg is None:
            raise ValueError("algebra has no negation")
        return A.neg[evaluate(f.body, theta, A)]
    if isinstance(f, And):
        return L.meet_t[evaluate(f.left, theta, A)][evaluate(f.right, theta, A)]
    if isinstance(f, Or):
        return L.join_t[evaluate(f.left, theta, A)][evaluate(f.right, theta, A)]
    if isinstance(f, Imp):
        if A.imp is None:
            raise ValueError("algebra has no implication")
        return A.imp[evaluate(f.left, theta, A)][evaluate(f.right, theta, A)]
    raise ValueError(f"cannot evaluate non-propositional formula {render(f)}")


def _compile(f: Formula, names: Sequence[str], A: Algebra):
    """Return a function from a value tuple to the value of ``f``."""
    L = A.lattice
    idx = {name: i for i, name in enumerate(names)}
    m, j, neg, imp = L.meet_t, L.join_t, A.neg, A.imp

    def go(g):
        if isinstance(g, PropAtom):
            i = idx[g.name]
            return lambda v: v[i]
        if isinstance(g, Neg):
            if neg is None:
                raise ValueError("algebra has no negation")
            h = go(g.body)
            return lambda v: neg[h(v)]
        if isinstance(g, (And, Or, Imp)):
            table = m if isinstance(g, And) else j if isinstance(g, Or) else imp
            if table is None:
                raise ValueError("algebra has no implication")
            lf, rf = go(g.left), go(g.right)
            return lambda v: table[lf(v)][rf(v)]
        raise ValueError(f"cannot evaluate non-propositional formula {render(g)}")

    return go(f)


def valuations(names: Sequence[str], n: int):
    return itertools.product(range(n), repeat=len(names))


MAX_HOLDS_ATOMS = 4


def find_violation(phi: Formula, psi: Formula, A: Algebra, max_atoms: int | None = MAX_HOLDS_ATOMS):
    """A valuation with ``phi`` not below ``psi``, or None."""
    if not (is_propositional(phi) and is_propositional(psi)):
        raise ValueError("holds needs propositional formulas")
    names = sorted(atoms(phi) | atoms(psi))
    if max_atoms is not None and len(names) > max_atoms:
        raise ValueError(f"{len(names)} atoms exceed the cap of {max_atoms}")
    fp, fq = _compile(phi, names, A), _compile(psi, names, A)
    up = A.lattice.up
    for v in valuations(names, A.n):
        if not (up[fp(v)] >> fq(v)) & 1:
            return dict(zip(names, v))
    return None


def holds(phi: Formula, psi: Formula, A: Algebra, max_atoms: int | None = MAX_HOLDS_ATOMS) -> bool:
    """``phi <= psi`` under every valuation into ``A``."""
    return find_violation(phi, psi, A, max_atoms) is None
