"""Decision procedures for propositional F, O, J and C, and bounded countermodel search.

F and O are decided by forward saturation of restricted sequents
``G => D`` with ``|G| + |D| <= 2`` built from subformulas of the query.
In F the succedent holds at most one formula, in O at most two.  A sequent
is read algebraically as follows (``a, b`` the antecedent, ``c, d`` the
succedent): ``a => c`` is ``a <= c``; ``a, b =>`` is ``a <= ~b``;
``a =>`` is ``a = 0``; ``=> c`` is ``c = 1``; ``=> c, d`` is ``~c <= d``.

J uses a cut-free single-succedent backward search with loop checking,
and C two-valued truth tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

from .algebra import Algebra, evaluate, find_violation
from .fitch import Logic
from .frames import Frame, Model, extension, fixpoints, frame_condition, reflexive_frames
from .syntax import TOP, And, Formula, Neg, Or, PropAtom, atoms, render, subformulas, uses_implication, is_propositional

__all__ = [
    "Sequent", "decide", "saturate", "sequent_space", "countermodel", "Countermodel",
    "disjunction_property_check", "DecideError",
]


class DecideError(ValueError):
    pass


def _key(f: Formula) -> str:
    return render(f)


def _ms(*fs: Formula) -> tuple[Formula, ...]:
    return tuple(sorted(fs, key=_key))


@dataclass(frozen=True)
class Sequent:
    """``gamma => delta`` with both sides sorted multisets."""

    gamma: tuple[Formula, ...]
    delta: tuple[Formula, ...]

    def __str__(self) -> str:
        left = ", ".join(render(f) for f in self.gamma)
        right = ", ".join(render(f) for f in self.delta)
        return f"{left} => {right}".strip()


def _check_input(*fs: Formula) -> None:
    for f in fs:
        if not is_propositional(f) or uses_implication(f):
            raise DecideError(f"decide needs propositional formulas without '->': {render(f)}")


# ---------------------------------------------------------------------------
# Saturation for F and O
# ---------------------------------------------------------------------------

def sequent_space(universe: Iterable[Formula], dmax: int) -> list[Sequent]:
    """Every sequent over ``universe`` that respects the shape bounds."""
    U = sorted(set(universe), key=_key)
    out = []
    for g in range(3):
        for d in range(min(dmax, 2 - g) + 1):
            for G in itertools.combinations_with_replacement(U, g):
                for D in itertools.combinations_with_replacement(U, d):
                    out.append(Sequent(G, D))
    return out


def _drop(t: tuple, i: int) -> tuple:
    return t[:i] + t[i + 1:]


def _premises(s: Sequent, U: frozenset, dmax: int) -> Iterator[tuple[Sequent, ...]]:
    """Premise lists of every rule instance concluding ``s``."""
    G, D = s.gamma, s.delta
    if len(G) == 1 and D == G:
        yield ()  # axiom
    for i in range(len(G)):
        yield (Sequent(_drop(G, i), D),)  # weakening left
    for i in range(len(D)):
        yield (Sequent(G, _drop(D, i)),)  # weakening right
    if len(G) == 1 and not D:
        yield (Sequent(G + G, D),)  # contraction left
    if len(D) == 1 and not G and dmax >= 2:
        yield (Sequent(G, D + D),)  # contraction right

    for i, X in enumerate(G):
        rest = _drop(G, i)
        if isinstance(X, And):
            for part in (X.left, X.right):
                yield (Sequent(_ms(part, *rest), D),)
            if not rest and not D:
                yield (Sequent(_ms(X.left, X.right), ()),)
        elif isinstance(X, Or):
            yield (Sequent(_ms(X.left, *rest), D), Sequent(_ms(X.right, *rest), D))
        elif isinstance(X, Neg):
            if len(D) + 1 <= dmax:
                yield (Sequent(rest, _ms(X.body, *D)),)

    for i, X in enumerate(D):
        rest = _drop(D, i)
        if isinstance(X, And):
            yield (Sequent(G, _ms(X.left, *rest)), Sequent(G, _ms(X.right, *rest)))
        elif isinstance(X, Or):
            for part in (X.left, X.right):
                yield (Sequent(G, _ms(part, *rest)),)
            if not G and not rest and dmax >= 2:
                yield (Sequent((), _ms(X.left, X.right)),)
        elif isinstance(X, Neg):
            yield (Sequent(_ms(X.body, *G), rest),)


def saturate(universe: Iterable[Formula], dmax: int = 1) -> frozenset:
    """All derivable sequents over the subformula-closed ``universe``."""
    U = frozenset(universe)
    todo = sequent_space(U, dmax)
    derived: set[Sequent] = set()
    changed = True
    while changed:
        changed = False
        rest = []
        for s in todo:
            if any(all(p in derived for p in prem) for prem in _premises(s, U, dmax)):
                derived.add(s)
                changed = True
            else:
                rest.append(s)
        todo = rest
    return frozenset(derived)


def _universe(*fs: Formula) -> frozenset:
    U: set = set()
    for f in fs:
        U |= subformulas(f)
    return frozenset(U)


def _saturation_decide(phi: Formula, psi: Formula, dmax: int) -> bool:
    return Sequent((phi,), (psi,)) in saturate(_universe(phi, psi), dmax)


# ---------------------------------------------------------------------------
# J: backward search
# ---------------------------------------------------------------------------

class _LJ:
    """Cut-free single-succedent search with cumulative contexts.

    ``~A`` is handled as ``A -> bot``.  Successes are cached; failures are
    cached only when the subtree did not touch a loop.
    """

    def __init__(self) -> None:
        self.proved: set = set()
        self.refuted: set = set()

    def prove(self, gamma: frozenset, goal: Formula | None) -> bool:
        ok, _ = self._prove(gamma, goal, set())
        return ok

    def _saturate_left(self, gamma: frozenset) -> tuple[frozenset, list[tuple[Formula, Formula]]]:
        g = set(gamma)
        changed = True
        while changed:
            changed = False
            for f in list(g):
                if isinstance(f, And) and not {f.left, f.right} <= g:
                    g |= {f.left, f.right}
                    changed = True
        splits = [(f.left, f.right) for f in sorted(g, key=_key)
                  if isinstance(f, Or) and f.left not in g and f.right not in g]
        return frozenset(g), splits

    def _prove(self, gamma: frozenset, goal: Formula | None, stack: set) -> tuple[bool, bool]:
        gamma, splits = self._saturate_left(gamma)
        key = (gamma, goal)
        if key in self.proved:
            return True, False
        if key in self.refuted:
            return False, False
        if key in stack:
            return False, True
        stack.add(key)
        ok, looped = self._search(gamma, goal, splits, stack)
        stack.discard(key)
        if ok:
            self.proved.add(key)
        elif not looped:
            self.refuted.add(key)
        return ok, looped

    def _search(self, gamma, goal, splits, stack) -> tuple[bool, bool]:
        if any(isinstance(f, Neg) and f.body in gamma for f in gamma):
            return True, False
        if goal is not None and goal in gamma:
            return True, False
        looped = False
        if splits:  # left disjunction is invertible
            a, b = splits[0]
            ok1, l1 = self._prove(gamma | {a}, goal, stack)
            if not ok1:
                return False, l1
            ok2, l2 = self._prove(gamma | {b}, goal, stack)
            return ok2, l1 or l2
        if isinstance(goal, And):
            ok1, l1 = self._prove(gamma, goal.left, stack)
            if not ok1:
                return False, l1
            ok2, l2 = self._prove(gamma, goal.right, stack)
            return ok2, l1 or l2
        if isinstance(goal, Neg):
            return self._prove(gamma | {goal.body}, None, stack)
        if isinstance(goal, Or):
            for part in (goal.left, goal.right):
                ok, lp = self._prove(gamma, part, stack)
                looped |= lp
                if ok:
                    return True, looped
        for f in sorted(gamma, key=_key):
            if isinstance(f, Neg):
                # ~A on the left: prove A, after which anything follows
                ok, lp = self._prove(gamma, f.body, stack)
                looped |= lp
                if ok:
                    return True, looped
        return False, looped


# ---------------------------------------------------------------------------
# C: truth tables
# ---------------------------------------------------------------------------

def _classical(phi: Formula, psi: Formula) -> bool:
    names = sorted(atoms(phi) | atoms(psi))

    def ev(f, v):
        if isinstance(f, PropAtom):
            return v[f.name]
        if isinstance(f, Neg):
            return not ev(f.body, v)
        if isinstance(f, And):
            return ev(f.left, v) and ev(f.right, v)
        return ev(f.left, v) or ev(f.right, v)

    for bits in itertools.product((False, True), repeat=len(names)):
        v = dict(zip(names, bits))
        if ev(phi, v) and not ev(psi, v):
            return False
    return True


def decide(phi: Formula, psi: Formula, mode: Logic | str = "F") -> bool:
    """Whether ``phi |- psi`` in the given propositional logic."""
    _check_input(phi, psi)
    logic = Logic(mode)
    if logic is Logic.F:
        return _saturation_decide(phi, psi, 1)
    if logic is Logic.O:
        return _saturation_decide(phi, psi, 2)
    if logic is Logic.J:
        return _LJ().prove(frozenset([phi]), psi)
    return _classical(phi, psi)


def disjunction_property_check(phi: Formula, psi: Formula) -> bool:
    """If ``top |- phi | psi`` in F then one disjunct is a theorem."""
    if not decide(TOP, Or(phi, psi), "F"):
        return True
    return decide(TOP, phi, "F") or decide(TOP, psi, "F")


# ---------------------------------------------------------------------------
# Countermodels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Countermodel:
    """A refutation: an algebra with a valuation, or a frame model with a state."""

    kind: str
    size: int
    algebra: Algebra | None = None
    valuation: dict | None = None
    model: Model | None = None
    state: int | None = None

    def to_json(self) -> dict:
        if self.kind == "algebra":
            return {"kind": "algebra", "algebra": self.algebra.to_json(), "valuation": self.valuation}
        return {"kind": "frame", "model": self.model.to_json(), "state": self.model.frame.label(self.state)}


def _algebra_witness(phi: Formula, psi: Formula, max_size: int) -> Countermodel | None:
    from .enumeration import enumerate_expansions

    for n in range(2, max_size + 1):
        for A in enumerate_expansions(n, "weak"):
            v = find_violation(phi, psi, A, max_atoms=None)
            if v is not None:
                return Countermodel("algebra", n, algebra=A, valuation=v)
    return None


def _frames_up_to(n: int) -> Iterator[Frame]:
    """Pseudosymmetric reflexive frames on ``n`` states, one per isomorphism class."""
    return (F for F in reflexive_frames(n) if frame_condition(F, "pseudosymmetric"))


def _frame_witness(phi: Formula, psi: Formula, max_states: int) -> Countermodel | None:
    names = sorted(atoms(phi) | atoms(psi))
    for n in range(1, max_states + 1):
        for F in _frames_up_to(n):
            fixes = fixpoints(F)
            for vals in itertools.product(fixes, repeat=len(names)):
                M = Model(F, dict(zip(names, vals)), check=False)
                bad = extension(M, phi) & ~extension(M, psi)
                if bad:
                    return Countermodel("frame", n, model=M, state=(bad & -bad).bit_length() - 1)
    return None


FRAME_SEARCH_STATES = 4


def countermodel(phi: Formula, psi: Formula, max_size: int = 5, kind: str = "algebra") -> Countermodel | None:
    """Search for a refutation of ``phi |- psi`` in F within the size bound.

    ``None`` only means no witness was found within the bound.
    """
    _check_input(phi, psi)
    if kind == "algebra":
        return _algebra_witness(phi, psi, max_size)
    if kind != "frame":
        raise ValueError(f"unknown countermodel kind {kind!r}")
    found = _frame_witness(phi, psi, min(max_size, FRAME_SEARCH_STATES))
    if found is not None:
        return found
    # larger frames come from representing an algebraic witness
    alg = _algebra_witness(phi, psi, max_size)
    if alg is None:
        return None
    from .represent import frame_from_negation

    rep = frame_from_negation(alg.algebra.lattice, alg.algebra.neg, "weak")
    M = Model(rep.frame, {k: rep.embed(v) for k, v in alg.valuation.items()}, check=False)
    bad = extension(M, phi) & ~extension(M, psi)
    return Countermodel("frame", rep.frame.n, model=M, state=(bad & -bad).bit_length() - 1)


def _evaluate_check(c: Countermodel, phi: Formula, psi: Formula) -> bool:
    """Recheck a witness independently of how it was found."""
    if c.kind == "algebra":
        L = c.algebra.lattice
        return not L.le(evaluate(phi, c.valuation, c.algebra), evaluate(psi, c.valuation, c.algebra))
    ext = extension(c.model, phi) & ~extension(c.model, psi)
    return bool((ext >> c.state) & 1)
