import itertools
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_formula
from fundlogic.algebra import (
    Algebra, Lattice, NotALattice, ValuationError, classify_implication, classify_negation,
    conditional_from_negation, default_preconditional, default_preimplication, evaluate,
    find_violation, heyting_implication, holds, material_implication, trivial_negation,
)
from fundlogic.enumeration import enumerate_expansions, enumerate_lattices
from fundlogic.frames import Model, figure_frames, fixpoint_algebra, fixpoint_lattice, force
from fundlogic.syntax import parse


def n5():
    # 0 < a < b < 1 and 0 < c < 1
    return Lattice.from_covers(5, [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)], ("0", "a", "b", "c", "1"))


# ---------------------------------------------------------------------------
# Definitional oracles, written directly from the order relation
# ---------------------------------------------------------------------------

def _meet(L, a, b):
    lower = [c for c in L.elements if L.le(c, a) and L.le(c, b)]
    return next(c for c in lower if all(L.le(d, c) for d in lower))


def _join(L, a, b):
    upper = [c for c in L.elements if L.le(a, c) and L.le(b, c)]
    return next(c for c in upper if all(L.le(c, d) for d in upper))


def oracle_classes(L, neg):
    r = list(L.elements)
    z, o = L.bottom, L.top
    anti = all(L.le(neg[b], neg[a]) for a in r for b in r if L.le(a, b))
    semi = all(_meet(L, a, neg[a]) == z for a in r)
    dni = all(L.le(a, neg[neg[a]]) for a in r)
    out = set()
    if anti and neg[o] == z:
        out.add("pre")
    if anti and semi and neg[z] == o:
        out.add("proto")
    if anti and dni and neg[o] == z:
        out.add("ultraweak")
    if anti and semi and dni:
        out.add("weak")
    # pseudocomplement: the maximum of {y : a & y = 0}
    if all(neg[a] in (ys := [y for y in r if _meet(L, a, y) == z]) and all(L.le(y, neg[a]) for y in ys)
           for a in r):
        out.add("pseudo")
    compl = all(_meet(L, a, neg[a]) == z and _join(L, a, neg[a]) == o for a in r)
    if compl and anti and all(neg[neg[a]] == a for a in r):
        out.add("ortho")
    return frozenset(out)


class TestLattice:
    def test_meets_and_joins_agree_with_order(self):
        for n in range(1, 7):
            for L in enumerate_lattices(n):
                for a, b in itertools.product(L.elements, repeat=2):
                    assert L.meet(a, b) == _meet(L, a, b)
                    assert L.join(a, b) == _join(L, a, b)

    def test_rejects_non_lattices(self):
        # two incomparable maximal elements
        with pytest.raises(NotALattice):
            Lattice.from_covers(3, [(0, 1), (0, 2)])
        # the bowtie: a, b below both c and d
        with pytest.raises(NotALattice):
            Lattice.from_covers(6, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (4, 5)])

    def test_n5_is_not_distributive(self):
        L = n5()
        assert not L.is_distributive
        assert L.is_pseudocomplemented
        assert Lattice.boolean(2).is_distributive and Lattice.chain(4).is_distributive

    def test_json_round_trip(self):
        for A in enumerate_expansions(5, "weak"):
            B = Algebra.from_json(json.loads(json.dumps(A.to_json())))
            assert B.lattice.up == A.lattice.up and B.neg == A.neg


class TestNegationClasses:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_classify_matches_definitions_on_all_maps(self, n):
        for L in enumerate_lattices(n):
            for neg in itertools.product(L.elements, repeat=n):
                assert classify_negation(L, neg) == oracle_classes(L, neg)

    def test_class_inclusions(self):
        # pseudo and ortho are weak; weak is proto and ultraweak; those are pre
        for L in enumerate_lattices(5):
            for neg in itertools.product(L.elements, repeat=5):
                c = classify_negation(L, neg)
                if c & {"pseudo", "ortho"}:
                    assert "weak" in c
                if "weak" in c:
                    assert {"proto", "ultraweak"} <= c
                if c & {"proto", "ultraweak"}:
                    assert "pre" in c

    def test_figure_examples(self):
        fr = figure_frames()
        cls = {k: classify_negation(fixpoint_algebra(F)[0]) for k, F in fr.items()}
        assert "pseudo" in cls["n5-left"] and "ortho" not in cls["n5-left"]
        assert "weak" in cls["n5-middle"] and not cls["n5-middle"] & {"pseudo", "ortho"}
        assert "proto" in cls["n5-right"] and "weak" not in cls["n5-right"]
        assert "ortho" in cls["o6-left"] and "pseudo" not in cls["o6-left"]
        assert "pseudo" in cls["o6-right"] and "ortho" not in cls["o6-right"]
        for k in ("n5-left", "n5-middle", "n5-right"):
            L, _ = fixpoint_lattice(fr[k])
            assert L.n == 5 and not L.is_distributive

    def test_kleene_chain_is_ultraweak_not_weak(self):
        L = Lattice.chain(3)
        c = classify_negation(L, (2, 1, 0))
        assert "ultraweak" in c and "weak" not in c

    def test_trivial_negation_is_weak_on_every_lattice(self):
        for n in range(1, 7):
            for L in enumerate_lattices(n):
                assert "weak" in classify_negation(L, trivial_negation(L))

    def test_pseudocomplement_is_unique(self):
        for L in enumerate_lattices(5):
            pcs = [neg for neg in itertools.product(L.elements, repeat=5)
                   if "pseudo" in classify_negation(L, neg)]
            assert len(pcs) == (1 if L.is_pseudocomplemented else 0)


class TestImplication:
    def test_heyting_on_distributive_lattices(self):
        for n in range(1, 7):
            for L in enumerate_lattices(n):
                if not L.is_distributive:
                    continue
                imp = heyting_implication(L)
                for a, b, c in itertools.product(L.elements, repeat=3):
                    assert L.le(L.meet(a, c), b) == L.le(c, imp[a][b])
                assert "relative-pseudocomplementation" in classify_implication(L, imp)
                # the induced negation is the pseudocomplementation
                assert Algebra(L, None, imp).implied_negation() == L.pseudocomplementation

    def test_heyting_fails_on_n5(self):
        with pytest.raises(ValueError):
            heyting_implication(n5())

    def test_default_constructions(self):
        for L in enumerate_lattices(5):
            assert "preconditional" in classify_implication(L, default_preconditional(L))
            assert "preimplication" in classify_implication(L, default_preimplication(L))

    def test_material_implication_on_boolean(self):
        L = Lattice.boolean(2)
        neg = L.pseudocomplementation
        assert material_implication(L, neg) == heyting_implication(L)
        assert "preconditional" in classify_implication(L, conditional_from_negation(L, neg))


class TestEvaluation:
    def test_evaluate_and_holds(self):
        A = Algebra(Lattice.chain(3), (2, 0, 0))
        assert evaluate(parse("~p | p"), {"p": 1}, A) == 1
        assert holds(parse("p"), parse("~~p"), A)
        assert not holds(parse("~~p"), parse("p"), A)
        assert find_violation(parse("~~p"), parse("p"), A) == {"p": 1}
        with pytest.raises(ValuationError):
            evaluate(parse("q"), {"p": 0}, A)

    def test_atom_cap(self):
        A = Algebra(Lattice.chain(2), (1, 0))
        with pytest.raises(ValueError):
            holds(parse("p & q & r & s"), parse("t"), A)

    @pytest.mark.parametrize("name", sorted(figure_frames()))
    def test_algebraic_value_equals_forced_set(self, name):
        # two routes to a formula's meaning on a frame: evaluate in the
        # fixpoint algebra, or collect the states that force it
        F = figure_frames()[name]
        A, fixes = fixpoint_algebra(F)
        rng = random.Random(name)
        for _ in range(60):
            f = random_formula(rng, 4)
            theta = {"p": rng.randrange(A.n), "q": rng.randrange(A.n)}
            M = Model(F, {k: fixes[v] for k, v in theta.items()})
            forced = sum(1 << x for x in range(F.n) if force(M, x, f))
            assert forced == fixes[evaluate(f, theta, A)]


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_weak_algebras_validate_intro_elim_laws(n):
    for A in enumerate_expansions(n, "weak"):
        for lhs, rhs in [("p", "~~p"), ("p & ~p", "q"), ("~(p | q)", "~p & ~q"), ("~p | ~q", "~(p & q)")]:
            assert holds(parse(lhs), parse(rhs), A)


@given(st.integers(2, 6), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_join_meet_absorption(n, rng):
    L = rng.choice(list(enumerate_lattices(n)))
    a, b = rng.randrange(n), rng.randrange(n)
    assert L.meet(a, L.join(a, b)) == a and L.join(a, L.meet(a, b)) == a
