import itertools
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import pointwise_force, random_formula, random_frame
from fundlogic.algebra import classify_implication, classify_negation
from fundlogic.frames import (
    CORRESPONDENCES, FRAME_CONDITIONS, Frame, Model, NotAFixpoint, closure, cond,
    correspondence_test, distributivity_model, extension, figure_frames, fixpoint_algebra,
    fixpoint_lattice, fixpoints, force, frame_condition, imp, is_fixpoint, naive_fixpoints, neg,
    pre_refines, reflexive_frames,
)
from fundlogic.syntax import Imp, PropAtom, parse


@st.composite
def frames(draw, max_n=6, reflexive=None):
    n = draw(st.integers(1, max_n))
    rel = draw(st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n))
    refl = draw(st.booleans()) if reflexive is None else reflexive
    if refl:
        rel = [r | (1 << x) for x, r in enumerate(rel)]
    return Frame(tuple(rel))


class TestClosure:
    @given(frames(), st.data())
    @settings(max_examples=200)
    def test_closure_operator_laws(self, F, data):
        A = data.draw(st.integers(0, F.full))
        B = data.draw(st.integers(0, F.full))
        cA = closure(F, A)
        assert A & ~cA == 0  # extensive
        assert closure(F, cA) == cA  # idempotent
        if A & ~B == 0:
            assert closure(F, A) & ~closure(F, B) == 0  # monotone

    @given(frames())
    @settings(max_examples=200)
    def test_next_closure_finds_every_fixpoint(self, F):
        assert sorted(fixpoints(F)) == naive_fixpoints(F)

    @given(frames())
    @settings(max_examples=100)
    def test_fixpoints_closed_under_intersection_and_operations(self, F):
        fixes = set(fixpoints(F))
        assert F.full in fixes
        for A, B in itertools.product(fixes, repeat=2):
            assert A & B in fixes
            assert neg(F, A) in fixes
            assert imp(F, A, B) in fixes and cond(F, A, B) in fixes

    def test_operations_check_fixpoints(self):
        F = figure_frames()["n5-middle"]
        bad = next(A for A in range(1 << F.n) if not is_fixpoint(F, A))
        with pytest.raises(NotAFixpoint):
            neg(F, bad)


class TestRefinement:
    @given(frames())
    @settings(max_examples=100)
    def test_pre_refinement_preserves_membership(self, F):
        for A in fixpoints(F):
            for x, y in itertools.product(F.states, repeat=2):
                if pre_refines(F, x, y) and (A >> y) & 1:
                    assert (A >> x) & 1


class TestForcing:
    def test_distributivity_counterexample(self):
        M = distributivity_model()
        F = M.frame
        y, z = F.mask("y"), F.mask("z")
        holds = lambda s, state: bool(extension(M, parse(s)) & state)  # noqa: E731
        assert holds("q | r", y) and not holds("q", y) and not holds("r", y)
        assert holds("p & (q | r)", y)
        assert not holds("p & q | p & r", y)
        assert extension(M, parse("~p")) == F.absurd_states
        assert holds("~~p", z) and not holds("p", z)

    @pytest.mark.parametrize("seed", range(8))
    def test_extension_matches_pointwise_clauses(self, seed):
        rng = random.Random(seed)
        F = random_frame(rng, rng.randint(1, 5), reflexive=rng.random() < 0.7)
        fixes = fixpoints(F)
        for _ in range(40):
            V = {"p": rng.choice(fixes), "q": rng.choice(fixes)}
            M = Model(F, V)
            f = random_formula(rng, 4)
            ext = extension(M, f)
            assert ext in fixes
            assert ext == sum(1 << x for x in F.states if pointwise_force(F, V, x, f))

    def test_bot_denotes_least_fixpoint(self):
        for F in figure_frames().values():
            M = Model(F, {"p": F.full})
            assert extension(M, parse("bot")) == closure(F, 0)
            assert extension(M, parse("top")) == F.full

    def test_implication_readings(self):
        F = figure_frames()["n5-left"]
        fixes = fixpoints(F)
        for A, B in itertools.product(fixes, repeat=2):
            M = Model(F, {"p": A, "q": B})
            f = Imp(PropAtom("p"), PropAtom("q"))
            assert extension(M, f, arrow="imp") == imp(F, A, B)
            assert extension(M, f) == cond(F, A, B)

    def test_valuation_must_be_fixpoint(self):
        F = figure_frames()["n5-middle"]
        bad = next(A for A in range(1 << F.n) if not is_fixpoint(F, A))
        with pytest.raises(NotAFixpoint):
            Model(F, {"p": bad})

    def test_quantifiers_intersect_and_close(self):
        F = figure_frames()["o6-left"]
        fixes = fixpoints(F)
        rng = random.Random(3)
        for _ in range(30):
            preds = {("P", (d,)): rng.choice(fixes) for d in range(3)}
            M = Model(F, {}, 3, preds)
            every = extension(M, parse("forall v P(v)"))
            some = extension(M, parse("exists v P(v)"))
            assert every == preds["P", (0,)] & preds["P", (1,)] & preds["P", (2,)]
            assert some == closure(F, preds["P", (0,)] | preds["P", (1,)] | preds["P", (2,)])


class TestSerialization:
    def test_frame_json_round_trip(self):
        for F in figure_frames().values():
            G = Frame.from_json(json.dumps(F.to_json()))
            assert G == F and G.labels == F.labels

    def test_model_json_round_trip(self):
        M = distributivity_model()
        N = Model.from_json(json.dumps(M.to_json()))
        assert N.frame == M.frame and N.valuation == M.valuation

    def test_rel_as_matrix_or_string(self):
        F = Frame.from_json({"size": 2, "rel": [[1, 1], [0, 1]]})
        assert F == Frame.from_json({"size": 2, "rel": "11 01"})
        assert F.opens(0, 1) and not F.opens(1, 0)
        with pytest.raises(ValueError):
            Frame.from_json({"size": 2, "rel": [1, 0, 1]})


class TestFigureFrames:
    def test_fixpoint_lattice_shapes(self):
        fr = figure_frames()
        for k in ("n5-left", "n5-middle", "n5-right"):
            L, _ = fixpoint_lattice(fr[k])
            assert L.n == 5 and not L.is_distributive
        for k in ("o6-left", "o6-right"):
            L, _ = fixpoint_lattice(fr[k])
            assert L.n == 6 and not L.is_distributive
            assert len(L.join_irreducibles()) == 4

    def test_frame_conditions_on_figures(self):
        fr = figure_frames()
        assert frame_condition(fr["o6-left"], "symmetric")
        assert frame_condition(fr["n5-middle"], "pseudosymmetric")
        assert not frame_condition(fr["n5-middle"], "symmetric")
        assert not frame_condition(fr["n5-right"], "pseudosymmetric")
        with pytest.raises(ValueError):
            frame_condition(fr["n5-right"], "bogus")


class TestEnumeration:
    @staticmethod
    def _brute(n):
        off = [(x, y) for x in range(n) for y in range(n) if x != y]
        seen = set()
        for bits in range(1 << len(off)):
            edges = {off[i] for i in range(len(off)) if (bits >> i) & 1}
            seen.add(min(tuple(sorted((p[x], p[y]) for x, y in edges))
                         for p in itertools.permutations(range(n))))
        return len(seen)

    @pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (3, 16), (4, 218)])
    def test_reflexive_frame_counts(self, n, count):
        frs = reflexive_frames(n)
        assert len(frs) == count
        assert all(frame_condition(F, "reflexive") for F in frs)
        assert self._brute(n) == count


class TestCorrespondences:
    def test_sweep_up_to_three_states(self):
        reports = correspondence_test("all", max_size=3)
        assert set(reports) == set(CORRESPONDENCES)
        for r in reports.values():
            assert r.frames == 2 + 16 + 512
            assert r.ok, (r.key, r.examples)
            assert 0 < r.holding < r.frames

    def test_sweep_is_independent_of_chunking(self):
        a = correspondence_test(["corr2", "imp3"], max_size=3, chunk=64)
        b = correspondence_test(["corr2", "imp3"], max_size=3, chunk=100000)
        assert {k: (r.holding, r.violations) for k, r in a.items()} == \
               {k: (r.holding, r.violations) for k, r in b.items()}

    def test_negation_correspondences_through_the_algebra(self):
        # second route: classify the fixpoint algebra instead of checking sets
        for n in (1, 2, 3):
            for code in range(1 << (n * n)):
                F = Frame.from_code(n, code)
                A, _ = fixpoint_algebra(F)
                L, t = A.lattice, A.neg
                dni = all(L.le(a, t[t[a]]) for a in L.elements)
                semi = all(L.meet(a, t[a]) == L.bottom for a in L.elements)
                assert dni == frame_condition(F, "pseudosymmetric")
                assert semi == frame_condition(F, "corr1b")
                if frame_condition(F, "reflexive") and frame_condition(F, "pseudosymmetric"):
                    assert "weak" in classify_negation(A)

    def test_implication_correspondences_through_the_algebra(self):
        for F in reflexive_frames(3):
            A, _ = fixpoint_algebra(F, negation=None, implication="imp")
            assert "preimplication" in classify_implication(A)
            imp_t, L = A.imp, A.lattice
            rpi = all(L.le(L.meet(a, imp_t[a][b]), b) for a in L.elements for b in L.elements)
            assert rpi == frame_condition(F, "right_pre_interpolation")

    def test_unknown_key(self):
        with pytest.raises(ValueError):
            correspondence_test("nope", max_size=1)

    def test_condition_table_is_complete(self):
        for c in CORRESPONDENCES.values():
            assert c.condition in FRAME_CONDITIONS


@given(frames(max_n=4, reflexive=True), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_force_agrees_with_extension(F, rng):
    fixes = fixpoints(F)
    M = Model(F, {"p": rng.choice(fixes), "q": rng.choice(fixes)})
    f = random_formula(rng, 3)
    ext = extension(M, f)
    assert all(force(M, x, f) == bool((ext >> x) & 1) for x in F.states)
