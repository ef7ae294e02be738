import pytest
from hypothesis import given, settings, strategies as st

from conftest import DATA
from fundlogic.decide import decide
from fundlogic.fitch import (
    ConstructionError, Justification, Line, Mode, ProofError, ProofFormatError, ProofNode, Rule,
    Sub, cases, check_proof, contrapose, dni, format_proof, glue, is_proof, line_count, pair,
    parse_proof, proof,
)
from fundlogic.syntax import And, Neg, Or, PropAtom, parse

p, q, r = PropAtom("p"), PropAtom("q"), PropAtom("r")


def L(f, rule, *cites):
    return Line(parse(f) if isinstance(f, str) else f, Justification(rule, cites))


def P(*entries):
    return proof(*[parse(e) if isinstance(e, str) else e for e in entries])


def load(name):
    return parse_proof((DATA / name).read_text())


class TestRules:
    def test_single_formula_is_a_proof(self):
        assert check_proof(P("p")) == p

    def test_and(self):
        pr = P("p & q", L("q", Rule.AND_E, 0), L("p", Rule.AND_E, 0), L("q & p", Rule.AND_I, 1, 2))
        assert check_proof(pr) == parse("q & p")
        bad = P("p & q", L("r", Rule.AND_E, 0))
        assert not is_proof(bad)

    def test_or_intro_either_side(self):
        assert is_proof(P("p", L("p | q", Rule.OR_I, 0)))
        assert is_proof(P("p", L("q | p", Rule.OR_I, 0)))
        assert not is_proof(P("p", L("q | r", Rule.OR_I, 0)))

    def test_or_elim(self):
        left = P("p", L("q | p", Rule.OR_I, 0))
        right = P("q", L("q | p", Rule.OR_I, 0))
        good = ProofNode((Line(parse("p | q")), Sub(left), Sub(right), L("q | p", Rule.OR_E, 0, 1, 2)))
        assert check_proof(good) == parse("q | p")
        swapped = ProofNode((Line(parse("p | q")), Sub(right), Sub(left), L("q | p", Rule.OR_E, 0, 1, 2)))
        assert not is_proof(swapped)

    def test_neg_intro_needs_formula_before_subproof(self):
        assert check_proof(dni(p)) == parse("~~p")
        # citing a formula inside the subproof is not allowed
        inner = ProofNode((Line(parse("~p")), L("~p", Rule.REP, 0)))
        bad = ProofNode((Line(p), Sub(inner), L("~~p", Rule.NEG_I, 1, 1)))
        assert not is_proof(bad)

    def test_neg_intro_rejects_nested_pattern(self):
        # psi outside, chi-subproof, then phi-subproof ending in ~psi: the
        # inner negI may not cite psi across the chi boundary
        phi_sub = ProofNode((Line(q), L("~p", Rule.REP, 0)))
        chi = ProofNode((Line(r), Sub(phi_sub), L("~q", Rule.NEG_I, 0, 1)))
        with pytest.raises(ProofError):
            check_proof(ProofNode((Line(p), Sub(chi))))

    def test_neg_elim_explosion(self):
        pr = P("p & ~p", L("p", Rule.AND_E, 0), L("~p", Rule.AND_E, 0), L("q", Rule.NEG_E, 1, 2))
        assert check_proof(pr) == q

    def test_reiteration_only_in_J_and_C(self):
        inner = ProofNode((Line(q), L("p", Rule.REIT)))
        pr = ProofNode((Line(p), Sub(inner)))
        for m in ("F", "O"):
            assert not is_proof(pr, m)
        for m in ("J", "C"):
            assert is_proof(pr, m)

    def test_reiterables_come_from_enclosing_proofs_only(self):
        # a formula from a sibling subproof is not reiterable
        s1 = ProofNode((Line(q),))
        s2 = ProofNode((Line(r), L("q", Rule.REIT)))
        assert not is_proof(ProofNode((Line(p), Sub(s1), Sub(s2))), "J")

    def test_raa_only_in_O_and_C(self):
        # ~~p |- p: the subproof assumes ~p and ends with ~~~p
        good = ProofNode((Line(parse("~~p")), Sub(dni(parse("~p"))), L("p", Rule.RAA, 0, 1)))
        assert check_proof(good, "O") == p
        assert check_proof(good, "C") == p
        assert not is_proof(good, "F")
        assert not is_proof(good, "J")
        # the subproof must end with the negation of the cited formula
        bad = ProofNode((Line(parse("~~p")),
                         Sub(ProofNode((Line(parse("~p")), L("~p", Rule.REP, 0)))),
                         L("p", Rule.RAA, 0, 1)))
        assert not is_proof(bad, "O")

    def test_first_entry_must_be_hyp(self):
        with pytest.raises(ValueError):
            ProofNode((Sub(P("p")),))
        with pytest.raises(ProofError):
            check_proof(ProofNode((Line(p), Line(q))))

    def test_citation_arity(self):
        with pytest.raises(ProofError):
            check_proof(P("p & q", L("p", Rule.AND_E, 0, 0)))

    def test_line_numbers_in_errors(self):
        with pytest.raises(ProofError) as e:
            check_proof(load("might.fitch"), "F")
        assert e.value.line == 7
        assert "reiteration" in e.value.message


class TestQuantifiers:
    def test_forall_intro_and_elim(self):
        pr = parse_proof("""
forall v P(v) ; hyp
P(u) ; forallE 1
forall u P(u) ; forallI 2
""")
        assert check_proof(pr, "FQ") == parse("forall u P(u)")

    def test_forall_intro_variable_free_in_assumption(self):
        pr = parse_proof("""
P(v) ; hyp
forall v P(v) ; forallI 1
""")
        with pytest.raises(ProofError) as e:
            check_proof(pr, "FQ")
        assert "free in the assumption" in e.value.message

    def test_forall_elim_capture_rejected(self):
        pr = parse_proof("""
forall v exists u R(v, u) ; hyp
exists u R(u, u) ; forallE 1
""")
        assert not is_proof(pr, "FQ")

    def test_exists_intro_and_elim(self):
        pr = parse_proof("""
exists v (P(v) & Q(v)) ; hyp
  P(v) & Q(v) ; hyp
  P(v) ; andE 2
  exists w P(w) ; existsI 3
exists w P(w) ; existsE 1, 2-4
""")
        assert check_proof(pr, "FQ") == parse("exists w P(w)")

    def test_exists_elim_variable_free_in_conclusion(self):
        pr = parse_proof("""
exists v P(v) ; hyp
  P(v) ; hyp
P(v) ; existsE 1, 2-2
""")
        with pytest.raises(ProofError) as e:
            check_proof(pr, "FQ")
        assert "free in the conclusion" in e.value.message

    def test_quantifier_rules_need_first_order_mode(self):
        pr = parse_proof("forall v P(v) ; hyp\nP(v) ; forallE 1\n")
        assert not is_proof(pr, "F")
        assert is_proof(pr, Mode.of("FQ"))

    def test_forall_intro_with_reiterable_free_variable(self):
        pr = parse_proof("""
P(v) ; hyp
  Q(u) ; hyp
  P(v) ; reit 1
  forall v P(v) ; forallI 3
""")
        with pytest.raises(ProofError) as e:
            check_proof(pr, "JQ")
        assert "reiterable" in e.value.message


class TestConstructions:
    def test_dni_matches_displayed_proof(self):
        assert dni(p) == load("dni.fitch")
        assert line_count(dni(p)) == 4

    def test_contrapose(self):
        base = P("p & q", L("p", Rule.AND_E, 0))
        c = contrapose(base)
        assert c.assumption == parse("~p") and check_proof(c) == parse("~(p & q)")

    def test_glue_pair_cases(self):
        a = P("p & q", L("p", Rule.AND_E, 0))
        assert check_proof(glue(a, dni(p))) == parse("~~p")
        b = P("p & q", L("q", Rule.AND_E, 0))
        assert check_proof(pair(a, b)) == parse("p & q")
        c1 = P("p", L("q | p", Rule.OR_I, 0))
        c2 = P("q", L("q | p", Rule.OR_I, 0))
        assert check_proof(cases(parse("p | q"), c1, c2)) == parse("q | p")

    def test_construction_errors(self):
        with pytest.raises(ConstructionError):
            glue(P("p"), P("q"))
        with pytest.raises(ConstructionError):
            pair(P("p"), P("q"))
        with pytest.raises(ConstructionError):
            cases(parse("p & q"), P("p"), P("q"))


# Random derivations built from the constructions; the checker must accept
# them and the decision procedure must agree that the sequent holds.
atoms_ = st.sampled_from([p, q, r])
small = st.recursive(atoms_, lambda c: st.one_of(c.map(Neg), st.builds(And, c, c), st.builds(Or, c, c)),
                     max_leaves=4)


@st.composite
def derivations(draw, depth=3):
    if depth == 0:
        return draw(st.one_of(small.map(lambda f: P(f)), small.map(dni)))
    inner = draw(derivations(depth=depth - 1))
    concl = inner.conclusion
    kind = draw(st.sampled_from(["dni", "contra", "pair", "cases", "andE", "orI"]))
    if kind == "dni":
        return glue(inner, dni(concl))
    if kind == "contra":
        return contrapose(inner)
    if kind == "pair":
        return pair(inner, glue(inner, dni(concl)))
    if kind == "cases":
        other = draw(small)
        d = Or(inner.assumption, other)
        right = proof(other, Line(Or(other, concl), Justification(Rule.OR_I, (0,))))
        left = glue(inner, proof(concl, Line(Or(other, concl), Justification(Rule.OR_I, (0,)))))
        return cases(d, left, right)
    if kind == "andE":
        other = draw(small)
        head = proof(And(inner.assumption, other), Line(inner.assumption, Justification(Rule.AND_E, (0,))))
        return glue(head, inner)
    other = draw(small)
    return glue(inner, proof(concl, Line(Or(concl, other), Justification(Rule.OR_I, (0,)))))


@given(derivations())
@settings(max_examples=60, deadline=None)
def test_constructed_proofs_check_and_are_decided_true(pr):
    concl = check_proof(pr, "F")
    assert decide(pr.assumption, concl, "F")


class TestTextFormat:
    def test_round_trip_files(self):
        for name in ("dni.fitch", "might.fitch", "pseudocomp.fitch", "distrib.fitch"):
            pr = load(name)
            assert parse_proof(format_proof(pr)) == pr

    @given(derivations(depth=2))
    @settings(max_examples=30, deadline=None)
    def test_round_trip_random(self, pr):
        assert parse_proof(format_proof(pr)) == pr

    def test_format_errors(self):
        with pytest.raises(ProofFormatError):
            parse_proof("p\n")
        with pytest.raises(ProofFormatError):
            parse_proof("p ; frobnicate 1\n")
        with pytest.raises(ProofFormatError):
            parse_proof("p ; hyp\n  q ; reit 9\n")
        with pytest.raises(ProofFormatError):
            parse_proof("")

    def test_reit_citation_must_match(self):
        with pytest.raises(ProofFormatError):
            parse_proof("p ; hyp\nq ; andE 1\n  r ; hyp\n  q ; reit 1\n")


class TestFigures:
    def test_epistemic_argument(self):
        pr = load("might.fitch")
        with pytest.raises(ProofError) as e:
            check_proof(pr, "F")
        assert e.value.line == 7
        assert check_proof(pr, "J") == parse("p & mnp | ~p & mp")

    def test_pseudocomplementation_pattern(self):
        pr = load("pseudocomp.fitch")
        assert check_proof(pr, "J") == parse("~~p")
        assert not is_proof(pr, "F")
        # the pattern is genuinely beyond F
        assert decide(And(Neg(p), parse("(p | q) & ~q")), parse("bot"), "F")
        assert not decide(parse("(p | q) & ~q"), parse("~~p"), "F")

    def test_distributivity_by_reiteration(self):
        pr = load("distrib.fitch")
        assert check_proof(pr, "J") == parse("p & q | p & r")
        assert not is_proof(pr, "F")
