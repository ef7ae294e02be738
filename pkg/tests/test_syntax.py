import pytest
from hypothesis import given, settings, strategies as st

from fundlogic.syntax import (
    BOT, FIRST_ORDER, FULL, PROPOSITIONAL, TOP, WITH_IMPLICATION, And, Exists, Forall,
    FormulaSyntaxError, Imp, Neg, Or, PredAtom, ProfileError, PropAtom, SubstitutionError,
    all_vars, atoms, check_profile, depth, free_vars, parse, render, size, subformulas,
    substitutable, substitute,
)

p, q, r = PropAtom("p"), PropAtom("q"), PropAtom("r")
VARS = ("u", "v", "w")

names = st.sampled_from(["p", "q", "r", "s1", "a_b"])
variables = st.sampled_from(VARS)
pred_atoms = st.builds(PredAtom, st.sampled_from(["P", "Q"]), st.lists(variables, min_size=1, max_size=2).map(tuple))


def formulas(first_order=True, implication=True):
    leaves = st.one_of(names.map(PropAtom), pred_atoms) if first_order else names.map(PropAtom)

    def extend(children):
        opts = [children.map(Neg), st.builds(And, children, children), st.builds(Or, children, children)]
        if implication:
            opts.append(st.builds(Imp, children, children))
        if first_order:
            opts += [st.builds(Forall, variables, children), st.builds(Exists, variables, children)]
        return st.one_of(opts)

    return st.recursive(leaves, extend, max_leaves=12)


class TestParse:
    def test_examples(self):
        assert parse("p & (q | r)") == And(p, Or(q, r))
        assert parse("~~p") == Neg(Neg(p))
        assert parse("forall v (P(v) | ~P(v))") == Forall("v", Or(PredAtom("P", ("v",)), Neg(PredAtom("P", ("v",)))))

    def test_precedence_and_associativity(self):
        assert parse("p | q & r") == Or(p, And(q, r))
        assert parse("p & q & r") == And(And(p, q), r)
        assert parse("p | q | r") == Or(Or(p, q), r)
        assert parse("p -> q -> r") == Imp(p, Imp(q, r))
        assert parse("~p & q") == And(Neg(p), q)

    def test_quantifier_body_is_a_unit(self):
        P = PredAtom("P", ("v",))
        assert parse("forall v P(v) | q") == Or(Forall("v", P), q)
        assert parse("exists v ~P(v)") == Exists("v", Neg(P))

    def test_abbreviations(self):
        assert parse("bot") == BOT == And(PropAtom("p0"), Neg(PropAtom("p0")))
        assert parse("top") == TOP == Neg(BOT)
        assert render(parse("bot | top")) == "bot | top"

    def test_reserved_atom_rejected(self):
        with pytest.raises(FormulaSyntaxError):
            parse("p0 & q")

    def test_unicode_synonyms(self):
        assert parse("¬p ∧ (q ∨ r)") == And(Neg(p), Or(q, r))

    @pytest.mark.parametrize("text,offset", [("p &", 3), ("(p", 2), ("p q", 2), ("p $ q", 2), ("¬$", 2)])
    def test_error_offsets(self, text, offset):
        with pytest.raises(FormulaSyntaxError) as e:
            parse(text)
        assert e.value.offset == offset

    def test_profiles(self):
        with pytest.raises(ProfileError):
            parse("p -> q", PROPOSITIONAL)
        with pytest.raises(ProfileError):
            parse("forall v P(v)", WITH_IMPLICATION)
        with pytest.raises(ProfileError):
            parse("P(v)", PROPOSITIONAL)
        assert parse("forall v P(v)", FIRST_ORDER) == Forall("v", PredAtom("P", ("v",)))
        with pytest.raises(ProfileError):
            check_profile(Imp(p, q), FIRST_ORDER)


class TestRender:
    def test_examples(self):
        assert render(And(p, Or(q, r))) == "p & (q | r)"
        assert render(Neg(Neg(p))) == "~~p"
        assert render(Forall("v", PredAtom("P", ("v",)))) == "forall v P(v)"

    def test_minimal_parentheses(self):
        assert render(Or(p, And(q, r))) == "p | q & r"
        assert render(And(p, And(q, r))) == "p & (q & r)"
        assert render(Imp(Imp(p, q), r)) == "(p -> q) -> r"
        assert render(Neg(And(p, q))) == "~(p & q)"

    @given(formulas())
    @settings(max_examples=300)
    def test_round_trip(self, f):
        assert parse(render(f), FULL) == f

    @given(formulas())
    @settings(max_examples=100)
    def test_print_parse_print(self, f):
        s = render(f)
        assert render(parse(s)) == s


class TestVariables:
    def test_free_vars(self):
        assert free_vars(parse("forall v P(v, u)")) == {"u"}
        assert free_vars(parse("P(v)")) == {"v"}
        assert free_vars(p) == frozenset()

    def test_substitutable(self):
        assert not substitutable(parse("forall u P(u, v)"), "v", "u")
        assert substitutable(parse("P(v)"), "v", "u")
        assert substitutable(parse("forall v P(v)"), "v", "u")

    def test_substitute(self):
        assert substitute(parse("P(v)"), "v", "u") == parse("P(u)")
        assert substitute(parse("P(v) & forall v Q(v)"), "v", "u") == parse("P(u) & forall v Q(v)")
        assert substitute(p, "v", "u") == p
        with pytest.raises(SubstitutionError):
            substitute(parse("forall u P(u, v)"), "v", "u")

    @given(formulas(implication=False), variables, variables)
    def test_substitute_identity_without_free_occurrence(self, f, v, u):
        if v not in free_vars(f):
            assert substitute(f, v, u) == f

    @given(formulas(implication=False), variables, variables)
    def test_substitution_moves_free_variable(self, f, v, u):
        if v != u and substitutable(f, v, u):
            g = substitute(f, v, u)
            assert v not in free_vars(g)
            if v in free_vars(f):
                assert u in free_vars(g)

    def test_all_vars(self):
        assert all_vars(parse("forall v P(u)")) == {"u", "v"}


class TestStructure:
    def test_subformulas(self):
        assert subformulas(And(p, q)) == {And(p, q), p, q}
        assert subformulas(Neg(p)) == {Neg(p), p}
        assert subformulas(p) == {p}

    @given(formulas())
    def test_subformula_count_bounded_by_size(self, f):
        assert len(subformulas(f)) <= size(f)
        assert f in subformulas(f)

    def test_depth_and_atoms(self):
        f = parse("~(p & q) | r")
        assert depth(f) == 3
        assert atoms(f) == {"p", "q", "r"}

    def test_values_are_hashable(self):
        assert len({parse("p & q"), parse("p&q"), parse("(p) & (q)")}) == 1
