"""Property tests over generated inputs."""
from hypothesis import given, settings
from hypothesis import strategies as st

from dplltcert import lkdpll as lk
from dplltcert.core import Clause, ClauseSet, Literal, negate
from dplltcert.dpll import run
from dplltcert.lkt import (AndN, AndP, BotN, Lit, OrN, OrP, PolarityClash, TopP, Unfocused,
                           negate_formula, or_n)
from dplltcert.sim1 import certify_unsat
from dplltcert.sim2 import p_corresponds, translate_proof
from dplltcert.theory import EmptyTheory, EqAtom, EqualityTheory

from oracles import partition_entails, truth_table_sat

literals = st.builds(Literal, st.integers(1, 12), st.booleans())
clauses = st.lists(literals, min_size=1, max_size=4).map(Clause)

formulas = st.recursive(
    st.one_of(literals.map(Lit), st.just(TopP()), st.just(BotN())),
    lambda sub: st.one_of(*(st.builds(k, sub, sub) for k in (AndP, OrP, AndN, OrN))),
    max_leaves=12)


@given(literals)
def test_literal_negation_is_involutive(l):
    assert negate(negate(l)) == l and negate(l) != l and negate(l).atom == l.atom


@given(formulas)
def test_formula_negation_is_involutive(f):
    assert negate_formula(negate_formula(f)) == f


@given(st.lists(clauses, max_size=8), st.randoms())
def test_clause_set_ignores_order(cs, rnd):
    shuffled = list(cs)
    rnd.shuffle(shuffled)
    assert ClauseSet(cs).sorted() == ClauseSet(shuffled).sorted()


@given(st.lists(literals, max_size=6), literals)
def test_polarity_sets_never_hold_a_complementary_pair(pol, l):
    pol = set(pol) | {l, negate(l)}
    try:
        Unfocused(frozenset(), (), (), frozenset(pol))
    except PolarityClash:
        return
    raise AssertionError("complementary polarity set accepted")


@given(st.lists(literals, min_size=1, max_size=5, unique=True), st.data())
def test_p_correspondence_is_monotone_in_polarity(leaves, data):
    f = or_n(leaves)
    keep = data.draw(st.lists(st.sampled_from(leaves), unique=True))
    pol = frozenset(negate(g) for g in leaves if g not in keep)
    assert p_corresponds(f, Clause(keep), pol)
    extra = data.draw(literals)
    if negate(extra) not in pol:
        assert p_corresponds(f, Clause(keep), pol | {extra})
    if pol:
        assert not p_corresponds(f, Clause(keep), pol - {next(iter(pol))})


eq_tables = st.dictionaries(
    st.integers(1, 6),
    st.tuples(st.sampled_from("abcd"), st.sampled_from("abcd"), st.booleans())
      .filter(lambda t: t[0] != t[1]).map(lambda t: EqAtom(*t)),
    min_size=6, max_size=6)


@given(eq_tables, st.data())
@settings(max_examples=150)
def test_equality_entailment_is_monotone(table, data):
    th = EqualityTheory(table)
    lit_s = st.builds(Literal, st.integers(1, 6), st.booleans())
    small = frozenset(data.draw(st.lists(lit_s, max_size=3)))
    big = small | frozenset(data.draw(st.lists(lit_s, max_size=3)))
    goal = data.draw(lit_s)
    if th.entails(small, goal):
        assert th.entails(big, goal)
    if th.unsat(small):
        assert th.unsat(big)
    assert th.entails(small, goal) == partition_entails(small, goal, table)


@given(st.lists(st.lists(st.builds(Literal, st.integers(1, 5), st.booleans()),
                         min_size=1, max_size=3), min_size=1, max_size=14))
@settings(max_examples=120, deadline=None)
def test_pipeline_on_generated_cnfs(raw):
    phi = ClauseSet(Clause(c) for c in raw)
    T = EmptyTheory()
    r = run(phi, T)
    assert (r.status == "SAT") == truth_table_sat(phi, 5)
    if r.status == "UNSAT":
        tree = certify_unsat(phi, r.trace, T)
        assert lk.check_tree(tree, T)
        clean = lk.eliminate_admissible(tree, T)
        assert lk.tree_size(clean) <= lk.tree_size(tree)
        out = translate_proof(clean, phi, T)
        assert out.bound_ok
