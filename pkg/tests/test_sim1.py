import random

import pytest

from dplltcert import lkdpll as lk
from dplltcert.core import BOTTOM, Clause, ClauseSet, Trail, lit
from dplltcert.dpll import (UNSAT, Decide, Fail, LearningStrategy, Restart, State, TBackjump,
                            TForget, TLearn, UnitPropagate, run)
from dplltcert.lkdpll import Assert, InvResolve, Resolve, Sequent, Split, Weak1, Weak2
from dplltcert.sim1 import (LemmaDischargeFailed, NoMatchingLeaf, certify_unsat,
                            correspondence_holds, discharge_theory_lemma, extend,
                            extend_basic, init_session, simulate)
from dplltcert.theory import EmptyTheory, EqualityTheory

from oracles import random_cnf, random_eq_problem

T = EmptyTheory()


def L(*ns):
    return frozenset(lit(n) for n in ns)


def test_initial_sessions():
    for phi in (ClauseSet.of([1]), ClauseSet(), ClauseSet.of([1, 2], [-1])):
        s = init_session(phi, T)
        assert s.tree == lk.open_leaf(Sequent(frozenset(), phi))
        assert correspondence_holds(s.tree, s.state)


def test_correspondence_examples():
    phi = ClauseSet.of([1, 2])
    leaf = lk.open_leaf(Sequent(L(1), phi))
    assert correspondence_holds(leaf, State(Trail.of((1, "d")), phi))
    assert not correspondence_holds(leaf, State(Trail(), phi))
    done = lk.Proof(Sequent(frozenset(), ClauseSet([BOTTOM])), lk.Empty())
    assert correspondence_holds(done, UNSAT)


def test_unit_then_fail():
    phi = ClauseSet.of([-1], [1])
    s = extend_basic(init_session(phi, T), UnitPropagate(0, lit(-1)))
    rules = [type(n.rule) for n in s.tree if not n.is_open]
    assert rules == [Assert]
    assert [n.sequent for n in lk.open_leaves(s.tree)] == [Sequent(L(-1), phi)]
    assert correspondence_holds(s.tree, s.state)
    s = extend_basic(s, Fail(1))
    assert s.state is UNSAT and lk.is_complete(s.tree)
    assert lk.check_tree(s.tree, T, complete=True)


def test_unit_on_a_wide_clause():
    phi = ClauseSet.of([1, 2, 3])
    s = State(Trail.of(-1, -2), phi)
    sess = init_session(phi, T).__class__(s, lk.open_leaf(Sequent(L(-1, -2), phi)), phi, T)
    sess = extend_basic(sess, UnitPropagate(0, lit(3)))
    rules = [type(n.rule) for n in sess.tree if not n.is_open]
    assert rules == [Resolve, Resolve, Assert, InvResolve, InvResolve]
    assert lk.check_tree(sess.tree, T)
    assert [n.sequent for n in lk.open_leaves(sess.tree)] == [Sequent(L(-1, -2, 3), phi)]
    assert sess.log[0].delta == 3 <= sess.log[0].bound


def test_decide_makes_a_split():
    phi = ClauseSet.of([1, 2])
    s = extend_basic(init_session(phi, T), Decide(lit(1)))
    assert isinstance(s.tree.rule, Split)
    assert [n.sequent for n in lk.open_leaves(s.tree)] == [Sequent(L(-1), phi), Sequent(L(1), phi)]
    assert [r.delta for r in s.log] == [1]


def test_fail_without_leaf_is_reported():
    phi = ClauseSet.of([-1], [1])
    s = init_session(phi, T)
    s = s.__class__(State(Trail.of(-1), phi), s.tree, phi, T)
    with pytest.raises(NoMatchingLeaf):
        extend_basic(s, Fail(1))


def test_discharge_examples():
    t = discharge_theory_lemma(ClauseSet.of([1], [-1]), T)
    assert lk.check_tree(t, T, complete=True)
    t = discharge_theory_lemma(ClauseSet([BOTTOM]), T)
    assert lk.tree_size(t) == 1 and lk.check_tree(t, T, complete=True)
    with pytest.raises(LemmaDischargeFailed):
        discharge_theory_lemma(ClauseSet.of([1]), T)


def test_forget_restart_learn_replacements():
    phi = ClauseSet.of([1, 2], [-1, 2], [1, -2], [-1, -2], [3, 4])
    s = init_session(phi, T)
    s = extend(s, Decide(lit(3)))
    s = extend(s, Decide(lit(1)))
    before = len(lk.open_leaves(s.tree))
    s = extend(s, TLearn(Clause.of(1, 2)))
    cuts = [n for n in s.tree if isinstance(n.rule, lk.Cut)]
    assert len(cuts) == before
    assert all(lk.tree_size(c) == 1 for c in cuts)
    s = extend(s, TForget(len(s.state.clauses) - 1))
    assert [r.delta for r in s.log[-before:]] == [0] * before
    assert any(isinstance(n.rule, Weak1) for n in s.tree)
    s = extend(s, Restart())
    assert {n.sequent for n in lk.open_leaves(s.tree)} == {Sequent(frozenset(), phi)}
    assert any(isinstance(n.rule, Weak2) for n in s.tree)
    assert correspondence_holds(s.tree, s.state)
    assert lk.check_tree(s.tree, T)


def test_certify_examples():
    phi = ClauseSet.of([-1], [1])
    t = certify_unsat(phi, [UnitPropagate(0, lit(-1)), Fail(1)], T)
    assert lk.check_tree(t, T, complete=True)
    phi = ClauseSet.of([1, 2], [-1, 2], [-2])
    t = certify_unsat(phi, run(phi, T).trace, T)
    assert lk.check_tree(t, T, complete=True)
    t = certify_unsat(ClauseSet([BOTTOM]), [Fail(0)], T)
    assert isinstance(t.rule, lk.Empty)


def _walk(phi, trace, theory, bound_step):
    def on_step(session):
        assert correspondence_holds(session.tree, session.state)
        assert lk.is_complete(session.tree) == (session.state is UNSAT)
    s = simulate(phi, trace, theory, on_step=on_step)
    assert all(r.ok for r in s.log)
    return s


def test_basic_runs_keep_correspondence_and_bounds():
    rng = random.Random(31)
    for _ in range(150):
        phi, _ = random_cnf(rng, max_atoms=6, max_clauses=16)
        r = run(phi, T)
        s = _walk(phi, r.trace, T, 1)
        assert all(rec.bound == rec.phi_size + 1 for rec in s.log)
        if r.status == "UNSAT":
            assert lk.check_tree(s.tree, T, complete=True)


def test_advanced_runs_keep_correspondence_and_bounds():
    rng = random.Random(32)
    advanced = 0
    for _ in range(60):
        phi, table = random_eq_problem(rng)
        th = EqualityTheory(table)
        r = run(phi, th, strategy=LearningStrategy(restarts=2))
        s = _walk(phi, r.trace, th, 3)
        advanced += sum(isinstance(x, (TBackjump, TLearn, TForget, Restart)) for x in r.trace)
        if r.status == "UNSAT":
            assert lk.check_tree(s.tree, th, complete=True)
            clean = lk.eliminate_admissible(s.tree, th, allow_cut=True)
            assert lk.check_tree(clean, th, lk.BASE_RULES + (lk.Cut,), complete=True)
    assert advanced > 20
