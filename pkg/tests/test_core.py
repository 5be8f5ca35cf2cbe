import random
from collections import Counter

import pytest

from dplltcert.core import (BOTTOM, Clause, ClauseSet, Literal, Trail, atoms, backpoints,
                            backstrict, forget, lit, negate)

from oracles import backpoints_rec, backstrict_rec, forget_rec, random_trail


def L(*ns):
    return frozenset(lit(n) for n in ns)


def test_negate_flips_sign():
    a = lit(1)
    assert negate(a) == lit(-1)
    assert negate(lit(-1)) == a
    assert negate(negate(lit(2))) == lit(2)
    assert -a == negate(a)


def test_literal_equality_needs_atom_and_sign():
    assert Literal(3, True) == lit(3)
    assert Literal(3, False) != lit(3)
    assert Literal(4, True) != lit(3)
    with pytest.raises(ValueError):
        lit(0)


def test_clause_is_a_multiset():
    assert Clause.of(1, 2, 3) == Clause.of(3, 1, 2)
    assert Clause.of(1, 1) != Clause.of(1)
    assert Clause.of(1, 1).size == 2
    assert BOTTOM.size == 0 and BOTTOM.is_empty
    assert Clause.of(1, 2, 1).remove(lit(1)) == Clause.of(1, 2)


def test_clause_equality_survives_shuffles():
    rng = random.Random(7)
    for _ in range(200):
        ns = [rng.choice([-1, 1]) * rng.randint(1, 6) for _ in range(rng.randint(0, 6))]
        shuffled = ns[:]
        rng.shuffle(shuffled)
        assert Clause.of(*ns) == Clause.of(*shuffled)


def test_clause_set_size_is_additive():
    phi = ClauseSet.of([1, 2], [-1], [])
    assert phi.size == 3
    c = Clause.of(4, 5, 6)
    assert phi.add(c).size == phi.size + c.size
    assert ClauseSet.of([1], [2]) == ClauseSet.of([2], [1])
    assert ClauseSet.of([1], [1]) != ClauseSet.of([1])


def test_atoms_are_closed_under_negation():
    assert atoms(ClauseSet.of([1, 2])) == L(1, -1, 2, -2)
    assert atoms(ClauseSet([BOTTOM])) == frozenset()
    assert atoms(ClauseSet.of([1], [-1])) == L(1, -1)


def test_forget_examples():
    assert forget(Trail()) == frozenset()
    assert forget(Trail.of(1, (2, "d"), -3)) == L(1, 2, -3)
    assert forget(Trail.of((1, "d"), (2, "d"))) == L(1, 2)


def test_backstrict_examples():
    assert backstrict(Trail()) == []
    assert backstrict(Trail.of((1, "d"))) == [L(-1)]
    assert backstrict(Trail.of((1, "d"), 2)) == [L(-1)]


def test_backpoints_examples():
    assert backpoints(Trail()) == [frozenset()]
    assert Counter(backpoints(Trail.of((1, "d")))) == Counter([L(-1), L(1)])
    assert Counter(backpoints(Trail.of((1, "d"), 2))) == Counter([L(-1), L(1, 2)])


def test_trail_combinators_match_the_recursive_equations():
    rng = random.Random(11)
    for _ in range(1000):
        t = random_trail(rng)
        assert forget(t) == forget_rec(t.entries)
        assert Counter(backstrict(t)) == backstrict_rec(t.entries)
        assert Counter(backpoints(t)) == backpoints_rec(t.entries)


def test_backpoints_structure():
    rng = random.Random(12)
    for _ in range(300):
        t = random_trail(rng)
        bp = backpoints(t)
        assert forget(t) in bp
        assert not Counter(backstrict(t)) - Counter(bp)
        assert len(bp) == 1 + t.level
        assert len(forget(t)) == len(t)


def test_trail_queries():
    t = Trail.of(1, (2, "d"), -3)
    assert t.level == 1
    assert t.decision_positions() == [1]
    assert t.assigned(lit(-2)) and not t.assigned(lit(4))
    assert t[:1] == Trail.of(1)
