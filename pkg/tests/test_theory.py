import random

import pytest

from dplltcert.core import Clause, ClauseSet, Literal, atoms, lit
from dplltcert.theory import (EmptyTheory, EqAtom, EqualityTheory, UnknownAtomError, Verdict,
                              make_theory, nsat, tc_entails, tc_unsat)

from oracles import partition_consistent, partition_entails, random_eq_table

XYZ = {1: EqAtom("x", "y"), 2: EqAtom("y", "z"), 3: EqAtom("x", "z")}


def L(*ns):
    return frozenset(lit(n) for n in ns)


def test_empty_theory_examples():
    t = EmptyTheory()
    assert tc_unsat(L(1, -1), t) is Verdict.UNSAT
    assert tc_unsat(L(1, 2), t) is Verdict.CONSISTENT
    assert tc_entails(L(1), lit(1), t)
    assert not tc_entails(L(1), lit(2), t)


def test_equality_transitivity():
    t = EqualityTheory(XYZ)
    assert tc_unsat(L(1, 2, -3), t) is Verdict.UNSAT
    assert tc_entails(L(1, 2), lit(3), t)
    assert not tc_entails(L(1), lit(3), t)
    assert t.consistent(L(1, -2, -3))


def test_disequality_atoms_flip_meaning():
    t = EqualityTheory({1: EqAtom("x", "y", equal=False), 2: EqAtom("x", "y")})
    assert t.unsat(L(1, 2))
    assert t.unsat(L(-1, -2))
    assert t.consistent(L(-1, 2))


def test_plain_atoms_in_equality_theory_are_propositional():
    t = EqualityTheory({1: EqAtom("x", "y"), 2: None})
    assert t.unsat(L(2, -2))
    assert t.consistent(L(1, 2))


def test_unknown_atom_is_reported():
    t = EqualityTheory(XYZ)
    with pytest.raises(UnknownAtomError):
        t.unsat(L(9))


def test_nsat_examples():
    t = EmptyTheory()
    assert nsat(L(1), ClauseSet.of([1, 2]), t) == L(1)
    assert nsat(frozenset(), ClauseSet.of([1]), t) == frozenset()
    eq = EqualityTheory({1: EqAtom("x", "y")})
    assert nsat(L(1), ClauseSet.of([1]), eq) == L(1)


def test_fresh_copy_has_no_memo_but_same_answers():
    t = make_theory("eq", XYZ)
    f = t.fresh()
    assert f.unsat(L(1, 2, -3)) == t.unsat(L(1, 2, -3))
    assert not f._memo
    with pytest.raises(ValueError):
        make_theory("lia")


def _random_query(rng, table):
    atoms = list(table)
    lits = [Literal(a, rng.random() < 0.5) for a in rng.sample(atoms, rng.randint(0, len(atoms)))]
    return lits, Literal(rng.choice(atoms), rng.random() < 0.5)


def test_equality_matches_partition_oracle():
    rng = random.Random(5)
    for _ in range(300):
        table = random_eq_table(rng, rng.randint(1, 6), rng.randint(2, 5))
        t = EqualityTheory(table)
        lits, l = _random_query(rng, table)
        assert t.consistent(lits) == partition_consistent(lits, table)
        assert t.entails(lits, l) == partition_entails(lits, l, table)


def test_monotone_and_entailment_both_ways():
    rng = random.Random(6)
    for _ in range(300):
        table = random_eq_table(rng, 6, 4)
        t = EqualityTheory(table)
        lits, l = _random_query(rng, table)
        extra, _ = _random_query(rng, table)
        if t.unsat(lits):
            assert t.unsat(set(lits) | set(extra))
        if t.entails(lits, l) and t.entails(lits, -l):
            assert t.unsat(lits)
        phi = ClauseSet([Clause([l])])
        assert nsat(lits, phi, t) <= atoms(phi)
