import random

import pytest

from dplltcert import lkdpll as lk
from dplltcert.core import Clause, ClauseSet, lit
from dplltcert.dpll import run
from dplltcert.formats import (FormatError, fmt_formula, fmt_lkd_rule, fmt_lkt_rule,
                               format_problem, format_trace, parse_formula, parse_lkd_rule,
                               parse_lkt_rule, parse_problem, parse_trace, read_certificate,
                               write_certificate)
from dplltcert.lkt import check_lkt_tree
from dplltcert.sim1 import certify_unsat
from dplltcert.sim2 import translate_proof
from dplltcert.theory import EmptyTheory, EqAtom, EqualityTheory

from oracles import random_eq_problem

T = EmptyTheory()


def test_parse_problem_examples():
    p = parse_problem("p cnft 2 2\n1 2 0\n-1 0\n")
    assert p.clauses == ClauseSet.of([1, 2], [-1]) and not p.has_theory_atoms
    p = parse_problem("p cnft 1 1\na 1 eq x y\n1 0\n")
    assert p.table[1] == EqAtom("x", "y", True) and p.has_theory_atoms
    p = parse_problem("# comment\np cnft 2 1\n1\n-2 0  # split line\n")
    assert p.clauses == ClauseSet.of([1, -2])


@pytest.mark.parametrize("text, needle", [
    ("p cnft 1 1\n0\n", "empty clause"),
    ("p cnft 1 1\na 1 eq x y\na 1 neq x y\n1 0\n", "twice"),
    ("p cnft 1 1\n2 0\n", "outside"),
    ("p cnft 1 2\n1 0\n", "clause"),
    ("1 0\n", "header"),
    ("p cnft 2 1\n1 2\n", "terminated"),
    ("p cnft 1 1\nx 0\n", "line"),
])
def test_parse_problem_errors(text, needle):
    with pytest.raises(FormatError) as e:
        parse_problem(text)
    assert needle in str(e.value)


def test_problem_round_trip():
    rng = random.Random(7)
    for _ in range(50):
        phi, table = random_eq_problem(rng)
        p = parse_problem(format_problem(phi, table))
        assert p.clauses == phi and p.table == table
        assert parse_problem(format_problem(p.clauses, p.table)).digest() == p.digest()


def test_trace_and_rule_round_trips():
    rng = random.Random(8)
    for _ in range(30):
        phi, table = random_eq_problem(rng)
        th = EqualityTheory(table)
        r = run(phi, th)
        assert parse_trace(format_trace(r.trace)) == list(r.trace)
        if r.status != "UNSAT":
            continue
        tree = certify_unsat(phi, r.trace, th)
        for n in tree:
            if n.rule is not None:
                assert parse_lkd_rule(fmt_lkd_rule(n.rule)) == n.rule
        out = translate_proof(lk.eliminate_admissible(tree, th, allow_cut=True), phi, th)
        for n in out.proof:
            assert parse_lkt_rule(fmt_lkt_rule(n.rule)) == n.rule
            f = getattr(n.rule, "focus", None)
            if f is not None:
                assert parse_formula(fmt_formula(f)) == f


def _problem_and_tree(text):
    p = parse_problem(text)
    r = run(p.clauses, T)
    assert r.status == "UNSAT"
    return p, certify_unsat(p.clauses, r.trace, T)


UNSAT2 = "p cnft 2 3\n1 2 0\n-1 2 0\n-2 0\n"


def test_certificate_round_trip_is_byte_stable():
    p, tree = _problem_and_tree(UNSAT2)
    text = write_certificate(tree, p, "empty")
    cert = read_certificate(text, p)
    assert cert.tree == tree and cert.calculus == "LKDPLL" and cert.theory == "empty"
    assert write_certificate(cert.tree, p, "empty") == text
    assert lk.check_tree(cert.tree, T)

    lkt_tree = translate_proof(lk.eliminate_admissible(tree, T), p.clauses, T).proof
    text = write_certificate(lkt_tree, p, "empty")
    cert = read_certificate(text, p)
    assert cert.calculus == "LKT" and cert.tree == lkt_tree
    assert write_certificate(cert.tree, p, "empty") == text
    assert check_lkt_tree(cert.tree, T)


def test_empty_axiom_certificate():
    p = parse_problem("p cnft 1 2\n1 0\n-1 0\n")
    tree = lk.Proof(lk.Sequent(frozenset(), ClauseSet.of([], [1])), lk.Empty())
    q = type(p)(ClauseSet.of([], [1]), {1: None}, 1)
    text = write_certificate(tree, q, "empty")
    assert text.count("|") == 2
    assert read_certificate(text, q).tree == tree


def test_truncated_and_tampered_certificates_are_rejected():
    p, tree = _problem_and_tree(UNSAT2)
    text = write_certificate(tree, p, "empty")
    lines = text.splitlines()
    with pytest.raises(FormatError):
        read_certificate("\n".join(lines[:-2]) + "\n", p)
    with pytest.raises(FormatError):
        read_certificate("\n".join(lines[:5] + lines[6:]) + "\n", p)
    body = [i for i, l in enumerate(lines) if "|" in l]
    bad = list(lines)
    rule, kids, dig = bad[body[-1]].split("|")
    bad[body[-1]] = f"{rule}|{kids}| {'0' * 16}"
    with pytest.raises(FormatError, match="digest"):
        read_certificate("\n".join(bad) + "\n", p)
    other = parse_problem("p cnft 2 3\n1 2 0\n-1 2 0\n-2 1 0\n")
    with pytest.raises(FormatError, match="different problem"):
        read_certificate(text, other)


def test_well_shaped_but_unsound_certificate_fails_the_checker():
    p = parse_problem("p cnft 2 2\n1 2 0\n-1 0\n")
    root = lk.Sequent(frozenset(), p.clauses)
    bogus = lk.node(root, lk.Resolve(lit(1), Clause.of(2)),
                    lk.open_leaf(lk.Sequent(frozenset(), ClauseSet.of([2], [-1]))))
    cert = read_certificate(write_certificate(bogus, p, "empty"), p)
    why = lk.tree_violation(cert.tree, T)
    assert why is not None and "open" not in why
