"""Translating LKDPLL(T) proofs into the focused calculus LK(T)p.

A clause ``C`` is encoded as a right-nested ∨⁻ spine ``C'`` whose leaves
include every literal of ``C``.  Literals of ``C'`` no longer in ``C`` are
garbage; their negations sit in the polarity set, so a focused pass over
``¬C'`` dismisses each of them with one theory axiom.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from . import lkdpll as lkd
from .core import Clause, ClauseSet, Literal
from .lkdpll import Proof, Sequent
from .lkt import (AnalyticCut, AndPRule, BotN, Decide, Focused, Formula, GeneralCut,
                  InitTheory, Lit, LktProof, Polarize, Release, Store,
                  TheoryClose, TopP, TopPRule, Unfocused, atomic_members, lkt_tree_size,
                  negate_formula, or_n, spine_literals)
from .theory import Theory


class CorrespondenceViolation(ValueError):
    pass


class UntranslatableRule(ValueError):
    pass


@dataclass(frozen=True)
class ClauseEncoding:
    clause: Clause
    formula: Formula
    garbage: frozenset


def encode_clause(c: Clause, pol: frozenset = frozenset()) -> ClauseEncoding:
    """Fresh encoding: sorted, duplicate-free spine; never any garbage."""
    return ClauseEncoding(c, or_n(sorted(set(c.lits))), frozenset())


def garbage_of(formula: Formula, c: Clause) -> frozenset:
    lits = spine_literals(formula)
    if lits is None:
        raise CorrespondenceViolation(f"{formula} is not a ∨⁻ spine of literals")
    return frozenset(lits) - set(c.lits)


def p_corresponds(formula: Formula, c: Clause, pol: frozenset) -> bool:
    lits = spine_literals(formula)
    if lits is None:
        return False
    leaves = set(lits)
    if not set(c.lits) <= leaves:
        return False
    return all(-g in pol for g in leaves - set(c.lits))


@dataclass(frozen=True)
class SeqCorrespondence:
    """Links an LKDPLL sequent to an unfocused LK(T)p sequent.

    ``pairing`` matches each clause of the goal (as a multiset) with the
    formula of Γ encoding it; ``extras`` are formulas of Γ whose clause was
    subsumed away.
    """
    source: Sequent
    target: Unfocused
    pairing: tuple[tuple[Clause, Formula], ...]
    extras: tuple[Formula, ...] = ()

    def violation(self, theory: Theory) -> Optional[str]:
        s, t = self.source, self.target
        if t.delta or t.o:
            return "target sequent has non-empty Δ or O zone"
        gamma = t.gamma
        lits = atomic_members(gamma)
        if not s.context <= lits:
            return f"Γ misses context literals {sorted(s.context - lits)}"
        if Counter(c for c, _ in self.pairing) != Counter(s.goal.clauses):
            return "paired clauses differ from the goal"
        for c, f in self.pairing:
            if f not in gamma:
                return f"paired formula {f} not in Γ"
            if not p_corresponds(f, c, t.pol):
                return f"{f} does not correspond to {c} under P={sorted(t.pol)}"
        for p in t.pol:
            if not theory.entails(s.context, p):
                return f"polarized {p} not entailed by the context"
        for f in self.extras:
            if f not in gamma:
                return f"extra formula {f} not in Γ"
            leaves = spine_literals(f) or []
            if not any(theory.entails(s.context, l) for l in leaves):
                return f"extra formula {f} has no entailed literal"
        known = {Lit(l) for l in s.context} | {f for _, f in self.pairing} | set(self.extras)
        stray = gamma - known
        if stray:
            return f"unaccounted formulas in Γ: {sorted(map(str, stray))}"
        return None

    def holds(self, theory: Theory) -> bool:
        return self.violation(theory) is None


def initial_correspondence(phi: ClauseSet) -> SeqCorrespondence:
    pairing = tuple((c, encode_clause(c).formula) for c in phi)
    target = Unfocused(frozenset(f for _, f in pairing), (), (), frozenset())
    return SeqCorrespondence(Sequent(frozenset(), phi), target, pairing)


def _open(gamma: frozenset, pol: frozenset) -> LktProof:
    return LktProof(Unfocused(gamma, (), (), pol))


def _focus_chain(gamma: frozenset, pol: frozenset, focus: Formula,
                 keep: Optional[Literal]) -> LktProof:
    """Decompose a focused ∧⁺ spine; garbage leaves close by theory axiom,
    the leaf ``¬keep`` is released and stored, leaving one open premise."""
    s = Focused(gamma, focus, pol)
    if isinstance(focus, TopP):
        return LktProof(s, TopPRule())
    if isinstance(focus, Lit):
        if keep is not None and focus.lit == -keep:
            inner = Unfocused(gamma, (focus,), (), pol)
            stored = _open(gamma | {Lit(keep)}, pol)
            return LktProof(s, Release(), (LktProof(inner, Store(), (stored,)),))
        return LktProof(s, InitTheory())
    return LktProof(s, AndPRule(), (_focus_chain(gamma, pol, focus.left, keep),
                                     _focus_chain(gamma, pol, focus.right, keep)))


def _pick(pairing, clause: Clause, prefer=None) -> int:
    hits = [i for i, (c, _) in enumerate(pairing) if c == clause]
    if not hits:
        raise CorrespondenceViolation(f"no formula paired with {clause}")
    if prefer is not None:
        for i in hits:
            if prefer(pairing[i][1]):
                return i
    return hits[0]


def translate_step(node: Proof, corr: SeqCorrespondence,
                   theory: Theory) -> tuple[LktProof, list[SeqCorrespondence]]:
    """One LKDPLL inference → partial LK(T)p derivation.

    The open leaves of the returned tree, in pre-order, line up with the
    returned correspondences, which line up with ``node.premises``.
    """
    if corr.source != node.sequent:
        raise CorrespondenceViolation("correspondence is for a different sequent")
    rule = node.rule
    t = corr.target
    gamma, pol = t.gamma, t.pol
    prem = [p.sequent for p in node.premises]

    if isinstance(rule, lkd.Split):
        lo, hi = prem
        tree = LktProof(t, AnalyticCut(-rule.lit),
                        (_open(gamma | {Lit(-rule.lit)}, pol), _open(gamma | {Lit(rule.lit)}, pol)))
        corrs = [SeqCorrespondence(lo, tree.premises[0].sequent, corr.pairing, corr.extras),
                 SeqCorrespondence(hi, tree.premises[1].sequent, corr.pairing, corr.extras)]
        return tree, corrs

    if isinstance(rule, lkd.Assert):
        l = rule.lit
        i = _pick(corr.pairing, Clause([l]), prefer=lambda f: f == Lit(l))
        cp = corr.pairing[i][1]
        (nxt,) = prem
        if cp == Lit(l):
            return _open(gamma, pol), [SeqCorrespondence(nxt, t, corr.pairing, corr.extras)]
        pol2 = pol | {l}
        body = LktProof(Unfocused(gamma, (), (), pol2), Decide(negate_formula(cp)),
                        (_focus_chain(gamma, pol2, negate_formula(cp), l),))
        tree = body if l in pol else LktProof(t, Polarize(l), (body,))
        leaf = Unfocused(gamma | {Lit(l)}, (), (), pol2)
        return tree, [SeqCorrespondence(nxt, leaf, corr.pairing, corr.extras)]

    if isinstance(rule, lkd.Empty):
        if theory.unsat(atomic_members(gamma)):
            return LktProof(t, TheoryClose()), []
        i = _pick(corr.pairing, lkd.BOTTOM)
        cp = corr.pairing[i][1]
        focus = negate_formula(cp)
        return LktProof(t, Decide(focus), (_focus_chain(gamma, pol, focus, None),)), []

    if isinstance(rule, lkd.Resolve):
        (nxt,) = prem
        i = _pick(corr.pairing, rule.clause)
        pairing = list(corr.pairing)
        pairing[i] = (rule.rest, pairing[i][1])
        neg = -rule.lit
        if neg in pol:
            return _open(gamma, pol), [SeqCorrespondence(nxt, t, tuple(pairing), corr.extras)]
        leaf = Unfocused(gamma, (), (), pol | {neg})
        tree = LktProof(t, Polarize(neg), (LktProof(leaf),))
        return tree, [SeqCorrespondence(nxt, leaf, tuple(pairing), corr.extras)]

    if isinstance(rule, lkd.Subsume):
        (nxt,) = prem
        i = _pick(corr.pairing, rule.clause)
        pairing = list(corr.pairing)
        _, f = pairing.pop(i)
        extras = corr.extras if f in corr.extras else corr.extras + (f,)
        return _open(gamma, pol), [SeqCorrespondence(nxt, t, tuple(pairing), extras)]

    if isinstance(rule, lkd.Cut):
        left, right = prem
        gc = GeneralCut(tuple(rule.lits))
        lg = gamma | {Lit(l) for l in rule.lits}
        rg = gamma | {gc.formula}
        tree = LktProof(t, gc, (_open(lg, pol), _open(rg, pol)))
        lpair = corr.pairing + tuple((Clause([l]), Lit(l)) for l in rule.lits)
        rpair = corr.pairing + ((rule.clause, gc.formula),)
        return tree, [SeqCorrespondence(left, tree.premises[0].sequent, lpair, corr.extras),
                      SeqCorrespondence(right, tree.premises[1].sequent, rpair, corr.extras)]

    raise UntranslatableRule(f"{lkd.rule_name(rule)} has no translation; "
                             "eliminate admissible rules first")


def formula_symbols(f: Formula) -> int:
    if isinstance(f, (Lit, TopP, BotN)):
        return 1
    return 1 + formula_symbols(f.left) + formula_symbols(f.right)


@dataclass(frozen=True)
class TranslationRecord:
    rule: str
    emitted: int
    formula_count: int
    symbol_size: int

    @property
    def bound(self) -> int:
        return self.formula_count + 4

    @property
    def ok(self) -> bool:
        return self.emitted <= self.bound


@dataclass
class Translation:
    proof: LktProof
    log: list[TranslationRecord] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    @property
    def bound_ok(self) -> bool:
        return all(r.ok for r in self.log)


def _plug(tree: LktProof, subtrees: list[LktProof]) -> LktProof:
    it = iter(subtrees)

    def go(n: LktProof) -> LktProof:
        if n.is_open:
            sub = next(it)
            if sub.sequent != n.sequent:
                raise CorrespondenceViolation(f"subtree proves {sub.sequent}, expected {n.sequent}")
            return sub
        return LktProof(n.sequent, n.rule, tuple(go(p) for p in n.premises))

    out = go(tree)
    if next(it, None) is not None:
        raise CorrespondenceViolation("more subtrees than open leaves")
    return out


def translate_proof(tree: Proof, phi: ClauseSet, theory: Theory,
                    check_correspondence: bool = True) -> Translation:
    """Translate a complete base-rule (plus Cut) LKDPLL proof of ``⊢ φ``."""
    if tree.sequent != Sequent(frozenset(), phi):
        raise CorrespondenceViolation("tree does not prove the empty-context sequent for φ")
    lkd._recursion_headroom()
    out = Translation(proof=None)  # type: ignore[arg-type]

    def go(node: Proof, corr: SeqCorrespondence) -> LktProof:
        if node.is_open:
            raise UntranslatableRule("cannot translate an open leaf")
        if check_correspondence:
            why = corr.violation(theory)
            if why is not None:
                raise CorrespondenceViolation(f"at {node.sequent}: {why}")
        partial, corrs = translate_step(node, corr, theory)
        out.log.append(TranslationRecord(
            lkd.rule_name(node.rule), lkt_tree_size(partial), corr.target.formula_count,
            sum(formula_symbols(f) for f in corr.target.gamma)))
        subs = [go(p, c) for p, c in zip(node.premises, corrs)]
        return _plug(partial, subs)

    out.proof = go(tree, initial_correspondence(phi))
    return out
