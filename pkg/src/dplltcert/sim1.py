"""Simulating DPLL(T) runs by growing LKDPLL(T) partial proof trees.

A session pairs a DPLL state with a partial proof tree whose open leaves are
labelled by backtrack points of the trail.  Every rewrite step extends the
tree so that this correspondence is restored; when the run reaches UNSAT the
tree is complete.  Each replacement of an open leaf is logged with its
counted size and the bound it must respect.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

from . import lkdpll as lk
from .core import BOTTOM, Clause, ClauseSet, Literal, backpoints, backstrict, forget
from .dpll import (
    DEFAULT_LEMMA_BUDGET,
    UNSAT,
    Backtrack,
    Decide,
    DpllState,
    Fail,
    Restart,
    State,
    Step,
    TBackjump,
    TForget,
    TheoryPropagate,
    TLearn,
    UnitPropagate,
    UnsatState,
    apply_step,
    backjump_split,
    initial_state,
    negated_units,
    run,
)
from .lkdpll import Proof, Sequent
from .theory import Theory


class SimulationError(RuntimeError):
    pass


class NoMatchingLeaf(SimulationError):
    pass


class LemmaDischargeFailed(SimulationError):
    pass


@dataclass(frozen=True)
class SizeRecord:
    step_index: int
    rule: str
    delta: int           # counted size of one replacement subtree
    bound: int           # size(φ)+1 for basic steps, size(φ)+3 for advanced ones
    phi_size: int        # size of the clause set of the state before the step
    phi_size_without_clause: Optional[int] = None  # Fail/Backtrack: size(φ) minus the conflict clause

    @property
    def ok(self) -> bool:
        return self.delta <= self.bound


@dataclass(frozen=True)
class SimSession:
    state: DpllState
    tree: Proof
    clauses: ClauseSet
    theory: Theory
    log: tuple[SizeRecord, ...] = ()
    steps: int = 0
    lemma_budget: int = DEFAULT_LEMMA_BUDGET


@dataclass(frozen=True)
class SyncAction:
    """Maps each context in ``keys`` to a partial proof concluding ``Δ ⊢ φ``."""
    goal: ClauseSet
    bound: int
    trees: dict

    def __post_init__(self):
        for ctx, t in self.trees.items():
            if t.sequent != Sequent(ctx, self.goal):
                raise SimulationError(f"sync tree for {set(ctx)} concludes {t.sequent}")
            if lk.tree_size(t) > self.bound:
                raise SimulationError(f"sync tree for {set(ctx)} exceeds bound {self.bound}")


def init_session(phi: ClauseSet, theory: Theory,
                 lemma_budget: int = DEFAULT_LEMMA_BUDGET) -> SimSession:
    return SimSession(initial_state(phi), lk.open_leaf(Sequent(frozenset(), phi)),
                      phi, theory, lemma_budget=lemma_budget)


def correspondence_holds(tree: Proof, state: DpllState) -> bool:
    leaves = lk.open_leaves(tree)
    if isinstance(state, UnsatState):
        return not leaves
    allowed = {Sequent(d, state.clauses) for d in backpoints(state.trail)}
    return all(leaf.sequent in allowed for leaf in leaves)


def replace_open_leaves(tree: Proof, choose: Callable[[Sequent], Optional[Proof]]) -> tuple[Proof, int]:
    """Replace every open leaf for which ``choose`` returns a tree.

    Untouched subtrees are shared with the input.  Returns the new tree and
    the number of leaves replaced.
    """
    replaced = 0

    def go(n: Proof) -> Proof:
        nonlocal replaced
        if n.is_open:
            sub = choose(n.sequent)
            if sub is None:
                return n
            replaced += 1
            return sub
        if not n.premises:
            return n
        prems = tuple(go(p) for p in n.premises)
        if all(a is b for a, b in zip(prems, n.premises)):
            return n
        return Proof(n.sequent, n.rule, prems)

    return go(tree), replaced


# -- basic steps ------------------------------------------------------------

def _resolve_chain(delta: frozenset[Literal], base: ClauseSet, lits: Sequence[Literal],
                   tail: Clause, top: Proof) -> Proof:
    """Resolve away ``lits`` (in order) from ``lits ∨ tail`` down to ``top``,
    which must conclude ``Δ ⊢ base, tail``."""
    tree = top
    for i in reversed(range(len(lits))):
        rest = Clause(list(lits[i + 1:]) + list(tail))
        tree = Proof(Sequent(delta, base.add(rest.add(lits[i]))), lk.Resolve(lits[i], rest), (tree,))
    return tree


def _weak2(concl_ctx: frozenset[Literal], prem: Proof) -> Proof:
    return Proof(Sequent(concl_ctx, prem.sequent.goal), lk.Weak2(prem.sequent.context), (prem,))


def basic_replacement(state: State, step: Step, theory: Theory) -> Proof:
    """The subtree that replaces the leaf ``forget(Δ) ⊢ φ`` for a basic step."""
    delta = forget(state.trail)
    phi = state.clauses
    consistent = theory.consistent

    if isinstance(step, (Fail, Backtrack)):
        c = phi[step.clause]
        return lk.build_lgt(delta, c, phi.remove_at(step.clause), theory)

    if isinstance(step, Decide):
        l = step.lit
        if not consistent(delta | {l}):
            return _weak2(delta, lk.open_leaf(Sequent(delta | {-l}, phi)))
        if not consistent(delta | {-l}):
            return _weak2(delta, lk.open_leaf(Sequent(delta | {l}, phi)))
        return lk.node(Sequent(delta, phi), lk.Split(l),
                       lk.open_leaf(Sequent(delta | {-l}, phi)),
                       lk.open_leaf(Sequent(delta | {l}, phi)))

    if isinstance(step, UnitPropagate):
        l = step.lit
        c = phi[step.clause]
        if not consistent(delta | {-l}):
            return _weak2(delta, lk.open_leaf(Sequent(delta | {l}, phi)))
        base = phi.remove_at(step.clause)
        if not consistent(delta | {l}):
            return lk.build_lgt(delta, c, base, theory)
        others = list(c.remove(l))
        unit = Clause([l])
        # Δ,l ⊢ base, l  ⇐ InvResolve* ⇐  Δ,l ⊢ base, C∨l (open)
        dl = delta | {l}
        inner = lk.open_leaf(Sequent(dl, phi))
        for i in range(len(others)):
            rest = Clause(others[i + 1:] + [l])
            inner = Proof(Sequent(dl, base.add(rest)), lk.InvResolve(others[i], rest), (inner,))
        asserted = Proof(Sequent(delta, base.add(unit)), lk.Assert(l), (inner,))
        return _resolve_chain(delta, base, others, unit, asserted)

    if isinstance(step, TheoryPropagate):
        return _weak2(delta, lk.open_leaf(Sequent(delta | {step.lit}, phi)))

    raise SimulationError(f"not a basic step: {step}")


def extend_basic(session: SimSession, step: Step) -> SimSession:
    state = session.state
    if isinstance(state, UnsatState):
        raise SimulationError("session already UNSAT")
    new_state = apply_step(state, step, session.theory, session.lemma_budget)
    target = Sequent(forget(state.trail), state.clauses)
    sub = basic_replacement(state, step, session.theory)
    tree, n = replace_open_leaves(session.tree, lambda s: sub if s == target else None)
    if n == 0 and not correspondence_holds(tree, new_state) \
            and isinstance(step, (Fail, Backtrack)):
        raise NoMatchingLeaf(f"no open leaf {target} for {step}")
    phi_size = state.clauses.size
    size = lk.tree_size(sub)
    without = None
    if isinstance(step, (Fail, Backtrack)):
        without = phi_size - len(state.clauses[step.clause])
    records = tuple(SizeRecord(session.steps, type(step).__name__, size, phi_size + 1,
                               phi_size, without) for _ in range(n))
    return replace(session, state=new_state, tree=tree, log=session.log + records,
                   steps=session.steps + 1)


# -- advanced steps ---------------------------------------------------------

def discharge_theory_lemma(goal: ClauseSet, theory: Theory,
                           budget: int = DEFAULT_LEMMA_BUDGET,
                           context: frozenset[Literal] = frozenset()) -> Proof:
    """Complete proof of ``context ⊢ goal`` for a T-unsatisfiable ``goal``.

    Runs the basic solver on ``goal``, simulates the run, and grafts the
    resulting proof of ``∅ ⊢ goal`` under a Weak2 to ``context``.
    """
    res = run(goal, theory, budget)
    if res.status == "LIMIT":
        raise LemmaDischargeFailed(f"budget {budget} exhausted on {goal}")
    if res.status == "SAT":
        raise LemmaDischargeFailed(f"lemma goal is satisfiable: {goal}")
    session = init_session(goal, theory, budget)
    for step in res.trace:
        session = extend_basic(session, step)
    if not lk.is_complete(session.tree):
        raise LemmaDischargeFailed("simulation of the refutation left open leaves")
    return _weak2(frozenset(context), session.tree)


def _backjump_action(state: State, step: TBackjump, theory: Theory, budget: int,
                     keys: set[frozenset[Literal]]) -> SyncAction:
    phi = state.clauses
    pos = backjump_split(state, step)
    d1 = forget(state.trail[:pos])
    cp, l_bj = step.backjump_clause, step.lit
    lemma = cp.add(l_bj)
    cut = lk.Cut(tuple(-m for m in lemma))
    bound = phi.size + 3

    if theory.entails(d1, l_bj):
        leaf = lk.open_leaf(Sequent(d1 | {l_bj}, phi))
        return SyncAction(phi, bound, {k: _weak2(k, leaf) for k in keys})

    left_goal = phi.add(*negated_units(lemma))
    left = discharge_theory_lemma(left_goal, theory, budget, context=d1)
    if theory.entails(d1, -l_bj):
        right = lk.build_lgt(d1, lemma, phi, theory)
    else:
        unit = Clause([l_bj])
        subsumed = Proof(Sequent(d1 | {l_bj}, phi.add(unit)), lk.Subsume(l_bj, BOTTOM),
                         (lk.open_leaf(Sequent(d1 | {l_bj}, phi)),))
        asserted = Proof(Sequent(d1, phi.add(unit)), lk.Assert(l_bj), (subsumed,))
        right = _resolve_chain(d1, phi, list(cp), unit, asserted)
    cut_tree = Proof(Sequent(d1, phi), cut, (left, right))
    return SyncAction(phi, bound, {k: _weak2(k, cut_tree) for k in keys})


def _learn_action(state: State, step: TLearn, theory: Theory, budget: int,
                  keys: set[frozenset[Literal]]) -> SyncAction:
    phi = state.clauses
    c = step.clause
    cut = lk.Cut(tuple(-m for m in c))
    lemma = discharge_theory_lemma(phi.add(*negated_units(c)), theory, budget)
    trees = {}
    for k in keys:
        left = _weak2(k, lemma.premises[0])
        right = lk.open_leaf(Sequent(k, phi.add(c)))
        trees[k] = Proof(Sequent(k, phi), cut, (left, right))
    return SyncAction(phi, phi.size + 3, trees)


def advanced_action(state: State, step: Step, theory: Theory, budget: int) -> SyncAction:
    phi = state.clauses
    points = set(backpoints(state.trail))
    if isinstance(step, TBackjump):
        pos = backjump_split(state, step)
        keys = points - set(backstrict(state.trail[:pos]))
        return _backjump_action(state, step, theory, budget, keys)
    if isinstance(step, TLearn):
        return _learn_action(state, step, theory, budget, points)
    if isinstance(step, TForget):
        c = phi[step.clause]
        rest = phi.remove_at(step.clause)
        return SyncAction(phi, phi.size + 3, {
            k: Proof(Sequent(k, phi), lk.Weak1(c), (lk.open_leaf(Sequent(k, rest)),))
            for k in points})
    if isinstance(step, Restart):
        root = lk.open_leaf(Sequent(frozenset(), phi))
        return SyncAction(phi, phi.size + 3, {k: _weak2(k, root) for k in points})
    raise SimulationError(f"not an advanced step: {step}")


def extend_advanced(session: SimSession, step: Step) -> SimSession:
    state = session.state
    if isinstance(state, UnsatState):
        raise SimulationError("session already UNSAT")
    new_state = apply_step(state, step, session.theory, session.lemma_budget)
    action = advanced_action(state, step, session.theory, session.lemma_budget)
    goal = action.goal
    sizes: list[int] = []

    def choose(s: Sequent) -> Optional[Proof]:
        if s.goal == goal and s.context in action.trees:
            t = action.trees[s.context]
            sizes.append(lk.tree_size(t))
            return t
        return None

    tree, _ = replace_open_leaves(session.tree, choose)
    phi_size = state.clauses.size
    records = tuple(SizeRecord(session.steps, type(step).__name__, d, action.bound, phi_size)
                    for d in sizes)
    return replace(session, state=new_state, tree=tree, log=session.log + records,
                   steps=session.steps + 1)


def extend(session: SimSession, step: Step) -> SimSession:
    if isinstance(step, (TBackjump, TLearn, TForget, Restart)):
        return extend_advanced(session, step)
    return extend_basic(session, step)


def simulate(phi: ClauseSet, trace: Sequence[Step], theory: Theory,
             lemma_budget: int = DEFAULT_LEMMA_BUDGET,
             on_step: Optional[Callable[[SimSession], None]] = None) -> SimSession:
    """Run the whole trace through the simulation; ``on_step`` sees every session."""
    lk._recursion_headroom()
    session = init_session(phi, theory, lemma_budget)
    for step in trace:
        session = extend(session, step)
        if on_step is not None:
            on_step(session)
    return session


def certify_unsat(phi: ClauseSet, trace: Sequence[Step], theory: Theory,
                  lemma_budget: int = DEFAULT_LEMMA_BUDGET) -> Proof:
    """Complete LKDPLL(T) proof of ``∅ ⊢ φ`` from a refuting trace."""
    return certify_unsat_session(phi, trace, theory, lemma_budget).tree


def certify_unsat_session(phi: ClauseSet, trace: Sequence[Step], theory: Theory,
                          lemma_budget: int = DEFAULT_LEMMA_BUDGET) -> SimSession:
    session = simulate(phi, trace, theory, lemma_budget)
    if session.state is not UNSAT:
        raise SimulationError("trace does not end in UNSAT")
    if not lk.is_complete(session.tree):
        raise SimulationError("UNSAT reached but the proof tree has open leaves")
    return session
