"""The DPLL(T) transition system.

States are ``Δ ∥ φ`` (a trail and a clause set) or UNSAT.  ``apply_step``
validates every side condition of a rule literally before rewriting; the
entailment premises of T-Backjump, T-Learn and T-Forget are certified by a
bounded recursive run of the basic solver instead of being trusted.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .core import (
    Clause,
    ClauseSet,
    Literal,
    Trail,
    atoms,
    close_under_negation,
    forget,
)
from .theory import Theory

DEFAULT_LEMMA_BUDGET = 10_000


# -- steps -----------------------------------------------------------------

@dataclass(frozen=True)
class Fail:
    clause: int

    def __str__(self) -> str:
        return f"fail {self.clause}"


@dataclass(frozen=True)
class Decide:
    lit: Literal

    def __str__(self) -> str:
        return f"decide {self.lit}"


@dataclass(frozen=True)
class Backtrack:
    clause: int

    def __str__(self) -> str:
        return f"backtrack {self.clause}"


@dataclass(frozen=True)
class UnitPropagate:
    clause: int
    lit: Literal

    def __str__(self) -> str:
        return f"unit {self.clause} {self.lit}"


@dataclass(frozen=True)
class TheoryPropagate:
    lit: Literal

    def __str__(self) -> str:
        return f"tprop {self.lit}"


@dataclass(frozen=True)
class TBackjump:
    """Backjump on conflict clause ``clause`` with lemma ``backjump_clause ∨ lit``.

    ``level`` is the number of decision literals kept; ``None`` selects the
    lowest level at which the side conditions hold.
    """
    clause: int
    backjump_clause: Clause
    lit: Literal
    level: Optional[int] = None

    def __str__(self) -> str:
        cp = " ".join(str(l) for l in self.backjump_clause)
        s = f"backjump {self.clause} [{cp}] {self.lit}"
        return s if self.level is None else f"{s} {self.level}"


@dataclass(frozen=True)
class TLearn:
    clause: Clause

    def __str__(self) -> str:
        return "learn [" + " ".join(str(l) for l in self.clause) + "]"


@dataclass(frozen=True)
class TForget:
    clause: int

    def __str__(self) -> str:
        return f"forget {self.clause}"


@dataclass(frozen=True)
class Restart:
    def __str__(self) -> str:
        return "restart"


Step = Union[Fail, Decide, Backtrack, UnitPropagate, TheoryPropagate,
             TBackjump, TLearn, TForget, Restart]
BASIC_STEPS = (Fail, Decide, Backtrack, UnitPropagate, TheoryPropagate)
ADVANCED_STEPS = (TBackjump, TLearn, TForget, Restart)


# -- states ----------------------------------------------------------------

@dataclass(frozen=True)
class State:
    trail: Trail
    clauses: ClauseSet

    def __str__(self) -> str:
        return f"{self.trail} ∥ {self.clauses}"


class UnsatState:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNSAT"

    __str__ = __repr__


UNSAT = UnsatState()
DpllState = Union[State, UnsatState]


def initial_state(phi: ClauseSet) -> State:
    return State(Trail(), phi)


class SideConditionViolated(Exception):
    def __init__(self, step: Step, condition: str, index: Optional[int] = None):
        self.step = step
        self.condition = condition
        self.index = index
        where = f"step {index} " if index is not None else ""
        super().__init__(f"{where}({step}): {condition}")


class StateAlreadyUnsat(Exception):
    pass


# -- side-condition helpers -------------------------------------------------

def falsified(clause: Clause, lits: frozenset[Literal]) -> bool:
    """Propositional falsification: every literal's negation is in ``lits``."""
    return all(-l in lits for l in clause)


def satisfied(clause: Clause, lits: frozenset[Literal]) -> bool:
    return any(l in lits for l in clause)


def negated_units(clause: Clause) -> tuple[Clause, ...]:
    return tuple(Clause([-l]) for l in clause)


def certify_entailment(phi: ClauseSet, clause: Clause, theory: Theory,
                       budget: int = DEFAULT_LEMMA_BUDGET) -> Optional[bool]:
    """Decide ``phi ⊨_T clause`` by running the basic solver on ``phi, ¬clause``.

    Returns None when the budget runs out.
    """
    res = run(phi.add(*negated_units(clause)), theory, budget)
    if res.status == "LIMIT":
        return None
    return res.status == "UNSAT"


def _clause_at(state: State, step: Step, i: int) -> Clause:
    if not 0 <= i < len(state.clauses):
        raise SideConditionViolated(step, f"clause index {i} out of range")
    return state.clauses[i]


def _require(cond: bool, step: Step, what: str) -> None:
    if not cond:
        raise SideConditionViolated(step, what)


def _entailment(phi: ClauseSet, clause: Clause, theory: Theory, budget: int,
                step: Step, what: str) -> None:
    verdict = certify_entailment(phi, clause, theory, budget)
    _require(verdict is not None, step, f"{what}: not certified within budget {budget}")
    _require(verdict, step, f"{what}: not entailed")


def backjump_split(state: State, step: TBackjump) -> int:
    """Position of the decision literal ``lᵈ`` in ``Δ₁, lᵈ, Δ₂`` for ``step``."""
    trail = state.trail
    dpos = trail.decision_positions()
    _require(bool(dpos), step, "no decision literal to backjump over")
    lits_cp = step.backjump_clause

    def ok(pos: int) -> bool:
        prefix = forget(trail[:pos])
        return (falsified(lits_cp, prefix)
                and step.lit not in prefix and -step.lit not in prefix)

    if step.level is not None:
        _require(0 <= step.level < len(dpos), step, f"backjump level {step.level} out of range")
        return dpos[step.level]
    for pos in dpos:
        if ok(pos):
            return pos
    raise SideConditionViolated(step, "no decision level satisfies conditions (2) and (4)")


# -- the rewrite relation ---------------------------------------------------

def apply_step(state: DpllState, step: Step, theory: Theory,
               lemma_budget: int = DEFAULT_LEMMA_BUDGET) -> DpllState:
    if isinstance(state, UnsatState):
        raise StateAlreadyUnsat(str(step))
    trail, phi = state.trail, state.clauses
    lits = forget(trail)

    if isinstance(step, Fail):
        c = _clause_at(state, step, step.clause)
        _require(falsified(c, lits), step, "clause not falsified by the trail")
        _require(trail.level == 0, step, "trail contains a decision literal")
        return UNSAT

    if isinstance(step, Decide):
        l = step.lit
        _require(not trail.assigned(l), step, f"{l} already assigned")
        _require(l in atoms(phi), step, f"{l} not in atoms(φ)")
        return State(trail.push(l, decision=True), phi)

    if isinstance(step, Backtrack):
        c = _clause_at(state, step, step.clause)
        _require(falsified(c, lits), step, "clause not falsified by the trail")
        dpos = trail.decision_positions()
        _require(bool(dpos), step, "no decision literal on the trail")
        last = dpos[-1]
        flipped = -trail[last].lit
        return State(trail[:last].push(flipped), phi)

    if isinstance(step, UnitPropagate):
        c = _clause_at(state, step, step.clause)
        l = step.lit
        _require(l in c, step, f"{l} not in clause {step.clause}")
        _require(falsified(c.remove(l), lits), step, "rest of clause not falsified")
        _require(not trail.assigned(l), step, f"{l} already assigned")
        return State(trail.push(l), phi)

    if isinstance(step, TheoryPropagate):
        l = step.lit
        _require(not trail.assigned(l), step, f"{l} already assigned")
        _require(l in atoms(phi), step, f"{l} not in atoms(φ)")
        _require(theory.entails(lits, l), step, f"trail does not entail {l}")
        return State(trail.push(l), phi)

    if isinstance(step, TBackjump):
        c = _clause_at(state, step, step.clause)
        _require(falsified(c, lits), step, "(1) conflict clause not falsified")
        pos = backjump_split(state, step)
        prefix = trail[:pos]
        plits = forget(prefix)
        cp, l_bj = step.backjump_clause, step.lit
        _require(falsified(cp, plits), step, "(2) backjump clause not falsified by Δ₁")
        _require(atoms([cp]) <= atoms(phi), step, "atoms of backjump clause not in atoms(φ)")
        _require(l_bj not in plits and -l_bj not in plits, step, "(4) backjump literal assigned in Δ₁")
        _require(l_bj in atoms(phi) | close_under_negation(lits), step,
                 "(4) backjump literal not in atoms(φ, Δ)")
        _entailment(phi, cp.add(l_bj), theory, lemma_budget, step, "(3) φ ⊨ C'∨l")
        return State(prefix.push(l_bj), phi)

    if isinstance(step, TLearn):
        c = step.clause
        _require(atoms([c]) <= atoms(phi) | close_under_negation(lits), step,
                 "learned clause mentions atoms outside φ and Δ")
        _entailment(phi, c, theory, lemma_budget, step, "φ ⊨ C")
        return State(trail, phi.add(c))

    if isinstance(step, TForget):
        c = _clause_at(state, step, step.clause)
        rest = phi.remove_at(step.clause)
        _entailment(rest, c, theory, lemma_budget, step, "φ∖C ⊨ C")
        return State(trail, rest)

    if isinstance(step, Restart):
        return State(Trail(), phi)

    raise TypeError(f"not a DPLL step: {step!r}")


# -- strategies -------------------------------------------------------------

Strategy = Callable[[State, Theory], Optional[Step]]


class StrategyStuck(RuntimeError):
    pass


def first_conflict(state: State) -> Optional[int]:
    lits = forget(state.trail)
    for i, c in enumerate(state.clauses):
        if falsified(c, lits):
            return i
    return None


def default_strategy_next(state: State, theory: Theory,
                          rng: Optional[random.Random] = None) -> Optional[Step]:
    """Deterministic priority Fail > Backtrack > UnitPropagate > TheoryPropagate > Decide.

    Unit propagation skips literals the theory already refutes, so that the
    trail stays T-consistent; the refuting theory propagation fires instead.
    With ``rng`` the Decide phase is drawn at random.
    """
    trail, phi = state.trail, state.clauses
    lits = forget(trail)

    conflict = first_conflict(state)
    if conflict is not None:
        return Fail(conflict) if trail.level == 0 else Backtrack(conflict)

    if all(satisfied(c, lits) for c in phi) and theory.consistent(lits):
        return None

    for i, c in enumerate(phi):
        if satisfied(c, lits):
            continue
        open_lits = [l for l in c if -l not in lits]
        if len(open_lits) == 1 and theory.consistent(lits | {open_lits[0]}):
            return UnitPropagate(i, open_lits[0])

    assigned = {l.atom for l in lits}
    free_atoms = sorted({l.atom for l in atoms(phi)} - assigned)
    for a in free_atoms:
        for l in (Literal(a, True), Literal(a, False)):
            if theory.entails(lits, l):
                return TheoryPropagate(l)

    if free_atoms:
        positive = True if rng is None else rng.random() < 0.5
        return Decide(Literal(free_atoms[0], positive))
    raise StrategyStuck(f"no rule applies to {state}")


class LearningStrategy:
    """Backjumping strategy that also learns, restarts and forgets.

    On a conflict below the root it learns ``¬d₁ ∨ … ∨ ¬d_k ∨ ¬d`` where
    ``d`` is the last decision and ``d₁…d_k`` the shortest prefix of earlier
    decisions for which the lemma is certified, then backjumps to level k.
    After each backjump it restarts (``restarts`` times in total) and, after
    a restart, forgets the most recently learned clause if ``forget``.
    """

    def __init__(self, restarts: int = 1, forget_learned: bool = True,
                 budget: int = DEFAULT_LEMMA_BUDGET):
        self.restarts_left = restarts
        self.forget_learned = forget_learned
        self.budget = budget
        self._restart_due = False
        self._forget_due = False
        self._learned: list[Clause] = []

    def __call__(self, state: State, theory: Theory) -> Optional[Step]:
        trail, phi = state.trail, state.clauses
        conflict = first_conflict(state)
        if conflict is not None and trail.level > 0:
            decisions = [trail[p].lit for p in trail.decision_positions()]
            l_bj = -decisions[-1]
            for k in range(len(decisions)):
                cp = Clause(-d for d in decisions[:k])
                lemma = cp.add(l_bj)
                if certify_entailment(phi, lemma, theory, self.budget):
                    break
            if lemma not in phi.clauses:
                self._learned.append(lemma)
                return TLearn(lemma)
            self._restart_due = True
            return TBackjump(conflict, cp, l_bj, level=k)
        if conflict is None:
            if self._restart_due and self.restarts_left > 0:
                self._restart_due = False
                self.restarts_left -= 1
                self._forget_due = self.forget_learned
                return Restart()
            if self._forget_due and self._learned:
                self._forget_due = False
                lemma = self._learned.pop()
                if lemma in phi.clauses:
                    idx = len(phi.clauses) - 1 - phi.clauses[::-1].index(lemma)
                    return TForget(idx)
        return default_strategy_next(state, theory)


# -- driving ----------------------------------------------------------------

@dataclass(frozen=True)
class RunResult:
    status: str  # "SAT", "UNSAT" or "LIMIT"
    trace: tuple[Step, ...]
    final: DpllState
    model: Optional[frozenset[Literal]] = None


def run(phi: ClauseSet, theory: Theory, step_limit: int = 100_000,
        strategy: Optional[Strategy] = None,
        lemma_budget: int = DEFAULT_LEMMA_BUDGET) -> RunResult:
    if step_limit <= 0:
        raise ValueError("step_limit must be positive")
    choose = strategy or default_strategy_next
    state: DpllState = initial_state(phi)
    trace: list[Step] = []
    while True:
        if isinstance(state, UnsatState):
            return RunResult("UNSAT", tuple(trace), state)
        step = choose(state, theory)
        if step is None:
            return RunResult("SAT", tuple(trace), state, forget(state.trail))
        if len(trace) >= step_limit:
            return RunResult("LIMIT", tuple(trace), state)
        state = apply_step(state, step, theory, lemma_budget)
        trace.append(step)


def replay(phi: ClauseSet, trace: Sequence[Step], theory: Theory,
           lemma_budget: int = DEFAULT_LEMMA_BUDGET) -> DpllState:
    state: DpllState = initial_state(phi)
    for i, step in enumerate(trace):
        try:
            state = apply_step(state, step, theory, lemma_budget)
        except SideConditionViolated as e:
            raise SideConditionViolated(e.step, e.condition, i) from None
        except StateAlreadyUnsat:
            raise SideConditionViolated(step, "state already UNSAT", i) from None
    return state
