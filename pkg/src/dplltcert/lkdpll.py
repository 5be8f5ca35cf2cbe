"""The sequent calculus LKDPLL(T) and its extensions.

Sequents are ``Δ ⊢ φ``: a set of literals and a multiset of clauses.  The
base rules are Split, Empty, Assert, Subsume and Resolve.  The dashed rules
Weak1, Weak2 and InvResolve are admissible (``eliminate_admissible`` removes
them) and are not counted in the size of a proof; Cut is counted, but its
left (lemma) branch is not.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from .core import BOTTOM, Clause, ClauseSet, Literal, atoms
from .theory import Theory, nsat


@dataclass(frozen=True)
class Sequent:
    context: frozenset[Literal]
    goal: ClauseSet

    def __str__(self) -> str:
        ctx = ", ".join(str(l) for l in sorted(self.context)) or "∅"
        return f"{ctx} ⊢ {self.goal}"


def sequent(context: Iterable[Literal], goal: ClauseSet) -> Sequent:
    return Sequent(frozenset(context), goal)


# -- rules ------------------------------------------------------------------

@dataclass(frozen=True)
class Split:
    lit: Literal


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Assert:
    lit: Literal


@dataclass(frozen=True)
class Subsume:
    """Acts on the clause ``lit ∨ rest``."""
    lit: Literal
    rest: Clause

    @property
    def clause(self) -> Clause:
        return self.rest.add(self.lit)


@dataclass(frozen=True)
class Resolve:
    """Acts on the clause ``lit ∨ rest``."""
    lit: Literal
    rest: Clause

    @property
    def clause(self) -> Clause:
        return self.rest.add(self.lit)


@dataclass(frozen=True)
class Weak1:
    clause: Clause


@dataclass(frozen=True)
class Weak2:
    """Conclusion ``Δ' ⊢ φ`` from premise ``source ⊢ φ``."""
    source: frozenset[Literal]


@dataclass(frozen=True)
class InvResolve:
    """Conclusion ``Δ ⊢ φ, rest`` from premise ``Δ ⊢ φ, lit ∨ rest``."""
    lit: Literal
    rest: Clause

    @property
    def clause(self) -> Clause:
        return self.rest.add(self.lit)


@dataclass(frozen=True)
class Cut:
    """Premises ``Δ ⊢ φ, l₁, …, lₙ`` (the lemma branch) and ``Δ ⊢ φ, ¬l₁ ∨ … ∨ ¬lₙ``."""
    lits: tuple[Literal, ...]

    @property
    def clause(self) -> Clause:
        return Clause(-l for l in self.lits)


Rule = Union[Split, Empty, Assert, Subsume, Resolve, Weak1, Weak2, InvResolve, Cut]
BASE_RULES = (Split, Empty, Assert, Subsume, Resolve)
DASHED_RULES = (Weak1, Weak2, InvResolve)
ALL_RULES = BASE_RULES + DASHED_RULES + (Cut,)

ARITY = {Split: 2, Empty: 0, Assert: 1, Subsume: 1, Resolve: 1,
         Weak1: 1, Weak2: 1, InvResolve: 1, Cut: 2}


def rule_name(rule: Rule) -> str:
    return type(rule).__name__


class RuleMismatch(ValueError):
    pass


def premises_of(concl: Sequent, rule: Rule) -> tuple[Sequent, ...]:
    """The premises forced by applying ``rule`` backwards to ``concl``.

    Raises RuleMismatch when the conclusion does not have the rule's shape
    (side conditions are *not* checked here).
    """
    ctx, goal = concl.context, concl.goal
    try:
        if isinstance(rule, Split):
            return (Sequent(ctx | {-rule.lit}, goal), Sequent(ctx | {rule.lit}, goal))
        if isinstance(rule, Empty):
            if BOTTOM not in goal:
                raise RuleMismatch("goal has no empty clause")
            return ()
        if isinstance(rule, Assert):
            if Clause([rule.lit]) not in goal:
                raise RuleMismatch(f"goal has no unit clause {rule.lit}")
            return (Sequent(ctx | {rule.lit}, goal),)
        if isinstance(rule, Subsume):
            return (Sequent(ctx, goal.remove(rule.clause)),)
        if isinstance(rule, Resolve):
            return (Sequent(ctx, goal.replace(rule.clause, rule.rest)),)
        if isinstance(rule, Weak1):
            return (Sequent(ctx, goal.remove(rule.clause)),)
        if isinstance(rule, Weak2):
            return (Sequent(rule.source, goal),)
        if isinstance(rule, InvResolve):
            return (Sequent(ctx, goal.replace(rule.rest, rule.clause)),)
        if isinstance(rule, Cut):
            units = tuple(Clause([l]) for l in rule.lits)
            return (Sequent(ctx, goal.add(*units)), Sequent(ctx, goal.add(rule.clause)))
    except ValueError as e:
        if isinstance(e, RuleMismatch):
            raise
        raise RuleMismatch(f"goal lacks the clause {rule_name(rule)} acts on") from None
    raise TypeError(f"not an LKDPLL rule: {rule!r}")


# -- proof trees ------------------------------------------------------------

@dataclass(frozen=True)
class Proof:
    """A node of a partial proof tree; ``rule is None`` marks an open leaf."""
    sequent: Sequent
    rule: Optional[Rule] = None
    premises: tuple["Proof", ...] = ()

    @property
    def is_open(self) -> bool:
        return self.rule is None

    def __iter__(self) -> Iterator["Proof"]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.premises))


def open_leaf(s: Sequent) -> Proof:
    return Proof(s)


def node(s: Sequent, rule: Rule, *premises: Proof) -> Proof:
    return Proof(s, rule, tuple(premises))


def open_leaves(tree: Proof) -> list[Proof]:
    return [n for n in tree if n.is_open]


def is_complete(tree: Proof) -> bool:
    return not any(n.is_open for n in tree)


def tree_size(tree: Proof) -> int:
    """Counted size: rule nodes other than Weak1/Weak2/InvResolve, skipping
    open leaves and the whole left branch of every Cut."""
    count = 0
    stack = [tree]
    while stack:
        n = stack.pop()
        if n.is_open:
            continue
        if not isinstance(n.rule, DASHED_RULES):
            count += 1
        if isinstance(n.rule, Cut):
            stack.append(n.premises[1])
        else:
            stack.extend(n.premises)
    return count


def count_rules(tree: Proof) -> dict[str, int]:
    out: dict[str, int] = {}
    for n in tree:
        key = "open" if n.is_open else rule_name(n.rule)
        out[key] = out.get(key, 0) + 1
    return out


# -- checking ---------------------------------------------------------------

def rule_violation(concl: Sequent, rule: Rule, premises: list[Sequent],
                   theory: Theory) -> Optional[str]:
    """Why ``premises / concl`` is not an instance of ``rule``; None if it is."""
    arity = ARITY.get(type(rule))
    if arity is None:
        return f"unknown rule {rule!r}"
    if len(premises) != arity:
        return f"{rule_name(rule)} expects {arity} premises, got {len(premises)}"
    try:
        expected = premises_of(concl, rule)
    except RuleMismatch as e:
        return str(e)
    for i, (got, want) in enumerate(zip(premises, expected)):
        if got != want:
            return f"premise {i} is {got}, expected {want}"

    ctx, goal = concl.context, concl.goal
    consistent = theory.consistent
    if isinstance(rule, Split):
        l = rule.lit
        if l not in atoms(goal):
            return f"{l} not in atoms(φ)"
        if not consistent(ctx | {-l}):
            return f"Δ,{-l} inconsistent"
        if not consistent(ctx | {l}):
            return f"Δ,{l} inconsistent"
    elif isinstance(rule, Assert):
        l = rule.lit
        if not consistent(ctx | {-l}):
            return f"Δ,{-l} inconsistent"
        if not consistent(ctx | {l}):
            return f"Δ,{l} inconsistent"
    elif isinstance(rule, Subsume):
        if consistent(ctx | {-rule.lit}):
            return f"Δ,{-rule.lit} consistent"
    elif isinstance(rule, (Resolve, InvResolve)):
        if consistent(ctx | {rule.lit}):
            return f"Δ,{rule.lit} consistent"
    elif isinstance(rule, Weak2):
        if not nsat(rule.source, goal, theory) <= nsat(ctx, goal, theory):
            return "nsat(premise) ⊄ nsat(conclusion)"
    return None


def check_rule_instance(concl: Sequent, rule: Rule, premises: list[Sequent],
                        theory: Theory) -> bool:
    return rule_violation(concl, rule, premises, theory) is None


def tree_violation(tree: Proof, theory: Theory, allowed: tuple[type, ...] = ALL_RULES,
                   complete: bool = False) -> Optional[str]:
    for n in tree:
        if n.is_open:
            if complete:
                return f"open leaf {n.sequent}"
            continue
        if not isinstance(n.rule, allowed):
            return f"rule {rule_name(n.rule)} not allowed at {n.sequent}"
        why = rule_violation(n.sequent, n.rule, [p.sequent for p in n.premises], theory)
        if why is not None:
            return f"{rule_name(n.rule)} at {n.sequent}: {why}"
    return None


def check_tree(tree: Proof, theory: Theory, allowed: tuple[type, ...] = ALL_RULES,
               complete: bool = False) -> bool:
    """Every non-open node is a valid instance of an allowed rule.

    Closed leaves are zero-premise rule nodes by construction.  With
    ``complete`` open leaves are rejected as well.
    """
    return tree_violation(tree, theory, allowed, complete) is None


# -- constructions ----------------------------------------------------------

class PreconditionError(ValueError):
    pass


def build_lgt(delta: Iterable[Literal], c: Clause, phi: ClauseSet,
              theory: Theory) -> Proof:
    """Complete proof of ``Δ ⊢ φ, C`` when ``Δ`` refutes every literal of ``C``:
    one Resolve per literal, then Empty.  Counted size ``|C| + 1``."""
    delta = frozenset(delta)
    for l in c:
        if not theory.entails(delta, -l):
            raise PreconditionError(f"Δ does not refute {l}")
    lits = list(c)
    rests = [Clause(lits[i + 1:]) for i in range(len(lits))]
    tree = Proof(Sequent(delta, phi.add(BOTTOM)), Empty())
    for l, rest in zip(reversed(lits), reversed(rests)):
        tree = Proof(Sequent(delta, phi.add(rest.add(l))), Resolve(l, rest), (tree,))
    return tree


# -- elimination of the admissible rules -----------------------------------

class EliminationError(ValueError):
    pass


def _recursion_headroom(depth: int = 50_000) -> None:
    if sys.getrecursionlimit() < depth:
        sys.setrecursionlimit(depth)


def _with_goal(tree: Proof, goal: ClauseSet) -> Sequent:
    return Sequent(tree.sequent.context, goal)


def weaken1(tree: Proof, c: Clause) -> Proof:
    """Add ``c`` to every goal of a base-rule (or Cut) proof."""
    s = tree.sequent
    new_s = Sequent(s.context, s.goal.add(c))
    if tree.is_open:
        raise EliminationError("open leaf below Weak1")
    return Proof(new_s, tree.rule, tuple(weaken1(p, c) for p in tree.premises))


def weaken2(tree: Proof, target: frozenset[Literal], theory: Theory) -> Proof:
    """Move a base-rule (or Cut) proof of ``Δ ⊢ φ`` to context ``target``.

    Follows the case analysis of the Weakening-2 admissibility argument;
    side conditions of rebuilt nodes are re-checked and an EliminationError
    is raised if the target context is too weak for them.
    """
    if tree.is_open:
        raise EliminationError("open leaf below Weak2")
    rule, goal = tree.rule, tree.sequent.goal
    here = Sequent(target, goal)
    if tree.sequent.context == target:
        return tree
    if isinstance(rule, Empty):
        return Proof(here, rule)
    if isinstance(rule, (Resolve, Subsume)):
        bad = theory.consistent(target | {rule.lit if isinstance(rule, Resolve) else -rule.lit})
        if bad:
            raise EliminationError(f"{rule_name(rule)} side condition lost at {here}")
        return Proof(here, rule, (weaken2(tree.premises[0], target, theory),))
    if isinstance(rule, Cut):
        return Proof(here, rule, tuple(weaken2(p, target, theory) for p in tree.premises))
    if isinstance(rule, Assert):
        l = rule.lit
        if theory.entails(target, l):
            return weaken2(tree.premises[0], target, theory)
        if theory.entails(target, -l):
            return Proof(here, Resolve(l, BOTTOM),
                         (Proof(Sequent(target, goal.replace(Clause([l]), BOTTOM)), Empty()),))
        return Proof(here, rule, (weaken2(tree.premises[0], target | {l}, theory),))
    if isinstance(rule, Split):
        l = rule.lit
        neg, pos = tree.premises
        if theory.entails(target, l):
            return weaken2(pos, target, theory)
        if theory.entails(target, -l):
            return weaken2(neg, target, theory)
        return Proof(here, rule, (weaken2(neg, target | {-l}, theory),
                                  weaken2(pos, target | {l}, theory)))
    raise EliminationError(f"unexpected rule {rule_name(rule)} below Weak2")


def invert_resolve(tree: Proof, l: Literal, rest: Clause, theory: Theory) -> Proof:
    """From a proof of ``Δ ⊢ φ, l ∨ rest`` with ``Δ, l`` inconsistent, build a
    proof of ``Δ ⊢ φ, rest`` of no larger counted size."""
    if tree.is_open:
        raise EliminationError("open leaf below InvResolve")
    tracked = rest.add(l)
    s = tree.sequent
    goal = s.goal.replace(tracked, rest)
    here = Sequent(s.context, goal)
    rule = tree.rule

    if isinstance(rule, Resolve) and rule.clause == tracked:
        if rule.lit == l:
            return tree.premises[0]
        inner_rest = rest.remove(rule.lit)
        sub = invert_resolve(tree.premises[0], l, inner_rest, theory)
        return Proof(here, Resolve(rule.lit, inner_rest), (sub,))
    if isinstance(rule, Subsume) and rule.clause == tracked:
        premise = tree.premises[0]
        if rule.lit != l:
            return Proof(here, Subsume(rule.lit, rest.remove(rule.lit)), (premise,))
        # Δ refutes both l and ¬l, so Δ is inconsistent.
        if rest.is_empty:
            return Proof(here, Empty())
        m = rest.lits[0]
        return Proof(here, Subsume(m, rest.remove(m)), (premise,))
    if isinstance(rule, Assert) and Clause([rule.lit]) == tracked:
        raise EliminationError("Assert on the inverted clause contradicts its side condition")
    if isinstance(rule, Empty):
        if BOTTOM not in goal:
            raise EliminationError("Empty lost its empty clause")
        return Proof(here, rule)
    if isinstance(rule, (Split, Assert, Subsume, Resolve, Cut)):
        return Proof(here, rule, tuple(invert_resolve(p, l, rest, theory) for p in tree.premises))
    raise EliminationError(f"unexpected rule {rule_name(rule)} below InvResolve")


def eliminate_admissible(tree: Proof, theory: Theory, allow_cut: bool = False) -> Proof:
    """Rewrite a complete proof so that it uses base rules only (plus Cut when
    ``allow_cut``), never increasing the counted size.

    Dashed rules are removed innermost first: the premises are cleaned, then
    the dashed node is pushed through the cleaned subproof.
    """
    _recursion_headroom()
    if not allow_cut and any(isinstance(n.rule, Cut) for n in tree):
        raise EliminationError("tree contains Cut")
    if not is_complete(tree):
        raise EliminationError("tree has open leaves")
    return _eliminate(tree, theory, {})


def _eliminate(tree: Proof, theory: Theory, memo: dict[int, Proof]) -> Proof:
    key = id(tree)
    if key in memo:
        return memo[key]
    prems = tuple(_eliminate(p, theory, memo) for p in tree.premises)
    rule = tree.rule
    if isinstance(rule, Weak1):
        out = weaken1(prems[0], rule.clause)
    elif isinstance(rule, Weak2):
        out = weaken2(prems[0], tree.sequent.context, theory)
    elif isinstance(rule, InvResolve):
        out = invert_resolve(prems[0], rule.lit, rule.rest, theory)
    elif prems == tree.premises:
        out = tree
    else:
        out = Proof(tree.sequent, rule, prems)
    if out.sequent != tree.sequent:
        raise EliminationError(f"conclusion changed from {tree.sequent} to {out.sequent}")
    memo[key] = out
    return out
