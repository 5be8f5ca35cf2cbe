"""The focused, polarized sequent calculus LK(T)p (propositional fragment).

Formulae are literals and the four binary connectives ``∧⁺ ∨⁺ ∧⁻ ∨⁻``,
plus the nullary ``⊤⁺``/``⊥⁻`` used to encode the empty clause.  A polarity
set ``P`` of literals declares which literals are positive; their negations
are negative; every other literal is unpolarized.

Sequents are either focused ``Γ ⊢ [A] ; P`` or unfocused ``Γ ⇑ Δ ; O ; P``.
Γ is a set, Δ an ordered list whose head is decomposed first, O a multiset.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

from .core import Literal
from .theory import Theory


# -- formulae ---------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    lit: Literal

    def __str__(self) -> str:
        return str(self.lit)


@dataclass(frozen=True)
class AndP:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left} ∧⁺ {self.right})"


@dataclass(frozen=True)
class OrP:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left} ∨⁺ {self.right})"


@dataclass(frozen=True)
class AndN:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left} ∧⁻ {self.right})"


@dataclass(frozen=True)
class OrN:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left} ∨⁻ {self.right})"


@dataclass(frozen=True)
class TopP:
    def __str__(self) -> str:
        return "⊤⁺"


@dataclass(frozen=True)
class BotN:
    def __str__(self) -> str:
        return "⊥⁻"


Formula = Union[Lit, AndP, OrP, AndN, OrN, TopP, BotN]
_DUAL = {AndP: OrN, OrN: AndP, OrP: AndN, AndN: OrP}


def negate_formula(a: Formula) -> Formula:
    if isinstance(a, Lit):
        return Lit(-a.lit)
    if isinstance(a, TopP):
        return BotN()
    if isinstance(a, BotN):
        return TopP()
    return _DUAL[type(a)](negate_formula(a.left), negate_formula(a.right))


def or_n(lits: Iterable[Literal]) -> Formula:
    """Right-nested ``l₁ ∨⁻ (l₂ ∨⁻ …)``; ``⊥⁻`` when empty."""
    ls = list(lits)
    if not ls:
        return BotN()
    f: Formula = Lit(ls[-1])
    for l in reversed(ls[:-1]):
        f = OrN(Lit(l), f)
    return f


def spine_literals(a: Formula) -> Optional[list[Literal]]:
    """Leaves of a right-nested ∨⁻ spine of literals, or None if ``a`` is not one."""
    out = []
    while isinstance(a, OrN) and isinstance(a.left, Lit):
        out.append(a.left.lit)
        a = a.right
    if isinstance(a, Lit):
        out.append(a.lit)
        return out
    if isinstance(a, BotN) and not out:
        return out
    return None


def formula_atoms(a: Formula) -> Iterator[int]:
    stack = [a]
    while stack:
        f = stack.pop()
        if isinstance(f, Lit):
            yield f.lit.atom
        elif isinstance(f, (AndP, OrP, AndN, OrN)):
            stack.append(f.left)
            stack.append(f.right)


class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNPOLARIZED = "unpolarized-literal"


def classify(a: Formula, pol: frozenset[Literal]) -> Polarity:
    if isinstance(a, (AndP, OrP, TopP)):
        return Polarity.POSITIVE
    if isinstance(a, (AndN, OrN, BotN)):
        return Polarity.NEGATIVE
    if a.lit in pol:
        return Polarity.POSITIVE
    if -a.lit in pol:
        return Polarity.NEGATIVE
    return Polarity.UNPOLARIZED


def polarity_ok(pol: Iterable[Literal]) -> bool:
    pol = frozenset(pol)
    return not any(-l in pol for l in pol)


def formula_key(a: Formula) -> str:
    return str(a)


# -- sequents ---------------------------------------------------------------

class PolarityClash(ValueError):
    pass


@dataclass(frozen=True)
class Focused:
    gamma: frozenset
    focus: Formula
    pol: frozenset

    def __post_init__(self):
        if not polarity_ok(self.pol):
            raise PolarityClash(f"complementary pair in P={sorted(self.pol)}")

    @property
    def formula_count(self) -> int:
        return len(self.gamma) + 1

    def __str__(self) -> str:
        return f"{_set_str(self.gamma)} ⊢ [{self.focus}] ; P={_lits_str(self.pol)}"


@dataclass(frozen=True)
class Unfocused:
    gamma: frozenset
    delta: tuple = ()
    o: tuple = ()
    pol: frozenset = frozenset()

    def __post_init__(self):
        if not polarity_ok(self.pol):
            raise PolarityClash(f"complementary pair in P={sorted(self.pol)}")
        object.__setattr__(self, "o", tuple(sorted(self.o)))

    @property
    def formula_count(self) -> int:
        return len(self.gamma) + len(self.delta) + len(self.o)

    def __str__(self) -> str:
        d = ", ".join(str(f) for f in self.delta)
        return (f"{_set_str(self.gamma)} ⇑ {d} ; O={_lits_str(self.o)} ; "
                f"P={_lits_str(self.pol)}")


LktSequent = Union[Focused, Unfocused]


def _set_str(gamma: Iterable[Formula]) -> str:
    return "{" + ", ".join(sorted(str(f) for f in gamma)) + "}"


def _lits_str(lits: Iterable[Literal]) -> str:
    return "{" + " ".join(str(l) for l in sorted(lits)) + "}"


def atomic_members(gamma: Iterable[Formula]) -> frozenset[Literal]:
    return frozenset(f.lit for f in gamma if isinstance(f, Lit))


# -- rules ------------------------------------------------------------------

@dataclass(frozen=True)
class AndPRule:
    pass


@dataclass(frozen=True)
class OrPRule:
    index: int


@dataclass(frozen=True)
class Init:
    pass


@dataclass(frozen=True)
class InitTheory:
    pass


@dataclass(frozen=True)
class TopPRule:
    pass


@dataclass(frozen=True)
class Release:
    pass


@dataclass(frozen=True)
class AndNRule:
    pass


@dataclass(frozen=True)
class OrNRule:
    pass


@dataclass(frozen=True)
class BotNRule:
    pass


@dataclass(frozen=True)
class Store:
    pass


@dataclass(frozen=True)
class Polarize:
    """Extend P with ``lit``.  ``from_o``: the zoned form, consuming ``lit``
    from O; otherwise the O-free form, where ``lit``'s atom must occur in Γ."""
    lit: Literal
    from_o: bool = False


@dataclass(frozen=True)
class Decide:
    focus: Formula


@dataclass(frozen=True)
class TheoryClose:
    pass


@dataclass(frozen=True)
class AnalyticCut:
    lit: Literal


@dataclass(frozen=True)
class GeneralCut:
    lits: tuple[Literal, ...]

    @property
    def formula(self) -> Formula:
        return or_n(-l for l in self.lits)


LktRule = Union[AndPRule, OrPRule, Init, InitTheory, TopPRule, Release, AndNRule,
                OrNRule, BotNRule, Store, Polarize, Decide, TheoryClose,
                AnalyticCut, GeneralCut]

ARITY = {AndPRule: 2, OrPRule: 1, Init: 0, InitTheory: 0, TopPRule: 0, Release: 1,
         AndNRule: 2, OrNRule: 1, BotNRule: 1, Store: 1, Polarize: 1, Decide: 1,
         TheoryClose: 0, AnalyticCut: 2, GeneralCut: 2}

RULE_NAMES = {AndPRule: "and+", OrPRule: "or+", Init: "init", InitTheory: "init-T",
              TopPRule: "top+", Release: "release", AndNRule: "and-", OrNRule: "or-",
              BotNRule: "bot-", Store: "store", Polarize: "pol", Decide: "decide",
              TheoryClose: "close-T", AnalyticCut: "acut", GeneralCut: "gcut"}


def rule_name(rule: LktRule) -> str:
    return RULE_NAMES[type(rule)]


class LktRuleMismatch(ValueError):
    pass


def lkt_premises_of(s: LktSequent, rule: LktRule) -> tuple[LktSequent, ...]:
    """Premises forced by ``rule`` read backwards from ``s``; shape only."""
    def need(cond: bool, why: str) -> None:
        if not cond:
            raise LktRuleMismatch(why)

    if isinstance(rule, (AndPRule, OrPRule, Init, InitTheory, TopPRule, Release)):
        need(isinstance(s, Focused), f"{rule_name(rule)} needs a focused sequent")
        f = s.focus
        if isinstance(rule, AndPRule):
            need(isinstance(f, AndP), "focus is not ∧⁺")
            return (Focused(s.gamma, f.left, s.pol), Focused(s.gamma, f.right, s.pol))
        if isinstance(rule, OrPRule):
            need(isinstance(f, OrP), "focus is not ∨⁺")
            need(rule.index in (0, 1), "disjunct index must be 0 or 1")
            return (Focused(s.gamma, (f.left, f.right)[rule.index], s.pol),)
        if isinstance(rule, TopPRule):
            need(isinstance(f, TopP), "focus is not ⊤⁺")
            return ()
        if isinstance(rule, (Init, InitTheory)):
            need(isinstance(f, Lit), "focus is not a literal")
            return ()
        return (Unfocused(s.gamma, (f,), (), s.pol),)

    need(isinstance(s, Unfocused), f"{rule_name(rule)} needs an unfocused sequent")
    if isinstance(rule, (AndNRule, OrNRule, BotNRule, Store)):
        need(bool(s.delta), "Δ zone is empty")
        head, tail = s.delta[0], s.delta[1:]
        if isinstance(rule, AndNRule):
            need(isinstance(head, AndN), "head is not ∧⁻")
            return (Unfocused(s.gamma, (head.left,) + tail, s.o, s.pol),
                    Unfocused(s.gamma, (head.right,) + tail, s.o, s.pol))
        if isinstance(rule, OrNRule):
            need(isinstance(head, OrN), "head is not ∨⁻")
            return (Unfocused(s.gamma, (head.left, head.right) + tail, s.o, s.pol),)
        if isinstance(rule, BotNRule):
            need(isinstance(head, BotN), "head is not ⊥⁻")
            return (Unfocused(s.gamma, tail, s.o, s.pol),)
        return (Unfocused(s.gamma | {negate_formula(head)}, tail, s.o, s.pol),)

    need(not s.delta, f"{rule_name(rule)} needs an empty Δ zone")
    if isinstance(rule, Polarize):
        if rule.from_o:
            need(rule.lit in s.o, f"{rule.lit} not in O")
            o = list(s.o)
            o.remove(rule.lit)
            return (Unfocused(s.gamma, (), tuple(o), s.pol | {rule.lit}),)
        return (Unfocused(s.gamma, (), s.o, s.pol | {rule.lit}),)
    if isinstance(rule, Decide):
        need(not s.o, "O zone not empty")
        return (Focused(s.gamma, rule.focus, s.pol),)
    if isinstance(rule, TheoryClose):
        return ()
    need(not s.o, "O zone not empty")
    if isinstance(rule, AnalyticCut):
        return (Unfocused(s.gamma | {Lit(rule.lit)}, (), (), s.pol),
                Unfocused(s.gamma | {Lit(-rule.lit)}, (), (), s.pol))
    if isinstance(rule, GeneralCut):
        return (Unfocused(s.gamma | {Lit(l) for l in rule.lits}, (), (), s.pol),
                Unfocused(s.gamma | {rule.formula}, (), (), s.pol))
    raise TypeError(f"not an LK(T)p rule: {rule!r}")


def lkt_rule_violation(concl: LktSequent, rule: LktRule, premises: list[LktSequent],
                       theory: Theory) -> Optional[str]:
    arity = ARITY.get(type(rule))
    if arity is None:
        return f"unknown rule {rule!r}"
    if len(premises) != arity:
        return f"{rule_name(rule)} expects {arity} premises, got {len(premises)}"
    if isinstance(rule, Polarize) and (rule.lit in concl.pol or -rule.lit in concl.pol):
        return f"{rule.lit} or its negation already polarized"
    try:
        expected = lkt_premises_of(concl, rule)
    except (LktRuleMismatch, PolarityClash) as e:
        return str(e)
    for i, (got, want) in enumerate(zip(premises, expected)):
        if got != want:
            return f"premise {i} is {got}, expected {want}"

    if isinstance(rule, Init):
        p = concl.focus
        if p.lit not in concl.pol:
            return f"{p} not positive"
        if p not in concl.gamma:
            return f"{p} not in Γ"
    elif isinstance(rule, InitTheory):
        p = concl.focus.lit
        if p not in concl.pol:
            return f"{p} not positive"
        if theory.consistent(atomic_members(concl.gamma) | {-p}):
            return "theory does not refute Γ,¬p"
    elif isinstance(rule, Release):
        if classify(concl.focus, concl.pol) is not Polarity.NEGATIVE:
            return f"{concl.focus} is not negative"
    elif isinstance(rule, Store):
        head = concl.delta[0]
        if classify(head, concl.pol) is Polarity.NEGATIVE and not isinstance(head, Lit):
            return f"{head} is neither positive nor a literal"
    elif isinstance(rule, Polarize) and not rule.from_o:
        if not any(rule.lit.atom in formula_atoms(f) for f in concl.gamma):
            return f"atom of {rule.lit} does not occur in Γ"
    elif isinstance(rule, Decide):
        if classify(rule.focus, concl.pol) is not Polarity.POSITIVE:
            return f"{rule.focus} is not positive"
        if negate_formula(rule.focus) not in concl.gamma:
            return f"{negate_formula(rule.focus)} not in Γ"
    elif isinstance(rule, TheoryClose):
        if theory.consistent(atomic_members(concl.gamma)):
            return "atomic part of Γ is consistent"
    elif isinstance(rule, AnalyticCut):
        if not any(rule.lit.atom in formula_atoms(f) for f in concl.gamma):
            return f"{rule.lit} does not appear in Γ"
    return None


def check_lkt_rule(concl: LktSequent, rule: LktRule, premises: list[LktSequent],
                   theory: Theory) -> bool:
    return lkt_rule_violation(concl, rule, premises, theory) is None


# -- proof trees ------------------------------------------------------------

@dataclass(frozen=True)
class LktProof:
    sequent: LktSequent
    rule: Optional[LktRule] = None
    premises: tuple["LktProof", ...] = ()

    @property
    def is_open(self) -> bool:
        return self.rule is None

    def __iter__(self) -> Iterator["LktProof"]:
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.premises))


def lkt_open_leaves(tree: LktProof) -> list[LktProof]:
    return [n for n in tree if n.is_open]


def lkt_tree_violation(tree: LktProof, theory: Theory,
                       complete: bool = True) -> Optional[str]:
    for n in tree:
        if n.is_open:
            if complete:
                return f"open leaf {n.sequent}"
            continue
        why = lkt_rule_violation(n.sequent, n.rule, [p.sequent for p in n.premises], theory)
        if why is not None:
            return f"{rule_name(n.rule)} at {n.sequent}: {why}"
    return None


def check_lkt_tree(tree: LktProof, theory: Theory, complete: bool = True) -> bool:
    return lkt_tree_violation(tree, theory, complete) is None


def lkt_tree_size(tree: LktProof) -> int:
    """Rule nodes, skipping open leaves and the left branch of general cuts."""
    count = 0
    stack = [tree]
    while stack:
        n = stack.pop()
        if n.is_open:
            continue
        count += 1
        if isinstance(n.rule, GeneralCut):
            stack.append(n.premises[1])
        else:
            stack.extend(n.premises)
    return count


def polarity_sets(tree: LktProof) -> Iterator[frozenset]:
    for n in tree:
        yield n.sequent.pol
