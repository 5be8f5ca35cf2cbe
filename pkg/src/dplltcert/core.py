"""Literals, clauses, clause sets and annotated trails.

Atoms are interned integers (``1, 2, ...``); what an atom *means* lives in the
theory's atom table.  Every value here is immutable.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator


@dataclass(frozen=True, order=True)
class Literal:
    atom: int
    positive: bool = True

    def __neg__(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"-{self.atom}"

    __repr__ = __str__

    @classmethod
    def from_int(cls, n: int) -> "Literal":
        if n == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(n), n > 0)

    def to_int(self) -> int:
        return self.atom if self.positive else -self.atom


def negate(lit: Literal) -> Literal:
    return Literal(lit.atom, not lit.positive)


def lit(n: int) -> Literal:
    """Shorthand: ``lit(-3)`` is the negative literal of atom 3."""
    return Literal.from_int(n)


@dataclass(frozen=True, init=False, order=True)
class Clause:
    """A finite multiset of literals.

    Literals are kept sorted, so tuple equality is multiset equality.
    ``Clause()`` is the empty clause.
    """
    lits: tuple[Literal, ...]

    def __init__(self, lits: Iterable[Literal] = ()):
        object.__setattr__(self, "lits", tuple(sorted(lits)))

    @classmethod
    def of(cls, *ns: int) -> "Clause":
        return cls(Literal.from_int(n) for n in ns)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.lits)

    def __len__(self) -> int:
        return len(self.lits)

    def __contains__(self, item: object) -> bool:
        return item in self.lits

    @property
    def size(self) -> int:
        return len(self.lits)

    @property
    def is_empty(self) -> bool:
        return not self.lits

    def add(self, lit: Literal) -> "Clause":
        return Clause(self.lits + (lit,))

    def remove(self, lit: Literal) -> "Clause":
        """Drop one occurrence of ``lit``."""
        lits = list(self.lits)
        lits.remove(lit)
        return Clause(lits)

    def __str__(self) -> str:
        if not self.lits:
            return "⊥"
        return " ∨ ".join(str(l) for l in self.lits)

    def __repr__(self) -> str:
        return f"Clause({[l.to_int() for l in self.lits]})"


BOTTOM = Clause()


@dataclass(frozen=True, init=False, eq=False)
class ClauseSet:
    """A finite multiset of clauses.

    Insertion order is kept so that solver steps can refer to clauses by
    index; equality and hashing ignore it.
    """
    clauses: tuple[Clause, ...]
    _key: tuple[Clause, ...] = field(repr=False, compare=False)

    def __init__(self, clauses: Iterable[Clause] = ()):
        cs = tuple(clauses)
        object.__setattr__(self, "clauses", cs)
        object.__setattr__(self, "_key", tuple(sorted(cs)))

    @classmethod
    def of(cls, *clauses: Iterable[int]) -> "ClauseSet":
        return cls(Clause.of(*c) for c in clauses)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClauseSet):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __len__(self) -> int:
        return len(self.clauses)

    def __getitem__(self, i: int) -> Clause:
        return self.clauses[i]

    def __contains__(self, item: object) -> bool:
        return item in self.clauses

    @property
    def size(self) -> int:
        return sum(len(c) for c in self.clauses)

    def sorted(self) -> tuple[Clause, ...]:
        return self._key

    def add(self, *clauses: Clause) -> "ClauseSet":
        return ClauseSet(self.clauses + clauses)

    def remove(self, clause: Clause) -> "ClauseSet":
        """Drop one occurrence of ``clause``; ValueError if absent."""
        i = self.clauses.index(clause)
        return self.remove_at(i)

    def remove_at(self, i: int) -> "ClauseSet":
        return ClauseSet(self.clauses[:i] + self.clauses[i + 1:])

    def replace(self, old: Clause, new: Clause) -> "ClauseSet":
        i = self.clauses.index(old)
        return ClauseSet(self.clauses[:i] + (new,) + self.clauses[i + 1:])

    def counter(self) -> Counter:
        return Counter(self.clauses)

    def __str__(self) -> str:
        return "{" + ", ".join(str(c) for c in self.clauses) + "}"

    def __repr__(self) -> str:
        return f"ClauseSet({[[l.to_int() for l in c] for c in self.clauses]})"


def close_under_negation(lits: Iterable[Literal]) -> frozenset[Literal]:
    out: set[Literal] = set()
    for l in lits:
        out.add(l)
        out.add(-l)
    return frozenset(out)


def atoms(phi: ClauseSet | Iterable[Clause]) -> frozenset[Literal]:
    """Literals occurring in ``phi`` together with their negations."""
    return close_under_negation(l for c in phi for l in c)


@dataclass(frozen=True)
class TrailEntry:
    lit: Literal
    decision: bool = False

    def __str__(self) -> str:
        return f"{self.lit}ᵈ" if self.decision else str(self.lit)


@dataclass(frozen=True)
class Trail:
    """Ordered literals, some of them decision literals."""
    entries: tuple[TrailEntry, ...] = ()

    @classmethod
    def of(cls, *items: int | tuple[int, str]) -> "Trail":
        """``Trail.of(1, (2, 'd'), -3)`` builds ``1, 2ᵈ, ¬3``."""
        out = []
        for it in items:
            if isinstance(it, tuple):
                out.append(TrailEntry(Literal.from_int(it[0]), True))
            else:
                out.append(TrailEntry(Literal.from_int(it), False))
        return cls(tuple(out))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[TrailEntry]:
        return iter(self.entries)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Trail(self.entries[i])
        return self.entries[i]

    def push(self, lit: Literal, decision: bool = False) -> "Trail":
        return Trail(self.entries + (TrailEntry(lit, decision),))

    def literals(self) -> tuple[Literal, ...]:
        return tuple(e.lit for e in self.entries)

    def assigned(self, lit: Literal) -> bool:
        """True if ``lit`` or its negation is on the trail."""
        return any(e.lit.atom == lit.atom for e in self.entries)

    def decision_positions(self) -> list[int]:
        return [i for i, e in enumerate(self.entries) if e.decision]

    @property
    def level(self) -> int:
        return sum(1 for e in self.entries if e.decision)

    def __str__(self) -> str:
        return ", ".join(str(e) for e in self.entries) or "∅"


def forget(trail: Trail) -> frozenset[Literal]:
    """Erase decision annotations."""
    return frozenset(e.lit for e in trail.entries)


def backstrict(trail: Trail) -> list[frozenset[Literal]]:
    """Backtrack points strictly below the trail.

    One entry per decision literal ``l`` at position ``k``: the forgotten
    prefix before ``k`` plus ``¬l``.  Equivalent to unrolling the recursion
    backstrict(Δ,l) = backstrict(Δ), backstrict(Δ,lᵈ) = backpoints(Δ,¬l).
    """
    out: list[frozenset[Literal]] = []
    prefix: set[Literal] = set()
    for e in trail.entries:
        if e.decision:
            out.append(frozenset(prefix | {-e.lit}))
        prefix.add(e.lit)
    return out


def backpoints(trail: Trail) -> list[frozenset[Literal]]:
    """``backstrict(trail)`` plus the forgotten trail itself."""
    return backstrict(trail) + [forget(trail)]
