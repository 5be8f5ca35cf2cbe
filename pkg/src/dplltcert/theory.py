"""Black-box theory solvers.

A theory answers one question: is a finite set of literals consistent?
Entailment ``Δ ⊨ l`` is reduced to inconsistency of ``Δ ∪ {¬l}``.

Two instances are provided: the empty (purely propositional) theory and
ground equality over constants, decided by union-find.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Optional

from .core import ClauseSet, Literal, atoms


class Verdict(enum.Enum):
    CONSISTENT = "consistent"
    UNSAT = "unsat"


class UnknownAtomError(KeyError):
    pass


@dataclass(frozen=True)
class EqAtom:
    """Theory reading of an atom: ``left = right`` (or ``≠`` when not equal)."""
    left: str
    right: str
    equal: bool = True

    def __str__(self) -> str:
        op = "=" if self.equal else "≠"
        return f"{self.left}{op}{self.right}"


AtomTable = Mapping[int, Optional[EqAtom]]


class UnionFind:
    def __init__(self) -> None:
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        parent = self.parent
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


class Theory:
    """Base class; subclasses implement ``_decide`` on a frozenset of literals."""

    name = "abstract"

    def __init__(self, table: AtomTable | None = None, memo: bool = True):
        self.table = dict(table) if table is not None else None
        self._memo = memo
        if memo:
            self._cached = lru_cache(maxsize=None)(self._decide)

    def _lookup(self, l: Literal) -> Optional[EqAtom]:
        if self.table is None:
            return None
        try:
            return self.table[l.atom]
        except KeyError:
            raise UnknownAtomError(l.atom) from None

    def _decide(self, lits: frozenset[Literal]) -> bool:
        raise NotImplementedError

    def unsat(self, lits: Iterable[Literal]) -> bool:
        key = frozenset(lits)
        return self._cached(key) if self._memo else self._decide(key)

    def verdict(self, lits: Iterable[Literal]) -> Verdict:
        return Verdict.UNSAT if self.unsat(lits) else Verdict.CONSISTENT

    def consistent(self, lits: Iterable[Literal]) -> bool:
        return not self.unsat(lits)

    def entails(self, lits: Iterable[Literal], l: Literal) -> bool:
        return self.unsat(frozenset(lits) | {-l})

    def fresh(self) -> "Theory":
        """Same theory without a memo table."""
        return type(self)(self.table, memo=False)


def _propositional_clash(lits: frozenset[Literal]) -> bool:
    return any(-l in lits for l in lits)


class EmptyTheory(Theory):
    """No theory: a literal set is inconsistent iff it holds some ``l`` and ``¬l``."""

    name = "empty"

    def _decide(self, lits: frozenset[Literal]) -> bool:
        for l in lits:
            self._lookup(l)
        return _propositional_clash(lits)


class EqualityTheory(Theory):
    """Ground equalities and disequalities between constants.

    Atoms without a payload in the table are read propositionally.
    """

    name = "eq"

    def __init__(self, table: AtomTable, memo: bool = True):
        super().__init__(table, memo)

    def _decide(self, lits: frozenset[Literal]) -> bool:
        uf = UnionFind()
        diseqs: list[tuple[str, str]] = []
        props: set[Literal] = set()
        for l in lits:
            payload = self._lookup(l)
            if payload is None:
                props.add(l)
                continue
            if payload.equal == l.positive:
                uf.union(payload.left, payload.right)
            else:
                diseqs.append((payload.left, payload.right))
        if _propositional_clash(frozenset(props)):
            return True
        return any(uf.find(a) == uf.find(b) for a, b in diseqs)


def make_theory(kind: str, table: AtomTable | None = None) -> Theory:
    if kind == "empty":
        return EmptyTheory(table)
    if kind == "eq":
        return EqualityTheory(table or {})
    raise ValueError(f"unknown theory {kind!r}")


def tc_unsat(delta: Iterable[Literal], theory: Theory) -> Verdict:
    return theory.verdict(delta)


def tc_entails(delta: Iterable[Literal], l: Literal, theory: Theory) -> bool:
    return theory.entails(delta, l)


def nsat(delta: Iterable[Literal], phi: ClauseSet, theory: Theory) -> frozenset[Literal]:
    """Literals of ``atoms(phi)`` entailed by ``delta``."""
    delta = frozenset(delta)
    return frozenset(l for l in atoms(phi) if theory.entails(delta, l))
