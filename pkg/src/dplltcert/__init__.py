"""Certified DPLL(T): a solver, its proof-tree simulation in LKDPLL(T) and a
translation into the focused sequent calculus LK(T)p."""

__version__ = "0.1.0"
