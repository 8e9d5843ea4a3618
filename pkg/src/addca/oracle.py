"""Brute-force reference computations by exhaustive enumeration of windows.

Nothing here touches the linear-algebra path: rules are applied by
definition (local sums or table lookup) to every word on a finite window.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ca_core import AdditiveRule, GeneralRule, Rule, Word
from .errors import BudgetExceeded, ContractViolation
from .events import AffineEvent, ExactMeasure

DEFAULT_BUDGET = 2 ** 20
BUDGET_ENV = "ADDCA_ORACLE_BUDGET"


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


@dataclass(frozen=True)
class WindowUniverse:
    m: int
    window_lo: int
    window_hi: int
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.window_hi < self.window_lo:
            raise ContractViolation("window must contain at least one cell")
        if self.population > self.budget:
            raise BudgetExceeded(self.population, self.budget)

    @property
    def width(self) -> int:
        return self.window_hi - self.window_lo + 1

    @property
    def population(self) -> int:
        return self.m ** self.width

    def words(self) -> np.ndarray:
        """All words as rows of an array, in lexicographic order."""
        idx = np.arange(self.population, dtype=np.int64)
        powers = self.m ** np.arange(self.width - 1, -1, -1, dtype=np.int64)
        return (idx[:, None] // powers[None, :]) % self.m


def _apply(rule: Rule, x: np.ndarray) -> np.ndarray:
    """Apply a local rule to every row of ``x`` (columns are consecutive cells)."""
    w = rule.width
    n_out = x.shape[1] - w + 1
    if n_out < 1:
        raise ContractViolation("words are shorter than the rule width")
    if isinstance(rule, AdditiveRule):
        acc = np.zeros((x.shape[0], n_out), dtype=np.int64)
        for k, c in enumerate(rule.coeffs):
            if c:
                acc += c * x[:, k:k + n_out]
        return acc % rule.m
    key = np.zeros((x.shape[0], n_out), dtype=np.int64)
    for k in range(w):
        key = key * rule.m + x[:, k:k + n_out]
    return np.asarray(rule.table, dtype=np.int64)[key]


def _satisfies(E: AffineEvent, x: np.ndarray, x_lo: int) -> np.ndarray:
    """Row mask of words (first column at coordinate x_lo) lying in E."""
    ok = np.ones(x.shape[0], dtype=bool)
    if E.window_lo is None:
        return ok
    start = E.window_lo - x_lo
    if start < 0 or start + E.width > x.shape[1]:
        raise ContractViolation("window does not cover the event")
    sub = x[:, start:start + E.width]
    for row, b in zip(E.matrix.data, E.rhs):
        val = np.zeros(x.shape[0], dtype=np.int64)
        for c, a in enumerate(row):
            if a % E.m:
                val += (a % E.m) * sub[:, c]
        ok &= (val - b) % E.m == 0
    return ok


def _check_event(rule: Rule, E: AffineEvent) -> None:
    if rule.m != E.m:
        raise ContractViolation(f"modulus mismatch: rule {rule.m} vs event {E.m}")
    if E.window_lo is None:
        raise ContractViolation("oracle needs an event with a finite window")


def brute_preimage(rule: Rule, A: AffineEvent, budget: int | None = None) -> list[Word]:
    _check_event(rule, A)
    lo, hi = A.window_lo + rule.range_lo, A.window_hi + rule.range_hi
    universe = WindowUniverse(A.m, lo, hi, budget or default_budget())
    x = universe.words()
    y = _apply(rule, x)
    keep = _satisfies(A, y, A.window_lo)
    return [Word(lo, tuple(int(v) for v in row)) for row in x[keep]]


def brute_correlation(rule: Rule, A: AffineEvent, B: AffineEvent, idx,
                      budget: int | None = None) -> ExactMeasure:
    """Count words on the joint window lying in B whose j-fold image, shifted by i, lies in A."""
    i, j = (idx.i, idx.j) if hasattr(idx, "i") else idx
    _check_event(rule, A)
    _check_event(rule, B)
    pre_lo = A.window_lo + j * rule.range_lo + i
    pre_hi = A.window_hi + j * rule.range_hi + i
    lo, hi = min(pre_lo, B.window_lo), max(pre_hi, B.window_hi)
    universe = WindowUniverse(A.m, lo, hi, budget or default_budget())
    x = universe.words()
    in_b = _satisfies(B, x, lo)
    # shifting by i relabels coordinate c as c - i
    y, y_lo = x, lo - i
    for _ in range(j):
        y = _apply(rule, y)
        y_lo -= rule.range_lo
    in_a = _satisfies(A, y, y_lo)
    return ExactMeasure(int(np.count_nonzero(in_a & in_b)), universe.width, A.m)


def brute_surjectivity(rule: Rule, probe_len: int, budget: int | None = None) -> bool:
    """True iff every word of length ``probe_len`` has a preimage word."""
    if probe_len < 1:
        raise ContractViolation("probe length must be >= 1")
    universe = WindowUniverse(rule.m, 0, probe_len + rule.width - 2, budget or default_budget())
    y = _apply(rule, universe.words())
    powers = rule.m ** np.arange(probe_len - 1, -1, -1, dtype=np.int64)
    return len(np.unique(y @ powers)) == rule.m ** probe_len


def brute_measure(A: AffineEvent, budget: int | None = None) -> Fraction:
    """Fraction of words on A's window satisfying A."""
    if A.window_lo is None:
        return Fraction(1)
    universe = WindowUniverse(A.m, A.window_lo, A.window_hi, budget or default_budget())
    hits = int(np.count_nonzero(_satisfies(A, universe.words(), A.window_lo)))
    return Fraction(hits, universe.population)
