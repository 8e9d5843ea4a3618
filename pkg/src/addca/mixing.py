"""Exact correlations for the Z^2-action generated by the shift and an additive CA.

For an index ``(i, j)`` the action preimage of ``A`` is
``T_{(-i,-j)} A = sigma^{-i} f^{-j} A``; the correlation with ``B`` is
``mu(B & T_{(-i,-j)} A)``. Everything here is an exact rational; the limits
that define ergodicity and mixing are replaced by finite sums together with
the tail bound that follows from window disjointness.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .ca_core import AdditiveRule, format_rule
from .errors import ContractViolation
from .events import (AffineEvent, ExactMeasure, format_event, intersect,
                     iterated_preimage, make_cylinder, measure, shift_event)


@dataclass(frozen=True, order=True)
class ActionIndex:
    i: int
    j: int

    def __post_init__(self):
        if self.i < 0 or self.j < 0:
            raise ContractViolation(f"action index must be nonnegative, got ({self.i}, {self.j})")


@dataclass(frozen=True)
class LatticeRect:
    """The rectangle ``[0, p-1] x [0, n-1]`` of action indices."""

    p: int
    n: int

    def __post_init__(self):
        if self.p < 1 or self.n < 1:
            raise ContractViolation(f"lattice rectangle needs p, n >= 1, got ({self.p}, {self.n})")

    @property
    def size(self) -> int:
        return self.p * self.n

    def indices(self) -> list[ActionIndex]:
        return [ActionIndex(i, j) for j in range(self.n) for i in range(self.p)]


@dataclass(frozen=True)
class LatticePoint:
    i: int
    j: int
    value: ExactMeasure
    deviation: Fraction


@dataclass
class MixingReport:
    rule: str
    A: str
    B: str
    rect: LatticeRect
    points: list[LatticePoint]
    product: Fraction
    cesaro_value: Fraction
    cesaro_deviation: Fraction
    weak_sum: Fraction
    strong_tail: ExactMeasure
    strong_deviation: Fraction
    thresholds: list[int] = field(default_factory=list)
    reference_bounds: list[int] = field(default_factory=list)
    tail_bound: Fraction = Fraction(0)


def _as_index(idx) -> ActionIndex:
    return idx if isinstance(idx, ActionIndex) else ActionIndex(*idx)


def action_preimage(rule: AdditiveRule, idx: ActionIndex, E: AffineEvent) -> AffineEvent:
    idx = _as_index(idx)
    if rule.m != E.m:
        raise ContractViolation(f"modulus mismatch: rule {rule.m} vs event {E.m}")
    return shift_event(iterated_preimage(rule, E, idx.j), idx.i)


def _check_moduli(rule, A, B):
    if not rule.m == A.m == B.m:
        raise ContractViolation(f"modulus mismatch: rule {rule.m}, A {A.m}, B {B.m}")


def correlation(rule: AdditiveRule, A: AffineEvent, B: AffineEvent,
                idx: ActionIndex) -> tuple[ExactMeasure, Fraction]:
    """``mu(B & T_{(-i,-j)} A)`` and its signed deviation from ``mu(A) mu(B)``."""
    _check_moduli(rule, A, B)
    value = measure(intersect(B, action_preimage(rule, idx, A)))
    return value, value.value - measure(A).value * measure(B).value


def disjoint_threshold(rule: AdditiveRule, A: AffineEvent, B: AffineEvent, j: int) -> int:
    """Least i* >= 0 such that for every i >= i* the action preimage of A at
    (i, j) lies strictly right of B's window.

    From i* on the correlation factorizes as ``mu(B) mu(T^{-1} A)``; the
    deviation from ``mu(A) mu(B)`` is therefore zero when the rule is
    surjective (measure preserving), and generally not otherwise.
    """
    if A.window_lo is None or B.window_lo is None:
        return 0
    return max(0, B.window_hi - A.window_lo - j * rule.range_lo + 1)


def reference_bound(rule: AdditiveRule, A: AffineEvent, B: AffineEvent, j: int) -> int | None:
    """``b + s + j*lo - a``: the bound with the sign of ``j*lo`` flipped
    relative to ``disjoint_threshold``. Reported only for comparison."""
    if A.window_lo is None or B.window_lo is None:
        return None
    return B.window_hi + j * rule.range_lo - A.window_lo


def tail_bound(rule: AdditiveRule, A: AffineEvent, B: AffineEvent, rect: LatticeRect) -> Fraction:
    """Upper bound on the absolute Cesaro (and weak-mixing) deviation over ``rect``."""
    total = sum(min(disjoint_threshold(rule, A, B, j), rect.p) for j in range(rect.n))
    return Fraction(total, rect.size)


def _point(args):
    rule, A, B, idx = args
    value, dev = correlation(rule, A, B, idx)
    return LatticePoint(idx.i, idx.j, value, dev)


def correlation_grid(rule: AdditiveRule, A: AffineEvent, B: AffineEvent,
                     indices: Sequence[ActionIndex], workers: int | None = None) -> list[LatticePoint]:
    """Correlations at every index, in the given order.

    With ``workers > 1`` the points are computed in a process pool; results
    are still returned in input order.
    """
    _check_moduli(rule, A, B)
    jobs = [(rule, A, B, _as_index(idx)) for idx in indices]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_point(job) for job in jobs]


def cesaro_report(rule: AdditiveRule, A: AffineEvent, B: AffineEvent, rect: LatticeRect,
                  workers: int | None = None) -> MixingReport:
    points = correlation_grid(rule, A, B, rect.indices(), workers)
    product = measure(A).value * measure(B).value
    cesaro = sum((pt.value.value for pt in points), Fraction(0)) / rect.size
    weak = sum((abs(pt.deviation) for pt in points), Fraction(0)) / rect.size
    corner = next(pt for pt in points if (pt.i, pt.j) == (rect.p - 1, rect.n - 1))
    return MixingReport(
        rule=format_rule(rule), A=format_event(A), B=format_event(B), rect=rect,
        points=points, product=product, cesaro_value=cesaro,
        cesaro_deviation=cesaro - product, weak_sum=weak,
        strong_tail=corner.value, strong_deviation=corner.deviation,
        thresholds=[disjoint_threshold(rule, A, B, j) for j in range(rect.n)],
        reference_bounds=[reference_bound(rule, A, B, j) for j in range(rect.n)],
        tail_bound=tail_bound(rule, A, B, rect),
    )


def weak_mixing_sum(rule: AdditiveRule, A: AffineEvent, B: AffineEvent, rect: LatticeRect,
                    workers: int | None = None) -> Fraction:
    """Mean absolute deviation ``(1/pn) sum_D |c(i,j) - mu(A) mu(B)|``."""
    points = correlation_grid(rule, A, B, rect.indices(), workers)
    return sum((abs(pt.deviation) for pt in points), Fraction(0)) / rect.size


def strong_mixing_probe(rule: AdditiveRule, A: AffineEvent, B: AffineEvent,
                        along: Iterable[ActionIndex]) -> list[Fraction]:
    along = [_as_index(idx) for idx in along]
    if not along:
        raise ContractViolation("strong mixing probe needs at least one index")
    return [correlation(rule, A, B, idx)[1] for idx in along]


@dataclass(frozen=True)
class Witness:
    A: AffineEvent
    B: AffineEvent
    j: int
    deviation: Fraction


def all_cylinders(m: int, max_len: int, offset: int = 0) -> list[AffineEvent]:
    """Every cylinder of length 1..max_len anchored at ``offset``, shortest first."""
    return [make_cylinder(m, offset, syms)
            for n in range(1, max_len + 1)
            for syms in itertools.product(range(m), repeat=n)]


def search_nonfactorizing(rule: AdditiveRule, max_cyl_len: int, max_j: int,
                          b_offset: int = 0) -> list[Witness]:
    """Cylinder pairs (A, B) and iterates j in 1..max_j with nonzero deviation at i = 0.

    A is anchored at 0 and B at ``b_offset``. Witnesses are sorted by
    decreasing absolute deviation, then by (A symbols, B symbols, j).
    """
    if max_cyl_len < 1 or max_j < 1:
        raise ContractViolation("search bounds must be >= 1")
    cyls_a = all_cylinders(rule.m, max_cyl_len)
    cyls_b = all_cylinders(rule.m, max_cyl_len, b_offset)
    found = []
    for j in range(1, max_j + 1):
        idx = ActionIndex(0, j)
        for A in cyls_a:
            pre = action_preimage(rule, idx, A)
            mu_a = measure(A).value
            for B in cyls_b:
                value = measure(intersect(B, pre)).value
                dev = value - mu_a * measure(B).value
                if dev:
                    found.append(Witness(A, B, j, dev))
    found.sort(key=lambda w: (-abs(w.deviation), w.A.rhs, w.B.rhs, w.j))
    return found
