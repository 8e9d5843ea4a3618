"""Affine events on finite coordinate windows and their exact Bernoulli measures.

An event is ``{x : A (x_lo, ..., x_hi) = b (mod m)}``; cylinders are the case
where ``A`` is the identity. Coordinates outside the window are free, so the
uniform Bernoulli measure of an event is ``#solutions / m^width``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from .ca_core import AdditiveRule, Word, power_rule
from .errors import ContractViolation, EnumerationRefused, ParseError
from .modlinalg import IntMatrix, count_solutions, enumerate_solutions


@dataclass(frozen=True, eq=False)
class ExactMeasure:
    """The rational ``count / m**width``; equality compares values."""

    count: int
    width: int
    m: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.count, self.m ** self.width)

    def __eq__(self, other):
        if isinstance(other, ExactMeasure):
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return f"{self.count}/{self.m}^{self.width}"

    def decimal(self) -> str:
        return format(float(self.value), ".12g")


_MEASURE_RE = re.compile(r"^\s*(\d+)\s*/\s*(\d+)\s*\^\s*(\d+)\s*$")


def parse_measure(text: str) -> ExactMeasure:
    match = _MEASURE_RE.match(text)
    if not match:
        raise ParseError(f"malformed measure {text!r}")
    count, m, width = map(int, match.groups())
    return ExactMeasure(count, width, m)


@dataclass(frozen=True)
class AffineEvent:
    m: int
    window_lo: int | None
    window_hi: int | None
    matrix: IntMatrix
    rhs: tuple[int, ...]

    def __post_init__(self):
        if (self.window_lo is None) != (self.window_hi is None):
            raise ContractViolation("window bounds must both be set or both be None")
        if self.window_lo is not None and self.window_lo > self.window_hi:
            raise ContractViolation("window_lo > window_hi")
        if self.matrix.cols != self.width:
            raise ContractViolation(
                f"matrix has {self.matrix.cols} columns for a window of width {self.width}")
        if self.matrix.rows != len(self.rhs):
            raise ContractViolation("rhs length does not match the number of constraints")

    @property
    def width(self) -> int:
        if self.window_lo is None:
            return 0
        return self.window_hi - self.window_lo + 1

    @property
    def is_full_window(self) -> bool:
        return self.window_lo is None

    def contains(self, word: Word) -> bool:
        """Check a word covering the window against every constraint."""
        if self.window_lo is None:
            return True
        start = self.window_lo - word.offset
        if start < 0 or start + self.width > len(word):
            raise ContractViolation("word does not cover the event window")
        x = word.symbols[start:start + self.width]
        return all((v - b) % self.m == 0 for v, b in zip(self.matrix.dot(x), self.rhs))

    def __str__(self):
        return format_event(self)


def full_space(m: int, window_lo: int | None = None, window_hi: int | None = None) -> AffineEvent:
    """Unconstrained event, optionally carrying an explicit window."""
    if window_lo is None:
        return AffineEvent(m, None, None, IntMatrix.zeros(0, 0), ())
    w = window_hi - window_lo + 1
    return AffineEvent(m, window_lo, window_hi, IntMatrix.zeros(0, w), ())


def make_cylinder(m: int, a: int, symbols: Sequence[int]) -> AffineEvent:
    if not symbols:
        raise ContractViolation("a cylinder needs at least one symbol")
    if any(not 0 <= s < m for s in symbols):
        raise ContractViolation(f"cylinder symbols must lie in [0, {m})")
    n = len(symbols)
    return AffineEvent(m, a, a + n - 1, IntMatrix.identity(n), tuple(symbols))


def cylinder_symbols(E: AffineEvent) -> tuple[int, ...] | None:
    """Symbols of E if it is literally stored as a cylinder, else None."""
    if E.window_lo is None or E.matrix != IntMatrix.identity(E.width):
        return None
    return E.rhs


@lru_cache(maxsize=65536)
def _reduced_matrix(matrix: IntMatrix, m: int) -> tuple[IntMatrix, int]:
    """Reduce mod m and drop all-zero columns (each contributes a free factor m)."""
    rows = [[v % m for v in r] for r in matrix.data]
    keep = [c for c in range(matrix.cols) if any(r[c] for r in rows)]
    A = IntMatrix.from_rows(([r[c] for c in keep] for r in rows), len(keep))
    return A, matrix.cols - len(keep)


def measure(E: AffineEvent) -> ExactMeasure:
    if E.matrix.rows == 0:
        return ExactMeasure(E.m ** E.width, E.width, E.m)
    A, free = _reduced_matrix(E.matrix, E.m)
    b = tuple(x % E.m for x in E.rhs)
    return ExactMeasure(count_solutions(A, b, E.m) * E.m ** free, E.width, E.m)


def embed(E: AffineEvent, lo: int, hi: int) -> AffineEvent:
    """The same event re-expressed on a window [lo, hi] containing its own."""
    if E.window_lo is None:
        return full_space(E.m, lo, hi)
    if lo > E.window_lo or hi < E.window_hi:
        raise ContractViolation("target window must contain the event window")
    left, right = E.window_lo - lo, hi - E.window_hi
    rows = ((0,) * left + r + (0,) * right for r in E.matrix.data)
    return AffineEvent(E.m, lo, hi, IntMatrix.from_rows(rows, hi - lo + 1), E.rhs)


def intersect(E: AffineEvent, F: AffineEvent) -> AffineEvent:
    if E.m != F.m:
        raise ContractViolation(f"modulus mismatch: {E.m} vs {F.m}")
    if E.window_lo is None:
        return F
    if F.window_lo is None:
        return E
    lo, hi = min(E.window_lo, F.window_lo), max(E.window_hi, F.window_hi)
    e, f = embed(E, lo, hi), embed(F, lo, hi)
    matrix = IntMatrix.from_rows(e.matrix.data + f.matrix.data, hi - lo + 1)
    return AffineEvent(E.m, lo, hi, matrix, e.rhs + f.rhs)


def shift_event(E: AffineEvent, i: int) -> AffineEvent:
    """``sigma^{-i} E``: the same constraints, window moved right by ``i``."""
    if E.window_lo is None or i == 0:
        return E
    return AffineEvent(E.m, E.window_lo + i, E.window_hi + i, E.matrix, E.rhs)


def preimage(rule: AdditiveRule, E: AffineEvent) -> AffineEvent:
    """Inverse image of E under the global map of ``rule``."""
    if rule.m != E.m:
        raise ContractViolation(f"modulus mismatch: rule {rule.m} vs event {E.m}")
    if E.window_lo is None:
        return E
    return AffineEvent(E.m, E.window_lo + rule.range_lo, E.window_hi + rule.range_hi,
                       _preimage_matrix(E.matrix, rule.coeffs, E.m), E.rhs)


@lru_cache(maxsize=65536)
def _preimage_matrix(matrix: IntMatrix, lam: tuple[int, ...], m: int) -> IntMatrix:
    # each constraint row is convolved with the rule's coefficient band
    width = matrix.cols + len(lam) - 1
    rows = []
    for alpha in matrix.data:
        row = [0] * width
        for c, a in enumerate(alpha):
            if a:
                for i, l in enumerate(lam):
                    row[c + i] += a * l
        rows.append(tuple(v % m for v in row))
    return IntMatrix.from_rows(rows, width)


def iterated_preimage(rule: AdditiveRule, E: AffineEvent, j: int) -> AffineEvent:
    if rule.m != E.m:
        raise ContractViolation(f"modulus mismatch: rule {rule.m} vs event {E.m}")
    if j == 0:
        return E
    return preimage(power_rule(rule, j), E)


def blocks(E: AffineEvent, cap: int) -> list[Word]:
    """Every word on the event window satisfying its constraints, in lex order."""
    if E.window_lo is None:
        if cap < 1:
            raise EnumerationRefused(1, cap)
        return [Word(0, ())]
    sols = enumerate_solutions(E.matrix, E.rhs, E.m, cap)
    return [Word(E.window_lo, s) for s in sols]


_EVENT_RE = re.compile(r"^@(?P<a>[+-]?\d+):\[(?P<s>\d+(?:,\d+)*)\]$")


def parse_event(text: str, m: int) -> AffineEvent:
    """Parse a cylinder spec ``@<a>:[s,...,s]`` (whitespace ignored)."""
    match = _EVENT_RE.match(re.sub(r"\s+", "", text))
    if not match:
        raise ParseError(f"malformed event spec {text!r}")
    symbols = [int(s) for s in match["s"].split(",")]
    try:
        return make_cylinder(m, int(match["a"]), symbols)
    except ContractViolation as exc:
        raise ParseError(f"invalid event {text!r}: {exc}") from exc


def format_event(E: AffineEvent) -> str:
    if E.window_lo is None:
        return "full"
    syms = cylinder_symbols(E)
    if syms is not None:
        return f"@{E.window_lo}:[{','.join(map(str, syms))}]"
    return f"affine[{E.window_lo}..{E.window_hi}]x{E.matrix.rows}"
