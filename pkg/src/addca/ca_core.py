"""Additive cellular automaton rules over Z_m.

Convention: the shift moves left, ``(sigma x)_n = x_{n+1}``, and a rule with
range ``[lo, hi]`` maps ``x`` to ``y_n = sum_i c_i x_{n+i} (mod m)``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

from .errors import ContractViolation, ParseError


@dataclass(frozen=True)
class Word:
    """Finite block of symbols whose first symbol sits at coordinate ``offset``."""

    offset: int
    symbols: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))

    def __len__(self):
        return len(self.symbols)

    @property
    def hi(self) -> int:
        return self.offset + len(self.symbols) - 1

    def __str__(self):
        return f"_{self.offset}[{''.join(map(str, self.symbols))}]_{self.hi}"


@dataclass(frozen=True)
class AdditiveRule:
    m: int
    range_lo: int
    range_hi: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.m < 2:
            raise ContractViolation(f"modulus must be >= 2, got {self.m}")
        if self.range_lo > self.range_hi:
            raise ContractViolation("range_lo > range_hi")
        if len(self.coeffs) != self.range_hi - self.range_lo + 1:
            raise ContractViolation("coefficient count does not match the range")
        if any(not 0 <= c < self.m for c in self.coeffs):
            raise ContractViolation("coefficients must be reduced mod m")
        if len(self.coeffs) > 1 and (self.coeffs[0] == 0 or self.coeffs[-1] == 0):
            raise ContractViolation("rule is not normalized")

    @property
    def width(self) -> int:
        return self.range_hi - self.range_lo + 1

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def local(self, values: Sequence[int]) -> int:
        return sum(c * v for c, v in zip(self.coeffs, values)) % self.m

    def __str__(self):
        return format_rule(self)


@dataclass(frozen=True)
class GeneralRule:
    """Arbitrary local rule given as a lookup table.

    ``table[k]`` is the output for the k-th input word in lexicographic order
    (first symbol most significant).
    """

    m: int
    range_lo: int
    range_hi: int
    table: tuple[int, ...]

    def __post_init__(self):
        if self.m < 2 or self.range_lo > self.range_hi:
            raise ContractViolation("invalid modulus or range")
        if len(self.table) != self.m ** self.width:
            raise ContractViolation("table length must be m^(range width)")
        if any(not 0 <= t < self.m for t in self.table):
            raise ContractViolation("table outputs must lie in [0, m)")

    @property
    def width(self) -> int:
        return self.range_hi - self.range_lo + 1

    def local(self, values: Sequence[int]) -> int:
        k = 0
        for v in values:
            k = k * self.m + v
        return self.table[k]

    @classmethod
    def from_additive(cls, rule: AdditiveRule) -> GeneralRule:
        words = itertools.product(range(rule.m), repeat=rule.width)
        return cls(rule.m, rule.range_lo, rule.range_hi,
                   tuple(rule.local(w) for w in words))


Rule = Union[AdditiveRule, GeneralRule]


def _normalized(m: int, lo: int, coeffs: Sequence[int]) -> AdditiveRule:
    c = [x % m for x in coeffs]
    nz = [k for k, x in enumerate(c) if x]
    if not nz:
        return AdditiveRule(m, lo, lo, (0,))
    a, b = nz[0], nz[-1]
    return AdditiveRule(m, lo + a, lo + b, tuple(c[a:b + 1]))


def make_rule(m: int, range_lo: int, range_hi: int, coeffs: Sequence[int]) -> AdditiveRule:
    if m < 2:
        raise ContractViolation(f"modulus must be >= 2, got {m}")
    if range_hi < range_lo:
        raise ContractViolation(f"empty range [{range_lo}, {range_hi}]")
    if len(coeffs) != range_hi - range_lo + 1:
        raise ContractViolation(
            f"{len(coeffs)} coefficients given for range [{range_lo}, {range_hi}]")
    rule = _normalized(m, range_lo, coeffs)
    if rule.is_zero:
        raise ContractViolation("the zero rule is not allowed")
    return rule


def identity_rule(m: int) -> AdditiveRule:
    return AdditiveRule(m, 0, 0, (1,))


def apply_window(rule: Rule, word: Word) -> Word:
    """Image of a finite word; the output covers every coordinate it determines."""
    w = rule.width
    if len(word) < w:
        raise ContractViolation(
            f"input of length {len(word)} is shorter than the rule width {w}")
    s = word.symbols
    out = tuple(rule.local(s[n:n + w]) for n in range(len(s) - w + 1))
    return Word(word.offset - rule.range_lo, out)


def compose_shift(rule: AdditiveRule, p: int) -> AdditiveRule:
    """Rule of ``sigma^p`` composed with the global map."""
    return AdditiveRule(rule.m, rule.range_lo + p, rule.range_hi + p, rule.coeffs)


def _polymul(a: Sequence[int], b: Sequence[int], m: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % m
    return out


@lru_cache(maxsize=4096)
def power_rule(rule: AdditiveRule, j: int) -> AdditiveRule:
    """Rule of the j-th iterate, via the j-th power of the coefficient polynomial.

    For a nilpotent (non-surjective) rule the result may be the zero map,
    returned as a single zero coefficient placed at ``j * range_lo``.
    """
    if j < 0:
        raise ContractViolation("iteration count must be nonnegative")
    m = rule.m
    result, base, e = [1], list(rule.coeffs), j
    while e:
        if e & 1:
            result = _polymul(result, base, m)
        e >>= 1
        if e:
            base = _polymul(base, base, m)
    return _normalized(m, j * rule.range_lo, result)


def is_surjective(rule: AdditiveRule) -> bool:
    return math.gcd(rule.m, *rule.coeffs) == 1


_RULE_RE = re.compile(
    r"^m=(?P<m>[+-]?\d+);range=(?P<lo>[+-]?\d+)\.\.(?P<hi>[+-]?\d+);coeffs=(?P<c>[+-]?\d+(?:,[+-]?\d+)*)$")


def parse_rule(text: str) -> AdditiveRule:
    """Parse ``m=<int>;range=<lo>..<hi>;coeffs=<c,...,c>`` (whitespace ignored)."""
    match = _RULE_RE.match(re.sub(r"\s+", "", text))
    if not match:
        raise ParseError(f"malformed rule spec {text!r}")
    coeffs = [int(c) for c in match["c"].split(",")]
    try:
        return make_rule(int(match["m"]), int(match["lo"]), int(match["hi"]), coeffs)
    except ContractViolation as exc:
        raise ParseError(f"invalid rule {text!r}: {exc}") from exc


def format_rule(rule: AdditiveRule) -> str:
    coeffs = ",".join(map(str, rule.coeffs))
    return f"m={rule.m};range={rule.range_lo}..{rule.range_hi};coeffs={coeffs}"
