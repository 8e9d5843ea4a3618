"""Exact integer and modular linear algebra.

Smith normal form over the integers, and solution counting / enumeration for
congruence systems ``A x = b (mod m)`` with composite moduli.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import ContractViolation, EnumerationRefused


@dataclass(frozen=True)
class IntMatrix:
    """Immutable dense integer matrix (row-major, arbitrary precision)."""

    rows: int
    cols: int
    data: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ContractViolation(f"negative shape {self.rows}x{self.cols}")
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ContractViolation(
                f"entries do not match shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int | None = None) -> IntMatrix:
        data = tuple(tuple(int(v) for v in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((self.rows, self.cols, self.data))
            object.__setattr__(self, "_hash", h)
            return h

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.data]

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ContractViolation(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols_t = list(zip(*other.data)) if other.rows else [()] * other.cols
        return IntMatrix(self.rows, other.cols, tuple(
            tuple(sum(a * b for a, b in zip(r, c)) for c in cols_t) for r in self.data))

    def dot(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * v for a, v in zip(r, x)) for r in self.data)

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.data[i][i] for i in range(min(self.rows, self.cols)))


def determinant(M: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = M.rows
    if n != M.cols:
        raise ContractViolation("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = M.tolist()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SNFResult:
    """Decomposition ``U @ M @ V == D`` with unimodular U, V."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.D.diagonal()


def _find_pivot(a, t, rows, cols):
    best = None
    for i in range(t, rows):
        row = a[i]
        for j in range(t, cols):
            v = row[j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
    return best


@lru_cache(maxsize=4096)
def smith_normal_form(M: IntMatrix) -> SNFResult:
    """Smith normal form of an integer matrix, computed over Z.

    Pivot choice is the smallest nonzero absolute value in the trailing
    submatrix, ties broken by lowest (row, col).
    """
    rows, cols = M.rows, M.cols
    a = M.tolist()
    u = IntMatrix.identity(rows).tolist()
    v = IntMatrix.identity(cols).tolist()

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        for r in v:
            r[j], r[k] = r[k], r[j]

    def add_row(dst, src, q):
        # row[dst] += q * row[src]
        ra, sa = a[dst], a[src]
        for c in range(cols):
            ra[c] += q * sa[c]
        ru, su = u[dst], u[src]
        for c in range(rows):
            ru[c] += q * su[c]

    def add_col(dst, src, q):
        for r in a:
            r[dst] += q * r[src]
        for r in v:
            r[dst] += q * r[src]

    for t in range(min(rows, cols)):
        while True:
            piv = _find_pivot(a, t, rows, cols)
            if piv is None:
                break
            _, pi, pj = piv
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            p = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
            if any(a[i][t] for i in range(t + 1, rows)) or any(
                    a[t][j] for j in range(t + 1, cols)):
                continue
            bad = next((i for i in range(t + 1, rows)
                        if any(a[i][j] % p for j in range(t + 1, cols))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        if a[t][t] == 0:
            # trailing submatrix is zero
            break

    return SNFResult(IntMatrix.from_rows(u, rows), IntMatrix.from_rows(a, cols),
                     IntMatrix.from_rows(v, cols))


@dataclass(frozen=True)
class SolutionSet:
    """Solutions of ``A x = b (mod m)``.

    ``free_description`` lists, per transformed coordinate, how many values it
    may take; its product is ``count`` when the system is consistent.
    """

    modulus: int
    consistent: bool
    count: int
    particular: tuple[int, ...] | None = None
    free_description: tuple[int, ...] = ()
    # internal: transformed-space data used for enumeration
    _steps: tuple[tuple[int, int], ...] = field(default=(), repr=False, compare=False)
    _V: IntMatrix | None = field(default=None, repr=False, compare=False)


def _check_system(A: IntMatrix, b: Sequence[int], m: int) -> None:
    if m < 2:
        raise ContractViolation(f"modulus must be >= 2, got {m}")
    if len(b) != A.rows:
        raise ContractViolation(
            f"rhs has length {len(b)} but the matrix has {A.rows} rows")


def solve_mod(A: IntMatrix, b: Sequence[int], m: int) -> SolutionSet:
    _check_system(A, b, m)
    n = A.cols
    if A.rows == 0:
        return SolutionSet(m, True, m ** n, (0,) * n, (m,) * n,
                           tuple((0, 1) for _ in range(n)), IntMatrix.identity(n))
    snf = smith_normal_form(A)
    c = [x % m for x in snf.U.dot(b)]
    diag = snf.D.diagonal()
    y0 = []
    steps = []
    for i, d in enumerate(diag):
        g = math.gcd(d, m)
        if c[i] % g:
            return SolutionSet(m, False, 0)
        mg = m // g
        if mg == 1:
            y0.append(0)
        else:
            y0.append((c[i] // g) * pow((d // g) % mg, -1, mg) % mg)
        steps.append((y0[-1], mg))
    # rows beyond the diagonal are zero rows of D
    if any(c[i] for i in range(len(diag), A.rows)):
        return SolutionSet(m, False, 0)
    for _ in range(len(diag), n):
        y0.append(0)
        steps.append((0, 1))
    mults = tuple(m // s for _, s in steps)
    count = math.prod(mults)
    x0 = tuple(v % m for v in snf.V.dot(y0))
    return SolutionSet(m, True, count, x0, mults, tuple(steps), snf.V)


@lru_cache(maxsize=65536)
def _count_plan(A: IntMatrix, m: int):
    """Per-matrix data for counting: U mod m, per-row gcd conditions, full count."""
    snf = smith_normal_form(A)
    diag = snf.D.diagonal()
    gcds = [math.gcd(d, m) for d in diag] + [m] * (A.rows - len(diag))
    u = tuple(tuple(x % m for x in row) for row in snf.U.data)
    count = math.prod(gcds[:len(diag)]) * m ** (A.cols - len(diag))
    return u, tuple(gcds), count


def count_solutions(A: IntMatrix, b: Sequence[int], m: int) -> int:
    """Number of solutions; same result as ``solve_mod(A, b, m).count``."""
    _check_system(A, b, m)
    if A.rows == 0:
        return m ** A.cols
    u, gcds, count = _count_plan(A, m)
    for row, g in zip(u, gcds):
        if sum(x * y for x, y in zip(row, b)) % g:
            return 0
    return count


def enumerate_solutions(A: IntMatrix, b: Sequence[int], m: int, cap: int) -> list[tuple[int, ...]]:
    """All solutions in lexicographic order; refuses when there are more than ``cap``."""
    sol = solve_mod(A, b, m)
    if sol.count > cap:
        raise EnumerationRefused(sol.count, cap)
    if not sol.consistent:
        return []
    V = sol._V
    choices = [[(y + k * step) % m for k in range(m // step)] for y, step in sol._steps]
    out = [tuple(v % m for v in V.dot(y)) for y in itertools.product(*choices)]
    out.sort()
    return out
