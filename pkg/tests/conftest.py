import itertools
import math

import pytest

from addca import make_cylinder, make_rule
from addca.modlinalg import IntMatrix, determinant

# The 16 blocks on [-3, 5] listed for the (f sigma)-preimage of _{-2}[10101]_2.
EXAMPLE_BLOCKS = {
    "111110000", "100000111", "010001011", "001001101", "000101110", "000011111",
    "111000001", "011101000", "001111100", "110100010", "110010011", "101100100",
    "100110110", "101010101", "010111010", "011011001",
}


def banded_ones(rows, band):
    cols = rows + band - 1
    return IntMatrix.from_rows([[1 if n <= c < n + band else 0 for c in range(cols)]
                                for n in range(rows)], cols)


def brute_solutions(A, b, m):
    """Every x in Z_m^cols with A x = b (mod m), lexicographic."""
    return [x for x in itertools.product(range(m), repeat=A.cols)
            if all((v - r) % m == 0 for v, r in zip(A.dot(x), b))]


def determinantal_divisors(M):
    """Invariant factors from gcds of k x k minors (independent of elimination)."""
    out, prev = [], 1
    for k in range(1, min(M.rows, M.cols) + 1):
        g = 0
        for rs in itertools.combinations(range(M.rows), k):
            for cs in itertools.combinations(range(M.cols), k):
                g = math.gcd(g, determinant(IntMatrix.from_rows(
                    [[M[r, c] for c in cs] for r in rs], k)))
        if g == 0:
            out.extend([0] * (min(M.rows, M.cols) - k + 1))
            break
        out.append(g // prev)
        prev = g
    return out


@pytest.fixture
def example_rule():
    return make_rule(2, -2, 2, [1, 1, 1, 1, 1])


@pytest.fixture
def example_block():
    return make_cylinder(2, -2, [1, 0, 1, 0, 1])


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
