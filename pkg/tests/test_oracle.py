import itertools
from fractions import Fraction

import pytest

from addca.ca_core import GeneralRule, compose_shift, identity_rule, is_surjective, make_rule
from addca.errors import BudgetExceeded
from addca.events import blocks, make_cylinder, measure
from addca.mixing import correlation
from addca.oracle import (WindowUniverse, brute_correlation, brute_measure, brute_preimage,
                          brute_surjectivity)

from conftest import EXAMPLE_BLOCKS


def test_universe_words_are_lexicographic():
    words = WindowUniverse(3, 0, 2).words().tolist()
    assert words == [list(w) for w in itertools.product(range(3), repeat=3)]


def test_universe_budget():
    with pytest.raises(BudgetExceeded):
        WindowUniverse(2, 0, 10, budget=1000)


def test_brute_preimage_example(example_rule, example_block):
    words = brute_preimage(compose_shift(example_rule, 1), example_block)
    assert {"".join(map(str, w.symbols)) for w in words} == EXAMPLE_BLOCKS
    assert len(words) * Fraction(1, 2 ** 9) == measure(example_block)


def test_brute_preimage_identity():
    A = make_cylinder(3, 2, [2, 0])
    assert brute_preimage(identity_rule(3), A) == blocks(A, 10)


def test_general_rule_path_matches_additive():
    rule = make_rule(3, -1, 1, [2, 0, 1])
    table = GeneralRule.from_additive(rule)
    A = make_cylinder(3, 0, [1, 2])
    assert brute_preimage(table, A) == brute_preimage(rule, A)
    B = make_cylinder(3, 1, [0])
    assert brute_correlation(table, A, B, (1, 2)) == brute_correlation(rule, A, B, (1, 2))


def test_general_rule_nonadditive():
    # majority-like rule on two cells over Z_2: output 1 only for 11
    g = GeneralRule(2, 0, 1, (0, 0, 0, 1))
    words = brute_preimage(g, make_cylinder(2, 0, [1]))
    assert [w.symbols for w in words] == [(1, 1)]


def test_brute_correlation_basic(example_rule):
    A = make_cylinder(2, 0, [1])
    assert brute_correlation(example_rule, A, A, (0, 0)) == measure(A)
    far = make_cylinder(2, 6, [0, 1])
    assert brute_correlation(example_rule, A, far, (0, 1)) == Fraction(1, 2) * Fraction(1, 4)
    for i in range(4):
        for j in range(3):
            assert brute_correlation(example_rule, A, A, (i, j)) == correlation(
                example_rule, A, A, (i, j))[0]


def test_brute_surjectivity(example_rule):
    assert brute_surjectivity(example_rule, 4)
    assert not brute_surjectivity(make_rule(4, 0, 1, [2, 2]), 1)
    assert brute_surjectivity(identity_rule(3), 3)


def test_surjectivity_criterion_against_brute_force():
    for m in (2, 3, 4):
        for width in (1, 2, 3, 4):
            for coeffs in itertools.product(range(m), repeat=width):
                if not coeffs[0] or not coeffs[-1]:
                    continue
                rule = make_rule(m, 0, width - 1, coeffs)
                probe = 6 if m ** (6 + width - 1) <= 2 ** 16 else 4
                assert brute_surjectivity(rule, probe) == is_surjective(rule), rule


def test_brute_measure():
    A = make_cylinder(2, 0, [1, 0])
    assert brute_measure(A) == Fraction(1, 4)
