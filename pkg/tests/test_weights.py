import unittest
from itertools import product

import pytest

from qwps.models import (
    ArithmeticCapacityError,
    MoveKind,
    PairwiseCoprimeVector,
    PreconditionError,
    WeightVector,
)
from qwps.weights import (
    admissible_div,
    admissible_mul,
    as_pairwise_coprime,
    as_weight_vector,
    classify,
    divisibility_criterion,
    factor_sharp,
    is_coprime,
    is_cpn,
    is_cpn_permutation_invariant,
    is_normalized,
    is_pairwise_coprime,
    normalize_gcd,
    partial_quotient,
    reduction_path,
    sharp,
    sharp_twice_factor,
)


class TestWeightVector(unittest.TestCase):
    def test_needs_two_entries(self):
        with self.assertRaises(PreconditionError):
            as_weight_vector((3,))

    def test_rejects_non_positive(self):
        with self.assertRaises(PreconditionError):
            as_weight_vector((1, 0, 2))

    def test_pairwise_coprime_rejects_common_factor(self):
        with self.assertRaises(PreconditionError):
            as_pairwise_coprime((2, 3, 4))

    def test_pairwise_coprime_product(self):
        self.assertEqual(30, as_pairwise_coprime((2, 3, 5)).product)

    def test_conversions_are_idempotent(self):
        weights = WeightVector.of(1, 2)
        self.assertIs(weights, as_weight_vector(weights))
        p = PairwiseCoprimeVector.of(2, 3)
        self.assertIs(p, as_pairwise_coprime(p))


class TestSharp(unittest.TestCase):
    def test_sharp_examples(self):
        self.assertEqual((1, 2, 2), sharp((2, 1, 1)).entries)
        self.assertEqual((1, 1, 1, 1), sharp((1, 1, 1, 1)).entries)

    def test_sharp_twice_for_n_one(self):
        self.assertEqual((2, 3), sharp(sharp((2, 3))).entries)
        self.assertEqual(1, sharp_twice_factor((2, 3)))

    def test_sharp_twice_is_multiple(self):
        for entries in product(range(1, 6), repeat=3):
            factor = sharp_twice_factor(entries)
            self.assertEqual(
                tuple(factor * value for value in entries),
                sharp(sharp(entries)).entries,
            )

    def test_sharp_coprime_iff_pairwise_coprime(self):
        for entries in product(range(1, 9), repeat=3):
            self.assertEqual(
                is_pairwise_coprime(entries), is_coprime(sharp(entries))
            )

    def test_capacity(self):
        with self.assertRaises(ArithmeticCapacityError):
            sharp((2**3000, 2**3000 + 1, 1))

    def test_partial_quotient(self):
        self.assertEqual(3, partial_quotient((3, 1), 0, 1))
        self.assertEqual(1, partial_quotient((3, 1), 1, 0))


class TestFactorSharp(unittest.TestCase):
    def test_examples(self):
        self.assertEqual((2, 1, 1), factor_sharp((1, 2, 2)).entries)
        self.assertIsNone(factor_sharp((1, 2, 3)))
        self.assertEqual((1, 1), factor_sharp((1, 1)).entries)

    def test_round_trip(self):
        for entries in product(range(1, 8), repeat=3):
            if not is_pairwise_coprime(entries):
                continue
            self.assertEqual(entries, factor_sharp(sharp(entries)).entries)

    def test_requires_coprime(self):
        with self.assertRaises(PreconditionError):
            factor_sharp((2, 4, 6))

    def test_normalize_gcd_first(self):
        self.assertEqual((1, 2, 2), normalize_gcd((3, 6, 6)).entries)
        self.assertTrue(is_cpn(normalize_gcd((3, 6, 6))))

    def test_divisibility_criterion(self):
        self.assertIsNone(divisibility_criterion((1, 2, 2)))
        i, j, k = divisibility_criterion((1, 2, 3))
        self.assertNotEqual(0, (1, 2, 3)[k] % partial_quotient((1, 2, 3), i, j))


class TestClassification(unittest.TestCase):
    def test_cpn_examples(self):
        self.assertTrue(is_cpn((1, 2, 2)))
        self.assertTrue(is_cpn((2, 3, 6)))
        self.assertFalse(is_cpn((1, 1, 2)))

    def test_permutation_invariance(self):
        for entries in ((1, 2, 2), (2, 3, 6), (1, 1, 2), (1, 2, 3)):
            self.assertTrue(is_cpn_permutation_invariant(entries))

    def test_normalized(self):
        self.assertTrue(is_normalized((1, 1)))
        self.assertTrue(is_normalized((1, 1, 12)))
        self.assertFalse(is_normalized((1, 2, 2)))
        self.assertTrue(is_pairwise_coprime((2, 3, 5)))

    def test_report(self):
        report = classify((1, 2, 2))
        self.assertTrue(report.is_cpn)
        self.assertEqual((2, 1, 1), report.factor)
        self.assertEqual((1, 1, 1), report.path[-1].result)

    def test_report_for_non_cpn_has_no_factor(self):
        report = classify((1, 1, 2))
        self.assertFalse(report.is_cpn)
        self.assertIsNone(report.factor)


class TestAdmissibleMoves(unittest.TestCase):
    def test_mul(self):
        self.assertEqual((1, 6, 6), admissible_mul((1, 2, 2), 0, 3).entries)
        self.assertIsNone(admissible_mul((1, 1, 2), 2, 2))
        self.assertIsNone(admissible_mul((1, 2, 2), 1, 2))

    def test_div(self):
        self.assertEqual((1, 1, 1), admissible_div((1, 2, 2), 0, 2).entries)
        self.assertIsNone(admissible_div((1, 1, 2), 0, 2))

    def test_non_prime_is_rejected(self):
        with self.assertRaises(PreconditionError):
            admissible_mul((1, 2, 2), 0, 4)

    def test_index_out_of_range(self):
        with self.assertRaises(PreconditionError):
            admissible_div((1, 2, 2), 3, 2)

    def test_reduction_path_reaches_unit(self):
        path = reduction_path((2, 3, 6))
        self.assertIsNotNone(path)
        self.assertEqual((1, 1, 1), path[-1].result)
        self.assertTrue(
            all(move.kind in (MoveKind.MUL, MoveKind.DIV) for move in path)
        )

    def test_reduction_path_of_unit_is_empty(self):
        self.assertEqual([], reduction_path((1, 1, 1)))


@pytest.mark.parametrize("entries", [(1, 2, 2), (2, 3, 6), (6, 10, 15)])
def test_cpn_vectors_reduce_to_unit(entries):
    assert is_cpn(entries)
    assert reduction_path(entries)[-1].result == (1,) * len(entries)


def test_capacity_from_environment(monkeypatch):
    monkeypatch.setenv("QWPS_MAX_BITS", "64")
    with pytest.raises(ArithmeticCapacityError):
        sharp((2**40, 2**40 + 1, 1))
    monkeypatch.setenv("QWPS_MAX_BITS", "128")
    assert sharp((2**40, 2**40 + 1, 1)).entries[2] == 2**40 * (2**40 + 1)
