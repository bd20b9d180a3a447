import unittest

import pytest

from qwps.connection import (
    Idempotent,
    TensorElement,
    idempotent,
    idempotent_report,
    nontriviality_certificate,
    strong_connection,
    trace_closed_form_n1,
    trace_of_idempotent,
)
from qwps.fredholm import as_label, trace_difference
from qwps.models import CoefficientSource, PreconditionError
from qwps.ncalgebra import AlgebraElement, x, z
from qwps.qarith import ONE, Q

QV = 0.5


class TestStrongConnection(unittest.TestCase):
    def test_degree_zero_is_unit(self):
        connection = strong_connection(0, (2, 3))
        one = AlgebraElement.one(1)
        self.assertEqual([(one, one)], connection.pairs)

    def test_contracts_to_one(self):
        for p in ((2, 3), (1, 1), (3, 2)):
            for k in (-2, -1, 1, 2):
                self.assertEqual(
                    AlgebraElement.one(len(p) - 1),
                    strong_connection(k, p).contract(),
                )

    def test_unmerged_size(self):
        self.assertEqual(4, strong_connection(2, (2, 3)).unmerged_size)
        self.assertEqual(9, strong_connection(-2, (1, 1, 1)).unmerged_size)

    def test_closed_form_source(self):
        connection = strong_connection(1, (2, 3), CoefficientSource.CLOSED_FORM)
        self.assertEqual(AlgebraElement.one(1), connection.contract())

    def test_needs_pairwise_coprime_weights(self):
        with self.assertRaises(PreconditionError):
            strong_connection(1, (2, 4))

    def test_line_module_indices(self):
        for k in (1, 2, -1):
            indices = strong_connection(k, (2, 3)).line_module_indices((2, 3))
            self.assertTrue(all(pair == ({k}, {-k}) for pair in indices))


class TestTensorElement(unittest.TestCase):
    def test_merge_moves_scalars_left(self):
        one = AlgebraElement.one(1)
        tensor = TensorElement([(one, z(1, 0) * Q), (one * 2, z(1, 0))])
        merged = tensor.merged()
        self.assertEqual(1, len(merged))
        self.assertEqual(2, merged.unmerged_size)
        self.assertEqual(tensor.contract(), merged.contract())

    def test_merge_drops_cancelled_pairs(self):
        one = AlgebraElement.one(1)
        tensor = TensorElement([(one, x(1, 1)), (one * -1, x(1, 1))])
        self.assertEqual(0, len(tensor.merged()))


class TestIdempotent(unittest.TestCase):
    def test_reports(self):
        for p in ((2, 3), (1, 1), (1, 3)):
            for k in (1, -1, 2):
                report = idempotent_report(k, p)
                self.assertTrue(report.idempotent)
                self.assertTrue(report.coinvariant)
                self.assertLessEqual(report.size, report.unmerged_size)

    def test_report_entries(self):
        report = idempotent_report(1, (2, 3), with_entries=True)
        self.assertEqual(report.size, len(report.entries))
        self.assertTrue(all(len(row) == report.size for row in report.entries))

    def test_detects_non_idempotent(self):
        one = AlgebraElement.one(1)
        broken = Idempotent([[one * 2]], 1)
        self.assertFalse(broken.is_idempotent())

    def test_trace_for_trivial_weights(self):
        # z0* z0 + z1* z1 = 1 + (1 - q^2) x1
        expected = AlgebraElement.one(1) + x(1, 1) * (ONE - Q**2)
        self.assertEqual(expected, trace_of_idempotent(1, (1, 1)))
        self.assertEqual(expected, trace_closed_form_n1(1, 1))

    def test_closed_form_trace_is_exact_for_closed_coefficients(self):
        for p in ((2, 3), (3, 2), (2, 1)):
            self.assertEqual(
                trace_closed_form_n1(*p),
                trace_of_idempotent(1, p, CoefficientSource.CLOSED_FORM),
            )

    def test_closed_form_trace_pairs_like_recursion(self):
        p = (2, 3)
        for r in ((0,), (1,)):
            label = as_label(1, r)
            recursion, _ = trace_difference(
                trace_of_idempotent(1, p), label, p, QV, 16
            )
            closed, _ = trace_difference(
                trace_closed_form_n1(*p), label, p, QV, 16
            )
            self.assertAlmostEqual(recursion, closed, places=6)

    def test_idempotent_of_negative_degree(self):
        self.assertTrue(idempotent(-1, (2, 3)).is_idempotent())


class TestNontriviality(unittest.TestCase):
    def test_trivial_weights_pair_to_minus_one(self):
        report = nontriviality_certificate((1, 1), QV, cutoff=16)
        self.assertTrue(report.nontrivial)
        self.assertEqual(0, report.trivial_value)
        self.assertAlmostEqual(-1.0, report.values[0].oracle_value, places=6)

    def test_every_remainder_pairs_to_minus_one(self):
        for q in (0.3, 0.5):
            report = nontriviality_certificate((2, 3), q, cutoff=16)
            self.assertEqual(2, len(report.values))
            self.assertTrue(report.nontrivial)
            for value in report.values:
                self.assertAlmostEqual(-1.0, value.oracle_value, places=6)
                self.assertTrue(value.agrees)

    def test_value_does_not_depend_on_q(self):
        first = nontriviality_certificate((1, 3), 0.3, cutoff=16)
        second = nontriviality_certificate((1, 3), 0.6, cutoff=24)
        self.assertAlmostEqual(
            first.values[0].oracle_value, second.values[0].oracle_value, places=5
        )


@pytest.mark.slow
def test_nontrivial_in_dimension_two():
    report = nontriviality_certificate((2, 1, 1), QV, cutoff=12)
    assert report.nontrivial


@pytest.mark.slow
@pytest.mark.parametrize("k", [-3, 3])
@pytest.mark.parametrize("p", [(2, 1, 1), (1, 2, 3)])
def test_contracts_to_one_in_dimension_two(k, p):
    assert strong_connection(k, p).contract() == AlgebraElement.one(2)


@pytest.mark.slow
@pytest.mark.parametrize("q", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("p", [(1, 3), (2, 3), (2, 1, 1)])
def test_minus_one_for_every_q(p, q):
    report = nontriviality_certificate(p, q, cutoff=24)
    assert report.nontrivial
    assert [round(value.oracle_value) for value in report.values] == \
        [-1] * len(report.values)
