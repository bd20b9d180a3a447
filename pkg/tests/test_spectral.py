import unittest

import numpy as np
import pytest
from pydantic import ValidationError

from qwps.models import (
    DiracSpec,
    FredholmLabel,
    LambdaKind,
    PreconditionError,
)
from qwps.ncalgebra import AlgebraElement, x, z
from qwps.representations import TruncatedSpace
from qwps.spectral import (
    commutator_envelope,
    commutator_profile,
    derivation_defect,
    dirac_envelope,
    dirac_modulus,
    lambda_samples,
    lipschitz_norm,
    multiplicity,
    multiplicity_by_enumeration,
    multiplicity_total,
    spectrum_rows,
    weighted_shift,
    zeta_partial,
)

Q = 0.5


@pytest.fixture
def label():
    return FredholmLabel(h=1, r=(1,))


class TestMultiplicity(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(1, multiplicity(1, 7))
        self.assertEqual(4, multiplicity(2, 3))
        self.assertEqual(286, multiplicity(4, 10))

    def test_matches_enumeration(self):
        for n in range(1, 4):
            for value in range(7):
                self.assertEqual(
                    multiplicity(n, value), multiplicity_by_enumeration(n, value)
                )

    def test_total(self):
        self.assertEqual(10, multiplicity_total(2, 3))
        self.assertEqual(
            multiplicity_total(3, 5), sum(multiplicity(3, t) for t in range(6))
        )

    def test_rejects_bad_input(self):
        with self.assertRaises(PreconditionError):
            multiplicity(0, 2)

    def test_spectrum_rows(self):
        rows = spectrum_rows(DiracSpec(n=3, cutoff=5))
        self.assertEqual(6, len(rows))
        self.assertTrue(all(row["multiplicity"] == row["enumerated"] for row in rows))


class TestLambda(unittest.TestCase):
    def test_identity_is_lipschitz(self):
        self.assertEqual(1.0, lipschitz_norm(lambda_samples(DiracSpec(n=2), 10)))

    def test_power_growth(self):
        spec = DiracSpec(n=2, lambda_kind=LambdaKind.POWER, d=1)
        self.assertEqual(9.0, spec.value(3))
        self.assertGreater(lipschitz_norm(lambda_samples(spec, 10)), 1.0)

    def test_lipschitz_needs_two_samples(self):
        with self.assertRaises(PreconditionError):
            lipschitz_norm([1.0])

    def test_custom_samples(self):
        spec = DiracSpec(n=1, lambda_kind=LambdaKind.CUSTOM, samples=(0, 1, 3, 4))
        self.assertEqual(2.0, lipschitz_norm(lambda_samples(spec, 3)))
        with self.assertRaises(ValueError):
            spec.value(4)

    def test_custom_must_increase(self):
        with self.assertRaises(ValidationError):
            DiracSpec(n=1, lambda_kind=LambdaKind.CUSTOM, samples=(0, 2, 1))

    def test_power_needs_exponent(self):
        with self.assertRaises(ValidationError):
            DiracSpec(n=1, lambda_kind=LambdaKind.POWER)


class TestZeta(unittest.TestCase):
    def test_above_dimension_converges(self):
        diagnostic = zeta_partial(DiracSpec(n=2), 3.0, 256)
        self.assertTrue(diagnostic.convergent)
        self.assertAlmostEqual(-2.0, diagnostic.tail_exponent, places=1)

    def test_below_dimension_diverges(self):
        diagnostic = zeta_partial(DiracSpec(n=2), 1.5, 256)
        self.assertFalse(diagnostic.convergent)
        self.assertEqual(sorted(diagnostic.partial_sums), diagnostic.partial_sums)

    def test_large_s_is_first_term(self):
        diagnostic = zeta_partial(DiracSpec(n=1), 40.0, 8)
        self.assertEqual(1.0, diagnostic.partial_sums[0])
        self.assertAlmostEqual(1.0, diagnostic.partial_sums[-1])

    def test_rejects_bad_arguments(self):
        with self.assertRaises(PreconditionError):
            zeta_partial(DiracSpec(n=1), 0.0, 8)
        with self.assertRaises(PreconditionError):
            zeta_partial(DiracSpec(n=1), 2.0, 3)


class TestWeightedShift(unittest.TestCase):
    def setUp(self):
        self.space = TruncatedSpace.full(2, 6)

    def test_modulus_is_norm(self):
        np.testing.assert_allclose(
            self.space.norms, dirac_modulus(self.space).diagonal()
        )

    def test_derivation_identity(self):
        for k in ((1, 0), (1, -1), (0, -2)):
            shift = weighted_shift(self.space, k, lambda m: Q ** m[0])
            self.assertLess(derivation_defect(shift, k), 1e-12)

    def test_shift_leaving_lattice_is_zero(self):
        shift = weighted_shift(self.space, (-1, 0), lambda m: 1.0)
        self.assertEqual([], shift.action().get((0, 3), []))

    def test_shift_dimension(self):
        with self.assertRaises(PreconditionError):
            weighted_shift(self.space, (1,), lambda m: 1.0)


class TestEnvelope(unittest.TestCase):
    def test_h_m_q_to_the_m(self):
        # max_m m 2^{-m} is reached at m = 1 and m = 2
        self.assertEqual(0.5, dirac_envelope(1, Q, 16))
        self.assertEqual(1.0, dirac_envelope(2, Q, 16))

    def test_shift_delays_the_decay(self):
        self.assertEqual(3.0, dirac_envelope(1, Q, 16, shift=3))
        self.assertEqual(2.0, dirac_envelope(1, Q, 2, shift=3))

    def test_unit_gets_twice_the_envelope(self):
        self.assertEqual(
            2 * dirac_envelope(1, Q, 16),
            commutator_envelope(AlgebraElement.one(1), 1, Q, 16),
        )

    def test_monomials_add_up(self):
        element = x(1, 1)
        self.assertGreaterEqual(
            commutator_envelope(element, 1, Q, 16),
            2 * dirac_envelope(1, Q, 16),
        )


def test_unit_commutes_with_dirac(label):
    profile = commutator_profile(
        AlgebraElement.one(1), DiracSpec(n=1), label, (2, 3), Q, [6, 8]
    )
    assert profile.norms == [0.0, 0.0]
    assert profile.bounded


def test_diagonal_generator_has_bounded_commutator(label):
    profile = commutator_profile(x(1, 1), DiracSpec(n=1), label, (2, 3), Q, [6, 10, 14])
    assert profile.bounded
    assert profile.norms[-1] == pytest.approx(profile.norms[-2], abs=1e-9)
    assert profile.norms[0] > 0


def test_non_lipschitz_profile_is_observed_only(label):
    spec = DiracSpec(n=1, lambda_kind=LambdaKind.POWER, d=0.5)
    profile = commutator_profile(x(1, 1), spec, label, (2, 3), Q, [6, 10])
    assert profile.bounded is None


def test_profile_preconditions(label):
    with pytest.raises(PreconditionError):
        commutator_profile(x(1, 1), DiracSpec(n=1), label, (2, 3), Q, [8, 6])
    with pytest.raises(PreconditionError):
        commutator_profile(z(1, 0), DiracSpec(n=1), label, (2, 3), Q, [6])
    with pytest.raises(PreconditionError):
        commutator_profile(
            x(1, 1), DiracSpec(n=1), FredholmLabel(h=0), (2, 3), Q, [6]
        )
