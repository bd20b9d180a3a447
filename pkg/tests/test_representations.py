import unittest
from math import comb

import numpy as np
import pytest

from qwps.models import (
    ConstraintKind,
    DimensionMismatchError,
    PreconditionError,
    TruncationError,
)
from qwps.ncalgebra import AlgebraElement, lens_relation_suite, x, xi, z, z_star
from qwps.representations import (
    PiRepresentation,
    ShiftOperator,
    TruncatedSpace,
    energy,
    in_intersection,
    in_subspace,
    intersection_basis,
    interior_states,
    lattice_states,
    lens_irrep,
    numeric_relation_results,
    numeric_relation_suite,
    pi_k,
    relabel_sphere_state,
    relabeling_deviation,
    remainder_labels,
    sphere_rep,
    subspace_basis,
)
from qwps.weights import sharp

Q = 0.5


@pytest.fixture
def hopf_sphere():
    return sphere_rep(1, Q, cutoff=10)


class TestLattice(unittest.TestCase):
    def test_state_count(self):
        for n in range(1, 4):
            for cutoff in range(6):
                self.assertEqual(comb(cutoff + n, n), len(lattice_states(n, cutoff)))

    def test_states_are_ordered_by_norm(self):
        norms = [sum(m) for m in lattice_states(3, 5)]
        self.assertEqual(sorted(norms), norms)

    def test_subspaces_far_apart_are_orthogonal(self):
        for h in range(2, 5):
            for j in range(h + 1):
                for k in range(j + 2, h + 1):
                    both = [
                        m for m in lattice_states(h, 10)
                        if in_subspace(m, j) and in_subspace(m, k)
                    ]
                    self.assertEqual([], both)

    def test_intersection_is_neighbouring_overlap(self):
        for h in range(1, 4):
            for k in range(1, h + 1):
                for m in lattice_states(h, 8):
                    self.assertEqual(
                        in_subspace(m, k - 1) and in_subspace(m, k),
                        in_intersection(m, k),
                    )

    def test_intersection_example(self):
        states = [state.m for state in intersection_basis(2, 1, 2)]
        expected = [m for m in lattice_states(2, 2) if m[0] > m[1]]
        self.assertEqual(expected, states)
        self.assertEqual(ConstraintKind.PI_K, intersection_basis(2, 1, 2)[0].tag.kind)

    def test_top_subspace_is_monotone(self):
        states = [state.m for state in subspace_basis(2, 2, 4)]
        self.assertEqual([m for m in lattice_states(2, 4) if m[0] <= m[1]], states)

    def test_intersection_needs_positive_k(self):
        with self.assertRaises(PreconditionError):
            intersection_basis(2, 0, 4)

    def test_interior(self):
        space = TruncatedSpace.full(2, 4)
        self.assertTrue(all(sum(m) <= 2 for m in interior_states(space, 2)))
        self.assertEqual(6, len(interior_states(space, 2)))


class TestShiftOperator(unittest.TestCase):
    def setUp(self):
        self.space = TruncatedSpace.full(1, 5)

    def raise_rule(self, m):
        return [((m[0] + 1,), 1.0)]

    def test_dropped_amplitudes_are_counted(self):
        operator = ShiftOperator.from_rule(self.space, self.raise_rule)
        self.assertEqual(1, operator.dropped)

    def test_strict_truncation(self):
        with self.assertRaises(TruncationError):
            ShiftOperator.from_rule(self.space, self.raise_rule, strict=True)

    def test_adjoint_lowers(self):
        operator = ShiftOperator.from_rule(self.space, self.raise_rule).adjoint()
        self.assertEqual([((1,), 1.0)], operator.action()[(2,)])

    def test_coordinate_text(self):
        operator = ShiftOperator.from_rule(self.space, self.raise_rule)
        lines = operator.to_coordinate_text().splitlines()
        self.assertEqual(len(self.space) - 1, len(lines))
        self.assertEqual("1 0 1", lines[0])

    def test_apply_checks_length(self):
        with self.assertRaises(DimensionMismatchError):
            ShiftOperator.identity(self.space).apply(np.ones(3))

    def test_operators_on_different_spaces(self):
        other = TruncatedSpace.full(1, 5)
        with self.assertRaises(DimensionMismatchError):
            ShiftOperator.identity(self.space) + ShiftOperator.identity(other)


class TestSphereRepresentation(unittest.TestCase):
    def test_z0_on_vacuum(self):
        rep = sphere_rep(2, Q, cutoff=4)
        image = rep.generator(("z", 0)).action()[(0, 0)]
        self.assertEqual(1, len(image))
        self.assertEqual((1, 0), image[0][0])
        self.assertAlmostEqual((1 - Q**2) ** 0.5, image[0][1])

    def test_last_generator_is_twisted_diagonal(self):
        rep = sphere_rep(2, Q, lam=1j, cutoff=4)
        diagonal = rep.generator(("z", 2)).diagonal()
        for position, m in enumerate(rep.space.states):
            self.assertAlmostEqual(1j * Q ** sum(m), diagonal[position])

    def test_twist_must_have_modulus_one(self):
        with self.assertRaises(PreconditionError):
            sphere_rep(1, Q, lam=2.0)

    def test_partition_of_unity(self):
        rep = sphere_rep(3, Q, cutoff=6)
        total = ShiftOperator.zero(rep.space)
        for i in range(4):
            total = total + rep.generator(("x", i))
        columns = rep.space.interior(0)
        self.assertLess(
            total.max_deviation(ShiftOperator.identity(rep.space), columns), 1e-12
        )

    def test_x_is_z_times_adjoint_on_interior(self):
        rep = sphere_rep(2, Q, cutoff=6)
        for i in range(3):
            product = rep.generator(("z", i)) @ rep.generator(("z*", i))
            self.assertLess(
                product.max_deviation(rep.generator(("x", i)), rep.space.interior(1)),
                1e-12,
            )

    def test_apply_identity(self):
        rep = sphere_rep(2, Q, cutoff=4)
        vector = np.arange(len(rep.space), dtype=float)
        np.testing.assert_allclose(vector, rep.apply(AlgebraElement.one(2), vector))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            sphere_rep(2, Q, cutoff=3).matrix_of(z(1, 0))


def off_diagonal_max(matrix) -> float:
    coo = matrix.tocoo()
    mask = coo.row != coo.col
    return float(np.abs(coo.data[mask]).max()) if mask.any() else 0.0


def test_sphere_z_star_z_is_positive_diagonal(hopf_sphere):
    matrix = hopf_sphere.matrix_of(z_star(1, 0) * z(1, 0)).matrix
    assert off_diagonal_max(matrix) < 1e-14
    assert np.all(matrix.diagonal() >= 0)
    assert np.all(matrix.diagonal() <= 1 + 1e-14)


class TestPiRepresentation(unittest.TestCase):
    def test_higher_x_vanish(self):
        for k in range(3):
            rep = pi_k(2, k, (2, 1, 1), (1, 0), Q, cutoff=6)
            for i in range(k + 1, 3):
                self.assertTrue(np.all(rep.x_diagonals[i] == 0))

    def test_bottom_representation_is_a_character(self):
        rep = pi_k(2, 0, (2, 1, 1), (1, 0), Q, cutoff=6)
        np.testing.assert_allclose(rep.x_diagonals[0], 1.0)
        np.testing.assert_allclose(rep.generator(("zeta", 0)).diagonal(), 1.0)

    def test_lens_x_eigenvalues(self):
        p, r = (2, 1, 3), (1, 0)
        rep = lens_irrep(p, r, Q, cutoff=6)
        for position, m in enumerate(rep.space.states):
            self.assertAlmostEqual(
                Q ** (2 * energy(m, p, r, 2)), rep.x_diagonals[2][position]
            )

    def test_remainders_checked(self):
        with self.assertRaises(PreconditionError):
            PiRepresentation((2, 3), (2,), 1, Q, 6)

    def test_level_checked(self):
        with self.assertRaises(PreconditionError):
            pi_k(3, 1, (1, 1), (0, 0, 0), Q)

    def test_z_star_z_is_diagonal_in_unit_interval(self):
        rep = pi_k(2, 1, (1, 1, 1), (0, 0), Q, cutoff=6)
        for i in range(3):
            matrix = rep.matrix_of(z_star(2, i) * z(2, i)).matrix
            self.assertLess(off_diagonal_max(matrix), 1e-14)
            self.assertTrue(np.all(matrix.diagonal() >= -1e-14))
            self.assertTrue(np.all(matrix.diagonal() <= 1 + 1e-14))

    def test_xi_is_a_weighted_shift(self):
        p = (2, 1, 1)
        rep = pi_k(2, 1, p, (1, 0), Q, cutoff=6)
        table = rep.matrix_of(xi(0, 1, sharp(p))).action()
        for images in table.values():
            self.assertLessEqual(len(images), 1)

    def test_diagonal_of_matches_matrix(self):
        p = (2, 1, 1)
        rep = pi_k(2, 2, p, (1, 0), Q, cutoff=6)
        element = x(2, 1) * x(2, 2) + xi(1, 1, sharp(p))
        np.testing.assert_allclose(
            rep.matrix_of(element).diagonal(), rep.diagonal_of(element), atol=1e-14
        )

    def test_exponent_table_reads_energies(self):
        p, r = (2, 3), (1,)
        rep = lens_irrep(p, r, Q, cutoff=5)
        table = rep.exponent_table(1)
        for position, m in enumerate(rep.space.states):
            self.assertEqual(energy(m, p, r, 1), table[position, 0])

    def test_exponent_table_survives_underflow(self):
        p, r = (3, 2), (1,)
        for k in (0, 1):
            rep = pi_k(1, k, p, r, 0.1, cutoff=200)
            table = rep.exponent_table(1)
            for position, m in enumerate(rep.space.states):
                expected = energy(m, p, r, 1) if k == 1 else -1
                self.assertEqual(expected, table[position, 0])

    def test_exponent_table_matches_float_diagonals(self):
        p, r = (2, 1, 1), (1, 0)
        for k in range(3):
            rep = pi_k(2, k, p, r, Q, cutoff=6)
            table = rep.exponent_table(2)
            for column in range(2):
                values = rep.tail_diagonal(column + 1)
                exact = np.where(
                    table[:, column] >= 0, Q ** (2.0 * table[:, column]), 0.0
                )
                np.testing.assert_allclose(values, exact, rtol=1e-12, atol=1e-300)


class TestRelabeling(unittest.TestCase):
    def test_relabel_state(self):
        self.assertEqual((5, 3), relabel_sphere_state((2, 3), (2, 3, 1), (1, 0)))

    def test_lens_irrep_is_sphere_restriction(self):
        for r in remainder_labels((2,)):
            self.assertLess(relabeling_deviation((2, 3), r, Q, cutoff=8), 1e-10)

    def test_remainder_labels(self):
        self.assertEqual([(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)],
                         remainder_labels((2, 3)))
        self.assertEqual([()], remainder_labels(()))


class TestNumericRelations(unittest.TestCase):
    def test_zeta_commutation_in_lens_irrep(self):
        p = (2, 1, 3)
        relations = [
            relation for relation in lens_relation_suite(p, max_power=1)
            if relation.name == "D"
        ]
        results = numeric_relation_results(
            lens_irrep(p, (1, 0), Q, cutoff=12), relations
        )
        self.assertEqual(3, len(results))
        self.assertTrue(all(result.holds for result in results))

    def test_suite_for_n1(self):
        results = numeric_relation_suite((2, 3), Q, cutoff=8, max_power=2)
        self.assertTrue(results)
        self.assertTrue(all(result.holds for result in results))
        self.assertEqual({"numeric"}, {result.mode for result in results})


@pytest.mark.slow
def test_numeric_suite_in_dimension_two():
    results = numeric_relation_suite((2, 1, 1), Q, cutoff=7, max_power=2)
    assert all(result.holds for result in results)
