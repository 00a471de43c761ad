#!/usr/bin/env python3
"""
Unit tests for domain types and Hermitian linear algebra
"""

import unittest

import numpy as np

from outcome_optimizer.core.exceptions import InvariantViolationError
from outcome_optimizer.core.linalg import (
    effective_outcome_count,
    eigendecompose,
    helstrom_value,
    is_psd,
    reconstruct,
    trace_norm,
)
from outcome_optimizer.core.models import Ensemble, HermitianMatrix, MeasurementAssemblage, OptimizationConfig, Povm
from outcome_optimizer.utils import catalog

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
KET_PLUS = np.array([1, 1]) / np.sqrt(2)


class TestHermitianMatrix(unittest.TestCase):
    """Construction invariants of HermitianMatrix"""

    def test_rejects_non_hermitian(self):
        with self.assertRaises(InvariantViolationError):
            HermitianMatrix(np.array([[0, 1], [0, 0]]))

    def test_rejects_non_square_and_empty(self):
        for bad in (np.zeros((2, 3)), np.zeros((0, 0)), np.array([1.0, 2.0])):
            with self.subTest(shape=bad.shape):
                with self.assertRaises(InvariantViolationError):
                    HermitianMatrix(bad)

    def test_tolerance_absorbs_tiny_asymmetry(self):
        matrix = np.array([[1, 1e-13], [0, 1]], dtype=complex)
        self.assertEqual(HermitianMatrix(matrix).dim, 2)

    def test_data_is_read_only(self):
        h = HermitianMatrix.identity(2)
        with self.assertRaises(ValueError):
            h.data[0, 0] = 5

    def test_dict_round_trip_is_exact(self):
        h = HermitianMatrix.hermitize(np.array([[0.1, 0.2 + 0.3j], [0.2 - 0.3j, 1 / 3]]))
        restored = HermitianMatrix.from_dict(h.to_dict())
        self.assertTrue(np.array_equal(h.data, restored.data))


class TestLinalg(unittest.TestCase):
    """eigendecompose, trace_norm, is_psd and effective_outcome_count"""

    def test_eigendecompose_examples(self):
        cases = [
            (np.eye(2), [1, 1]),
            (np.diag([3.0, -1.0]), [3, -1]),
            (PAULI_X, [1, -1]),
        ]
        for matrix, expected in cases:
            with self.subTest(expected=expected):
                values, vectors = eigendecompose(HermitianMatrix(matrix))
                np.testing.assert_allclose(values, expected, atol=1e-12)
                self.assertLessEqual(np.max(np.abs(reconstruct(values, vectors) - matrix)), 1e-9)

    def test_pauli_x_eigenvectors(self):
        _, vectors = eigendecompose(PAULI_X)
        self.assertAlmostEqual(abs(np.vdot(vectors[:, 0], KET_PLUS)), 1.0, places=12)

    def test_eigendecompose_rejects_non_hermitian(self):
        with self.assertRaises(InvariantViolationError):
            eigendecompose(np.array([[0, 1], [2, 0]], dtype=complex))

    def test_eigenvalues_descending_on_random_matrices(self):
        rng = np.random.Generator(np.random.PCG64(3))
        for trial in range(10):
            with self.subTest(trial=trial):
                g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
                values, vectors = eigendecompose(HermitianMatrix.hermitize(g))
                self.assertTrue(np.all(np.diff(values) <= 0))
                self.assertLessEqual(np.max(np.abs(reconstruct(values, vectors) - (g + g.conj().T) / 2)), 1e-9)

    def test_trace_norm(self):
        difference = HermitianMatrix.basis_projector(2, 0) - HermitianMatrix.projector(KET_PLUS)
        self.assertAlmostEqual(trace_norm(HermitianMatrix.zero(2)), 0.0)
        self.assertAlmostEqual(trace_norm(HermitianMatrix.identity(3)), 3.0)
        self.assertAlmostEqual(trace_norm(difference), np.sqrt(2), places=12)

    def test_is_psd(self):
        self.assertTrue(is_psd(np.eye(2), 1e-9))
        self.assertFalse(is_psd(np.diag([1, -1e-3]), 1e-9))
        self.assertTrue(is_psd(np.diag([1, -1e-12]), 1e-9))

    def test_effective_outcome_count(self):
        self.assertEqual(effective_outcome_count(catalog.projective_basis(2, 3)), 2)
        self.assertEqual(effective_outcome_count(catalog.trine()), 3)
        self.assertEqual(effective_outcome_count(Povm.trivial(2, 4)), 1)

    def test_helstrom_value(self):
        a = HermitianMatrix.basis_projector(2, 0) * 0.5
        b = HermitianMatrix.projector(KET_PLUS) * 0.5
        self.assertAlmostEqual(helstrom_value(a, b), 0.5 + np.sqrt(2) / 4, places=12)


class TestPovm(unittest.TestCase):
    """Povm invariants and transformations"""

    def test_rejects_negative_effect(self):
        with self.assertRaises(InvariantViolationError):
            Povm.from_arrays([np.diag([1.5, 1.0]), np.diag([-0.5, 0.0])])

    def test_rejects_incomplete_sum(self):
        with self.assertRaises(InvariantViolationError):
            Povm.from_arrays([np.diag([1.0, 0.0]), np.diag([0.0, 0.9])])

    def test_rejects_mixed_dimensions(self):
        with self.assertRaises(InvariantViolationError):
            Povm.from_arrays([np.eye(2), np.zeros((3, 3))])

    def test_sanitize_repairs_solver_noise(self):
        noisy = [np.diag([1.0 + 2e-9, -3e-9]), np.diag([-1e-9, 1.0 + 1e-8])]
        povm = Povm.sanitize(noisy)
        total = sum(povm.arrays())
        self.assertLessEqual(np.max(np.abs(total - np.eye(2))), 1e-12)

    def test_padded_and_permuted(self):
        povm = catalog.trine().padded(5)
        self.assertEqual(povm.outcome_count, 5)
        permuted = povm.permuted([4, 3, 2, 1, 0])
        self.assertTrue(permuted.effects[4].allclose(povm.effects[0]))

    def test_mix_is_valid(self):
        mixed = catalog.random_povm(2, 3, 1).mix(catalog.random_povm(2, 3, 2), 0.3)
        self.assertEqual(mixed.outcome_count, 3)

    def test_trivial(self):
        povm = Povm.trivial(3, 2)
        self.assertTrue(povm.effects[0].allclose(HermitianMatrix.identity(3)))
        self.assertAlmostEqual(povm.effects[1].trace, 0.0)


class TestEnsemble(unittest.TestCase):
    """Ensemble invariants"""

    def test_rejects_wrong_total_trace(self):
        with self.assertRaises(InvariantViolationError):
            Ensemble.from_arrays([np.diag([0.5, 0.0]), np.diag([0.0, 0.4])])

    def test_rejects_non_psd_state(self):
        with self.assertRaises(InvariantViolationError):
            Ensemble.from_arrays([np.diag([1.2, -0.2])])

    def test_preparations_split(self):
        ensemble = Ensemble.from_preparations([0.25, 0.75], [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        priors = [p for p, _ in ensemble.preparations()]
        self.assertEqual(priors, [0.25, 0.75])

    def test_zero_mass_state_gets_placeholder(self):
        ensemble = Ensemble.from_arrays([np.diag([0.5, 0.5]), np.zeros((2, 2))])
        p, rho = ensemble.preparations()[1]
        self.assertEqual(p, 0.0)
        self.assertAlmostEqual(rho.trace, 1.0)

    def test_sanitize_normalizes(self):
        ensemble = Ensemble.sanitize([np.diag([2.0, 0.0]), np.diag([0.0, 2.0 - 1e-10])])
        self.assertAlmostEqual(sum(ensemble.priors), 1.0, places=12)


class TestAssemblageAndConfig(unittest.TestCase):

    def test_assemblage_requires_common_dimension(self):
        with self.assertRaises(InvariantViolationError):
            MeasurementAssemblage((catalog.trine(), catalog.projective_basis(3)))

    def test_assemblage_round_trip(self):
        assemblage = MeasurementAssemblage((catalog.trine(), catalog.sic_qubit()))
        restored = MeasurementAssemblage.from_dict(assemblage.to_dict())
        self.assertEqual(restored.outcome_counts, [3, 4])

    def test_config_validation(self):
        self.assertEqual(OptimizationConfig().validate(), [])
        issues = OptimizationConfig(solver_tol=-1, preferred_solver="MOSEK", jobs=0).validate()
        self.assertEqual(len(issues), 3)

    def test_loose_solver_tolerance_scales_thresholds(self):
        defaults = OptimizationConfig()
        self.assertEqual(OptimizationConfig.for_tolerance(defaults.solver_tol), defaults)
        self.assertEqual(OptimizationConfig.for_tolerance(1e-10).gap_tol, defaults.gap_tol)
        loose = OptimizationConfig.for_tolerance(1e-4, jobs=2)
        self.assertAlmostEqual(loose.gap_tol, 1e-2)
        self.assertAlmostEqual(loose.simulability_threshold, 1e-3)
        self.assertAlmostEqual(loose.result_psd_tol, 1e-4)
        self.assertEqual(loose.jobs, 2)
        self.assertEqual(OptimizationConfig.for_tolerance(1e-4, gap_tol=1e-5).gap_tol, 1e-5)


if __name__ == '__main__':
    unittest.main()
