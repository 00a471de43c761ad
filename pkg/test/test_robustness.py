#!/usr/bin/env python3
"""
Tests for the simulability robustness programs and effective outcome numbers
"""

import unittest

import numpy as np

from outcome_optimizer.algorithms.discrimination import advantage
from outcome_optimizer.algorithms.robustness import (
    build_dual,
    build_primal,
    effective_outcome_number,
    robustness,
)
from outcome_optimizer.core.exceptions import DomainError
from outcome_optimizer.core.models import OptimizationConfig, Povm
from outcome_optimizer.solvers.conic import detect_available_backends
from outcome_optimizer.utils import catalog
from outcome_optimizer.utils.logging import OptimizationLogger

HAS_BACKEND = any(detect_available_backends().values())


class TestProgramStructure(unittest.TestCase):
    """Block and constraint counts of the primal and dual models"""

    def test_primal_shape(self):
        primal = build_primal(catalog.sic_qubit(), 2)
        # C(4,2) combinations with 2 sub-outcomes each
        self.assertEqual(primal.psd_block_count, 12)
        self.assertEqual(primal.lmi_count, 4)
        self.assertEqual(primal.equality_count, 6)

    def test_dual_shape(self):
        dual = build_dual(catalog.trine(), 2)
        self.assertEqual(dual.psd_block_count, 3)
        self.assertEqual(dual.free_block_count, 3)
        self.assertEqual(dual.lmi_count, 6)

    def test_identity_is_strictly_feasible_for_primal(self):
        povm = catalog.random_povm(2, 4, 5)
        primal = build_primal(povm, 2)
        point = {name: 2 * np.eye(2) for name in primal.blocks}
        self.assertTrue(primal.is_strictly_feasible(point))

    def test_n_out_of_range(self):
        for n in (0, 4):
            with self.subTest(n=n):
                with self.assertRaises(DomainError):
                    robustness(catalog.trine(), n)


@unittest.skipUnless(HAS_BACKEND, "no conic backend installed")
class TestRobustnessValues(unittest.TestCase):
    """Known values, duality and the m/n bound"""

    def setUp(self):
        self.config = OptimizationConfig()
        self.logger = OptimizationLogger("test-robustness")

    def test_basis_against_trivial_measurements(self):
        result = robustness(catalog.projective_basis(2), 1, self.config, self.logger)
        self.assertAlmostEqual(result.robustness, 1.0, places=6)
        self.assertAlmostEqual(result.primal_value, result.dual_value, places=6)
        self.assertFalse(result.is_simulable)

    def test_n_equal_m_is_free(self):
        for povm in (catalog.trine(), catalog.sic_qubit(), catalog.projective_basis(3)):
            with self.subTest(povm=str(povm)):
                result = robustness(povm, povm.outcome_count, self.config, self.logger)
                self.assertLessEqual(result.robustness, 1e-7)

    def test_trivial_povm_is_free(self):
        result = robustness(Povm.trivial(2, 3), 1, self.config, self.logger)
        self.assertLessEqual(result.robustness, 1e-7)

    def test_simulated_povms_have_zero_robustness(self):
        for seed in range(50):
            d = 2 + seed % 2
            m = 3 + (seed // 2) % 2
            with self.subTest(seed=seed, d=d, m=m):
                povm = catalog.random_simulable_povm(d, m, 2, seed)
                result = robustness(povm, 2, self.config, self.logger)
                self.assertLessEqual(result.robustness, 1e-7)
                self.assertTrue(result.is_simulable)
                self.assertLessEqual(result.gap, 1e-6)

    def test_random_povms_respect_outcome_ratio_bound(self):
        for seed in range(100):
            m = 3 + seed % 2
            with self.subTest(seed=seed, m=m):
                result = robustness(catalog.random_povm(2, m, seed), 2, self.config, self.logger)
                self.assertLessEqual(1 + result.robustness, m / 2 + 1e-6)
                self.assertLessEqual(abs(result.primal_value - result.dual_value), 1e-6)

    def test_qubit_povms_collapse_to_four_outcomes(self):
        for seed in range(20):
            with self.subTest(seed=seed):
                result = robustness(catalog.random_povm(2, 5, 1000 + seed), 4, self.config, self.logger)
                self.assertLessEqual(result.robustness, 1e-6)

    def test_trine_witness_attains_robustness(self):
        trine = catalog.trine()
        result = robustness(trine, 2, self.config, self.logger)
        self.assertGreater(result.robustness, 1e-3)
        self.assertIsNotNone(result.extracted_ensemble)
        report = advantage(result.extracted_ensemble, trine, 2, self.config, self.logger)
        self.assertAlmostEqual(report.advantage_ratio, 1 + result.robustness, delta=1e-6)

    def test_recovered_simulation_is_consistent(self):
        trine = catalog.trine()
        result = robustness(trine, 2, self.config, self.logger)
        self.assertAlmostEqual(sum(result.weights), 1.0, places=6)
        self.assertIsNotNone(result.simulated_povm)
        self.assertEqual(result.simulated_povm.outcome_count, 3)
        # M_b + noise_b = (1 + R) O_b
        scale = 1 + result.robustness
        for b in range(3):
            with self.subTest(b=b):
                lhs = trine.effects[b].data + result.noise[b].data
                rhs = scale * result.simulated_povm.effects[b].data
                self.assertLessEqual(np.max(np.abs(lhs - rhs)), 1e-5)
                self.assertGreaterEqual(np.linalg.eigvalsh(result.noise[b].data)[0], -1e-6)

    def test_robustness_nonincreasing_in_n(self):
        for seed in range(50):
            with self.subTest(seed=seed):
                povm = catalog.random_povm(2, 4, 2000 + seed)
                values = [robustness(povm, n, self.config, self.logger).robustness for n in (1, 2, 3)]
                self.assertGreaterEqual(values[0] + 1e-6, values[1])
                self.assertGreaterEqual(values[1] + 1e-6, values[2])

    def test_inaccurate_primary_solves_still_certify_simulability(self):
        # Instances on which the preferred backend stops inaccurate at default tolerance
        for m, n, seed in [(3, 2, 80), (5, 4, 1004)]:
            with self.subTest(m=m, n=n, seed=seed):
                result = robustness(catalog.random_povm(2, m, seed), n, self.config, self.logger)
                self.assertLessEqual(result.robustness, 1e-6)
                self.assertLessEqual(result.gap, 1e-6)
                self.assertIsNotNone(result.extracted_ensemble)

    def test_robustness_is_convex(self):
        for seed in range(10):
            first = catalog.random_povm(2, 4, 3000 + seed)
            second = catalog.random_povm(2, 4, 3100 + seed)
            r1 = robustness(first, 2, self.config, self.logger).robustness
            r2 = robustness(second, 2, self.config, self.logger).robustness
            for weight in (0.25, 0.5, 0.75):
                with self.subTest(seed=seed, weight=weight):
                    mixed = robustness(first.mix(second, weight), 2, self.config, self.logger).robustness
                    self.assertLessEqual(mixed, weight * r1 + (1 - weight) * r2 + 1e-6)

    def test_robustness_ignores_outcome_order(self):
        for seed in range(10):
            povm = catalog.random_povm(2, 4, 4000 + seed)
            reference = robustness(povm, 2, self.config, self.logger).robustness
            for order in ([1, 0, 2, 3], [3, 2, 1, 0], [2, 3, 0, 1]):
                with self.subTest(seed=seed, order=order):
                    relabeled = robustness(povm.permuted(order), 2, self.config, self.logger).robustness
                    self.assertAlmostEqual(relabeled, reference, delta=1e-6)

    def test_simulability_follows_configured_threshold(self):
        trine = catalog.trine()
        strict = robustness(trine, 2, self.config, self.logger)
        self.assertEqual(strict.simulability_threshold, self.config.simulability_threshold)
        self.assertFalse(strict.is_simulable)
        lenient = robustness(trine, 2, OptimizationConfig(simulability_threshold=0.5), self.logger)
        self.assertEqual(lenient.simulability_threshold, 0.5)
        self.assertTrue(lenient.is_simulable)

    def test_result_serializes(self):
        payload = robustness(catalog.trine(), 2, self.config, self.logger).to_dict()
        self.assertEqual(payload["combinations"], [[0, 1], [0, 2], [1, 2]])
        self.assertEqual(len(payload["witness_effects"]), 3)


@unittest.skipUnless(HAS_BACKEND, "no conic backend installed")
class TestEffectiveOutcomeNumber(unittest.TestCase):

    def test_known_measurements(self):
        cases = [
            (Povm.trivial(2, 3), 1),
            (catalog.projective_basis(2, 4), 2),
            (catalog.projective_basis(3), 3),
            (catalog.trine(), 3),
            (catalog.sic_qubit(), 4),
        ]
        for povm, expected in cases:
            with self.subTest(povm=str(povm), expected=expected):
                self.assertEqual(effective_outcome_number(povm), expected)

    def test_simulated_povm_needs_at_most_n(self):
        povm = catalog.random_simulable_povm(2, 4, 2, 7)
        self.assertLessEqual(effective_outcome_number(povm), 2)


if __name__ == '__main__':
    unittest.main()
