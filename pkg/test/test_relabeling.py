#!/usr/bin/env python3
"""
Tests for deterministic relabeling schemes and simulated POVMs
"""

import unittest
from math import comb

import numpy as np

from outcome_optimizer.core.exceptions import DomainError
from outcome_optimizer.core.models import Povm
from outcome_optimizer.core.relabeling import d_value, enumerate_scheme, relabeling_matrix, simulate
from outcome_optimizer.utils import catalog


class TestEnumerateScheme(unittest.TestCase):
    """Combination enumeration"""

    def test_three_choose_two(self):
        scheme = enumerate_scheme(3, 2)
        self.assertEqual(scheme.combinations, ((0, 1), (0, 2), (1, 2)))

    def test_counts_and_ordering(self):
        for m in range(1, 7):
            for n in range(1, m + 1):
                with self.subTest(m=m, n=n):
                    scheme = enumerate_scheme(m, n)
                    self.assertEqual(len(scheme), comb(m, n))
                    self.assertEqual(list(scheme.combinations), sorted(scheme.combinations))
                    self.assertTrue(all(list(x) == sorted(set(x)) for x in scheme.combinations))

    def test_invalid_sizes(self):
        for m, n in [(3, 0), (2, 3), (0, 0)]:
            with self.subTest(m=m, n=n):
                with self.assertRaises(DomainError):
                    enumerate_scheme(m, n)

    def test_combinations_containing(self):
        scheme = enumerate_scheme(4, 2)
        for b in range(4):
            with self.subTest(b=b):
                self.assertEqual(len(scheme.combinations_containing(b)), comb(3, 1))

    def test_index_of(self):
        scheme = enumerate_scheme(5, 3)
        for x, combination in enumerate(scheme.combinations):
            self.assertEqual(scheme.index_of(list(combination)), x)
        with self.assertRaises(ValueError):
            scheme.index_of((2, 1, 0))


class TestDValue(unittest.TestCase):

    def setUp(self):
        self.scheme = enumerate_scheme(3, 2)

    def test_values(self):
        self.assertEqual(d_value(self.scheme, 0, 0, 0), 1)
        self.assertEqual(d_value(self.scheme, 1, 0, 0), 0)
        self.assertEqual(d_value(self.scheme, 2, 1, 1), 1)

    def test_each_sub_outcome_maps_to_one_label(self):
        table = relabeling_matrix(self.scheme)
        np.testing.assert_array_equal(table.sum(axis=0), np.ones((2, 3)))

    def test_out_of_range(self):
        for args in [(3, 0, 0), (0, 2, 0), (0, 0, 3), (-1, 0, 0)]:
            with self.subTest(args=args):
                with self.assertRaises(DomainError):
                    d_value(self.scheme, *args)


class TestSimulate(unittest.TestCase):
    """Simulated POVMs are valid and place weight where the relabeling says"""

    def test_single_combination_places_effects(self):
        scheme = enumerate_scheme(3, 2)
        basis = catalog.projective_basis(2)
        subs = [basis, Povm.trivial(2, 2), Povm.trivial(2, 2)]
        povm = simulate(scheme, subs, [1.0, 0.0, 0.0])
        self.assertTrue(povm.effects[0].allclose(basis.effects[0]))
        self.assertTrue(povm.effects[1].allclose(basis.effects[1]))
        self.assertAlmostEqual(povm.effects[2].trace, 0.0)

    def test_random_inputs_give_valid_povms(self):
        rng = np.random.Generator(np.random.PCG64(11))
        for trial in range(10):
            with self.subTest(trial=trial):
                scheme = enumerate_scheme(4, 2)
                subs = [catalog.random_povm(2, 2, 100 * trial + x) for x in range(len(scheme))]
                weights = rng.dirichlet(np.ones(len(scheme)))
                weights = weights / weights.sum()
                povm = simulate(scheme, subs, weights)
                self.assertEqual(povm.outcome_count, 4)

    def test_rejects_bad_weights(self):
        scheme = enumerate_scheme(3, 2)
        subs = [catalog.projective_basis(2)] * 3
        for weights in ([0.5, 0.5, 0.5], [1.2, -0.2, 0.0], [1.0, 0.0]):
            with self.subTest(weights=weights):
                with self.assertRaises(DomainError):
                    simulate(scheme, subs, weights)

    def test_rejects_wrong_sub_povm_shape(self):
        scheme = enumerate_scheme(3, 2)
        with self.assertRaises(DomainError):
            simulate(scheme, [catalog.trine()] * 3, [1 / 3] * 3)
        with self.assertRaises(DomainError):
            simulate(scheme, [catalog.projective_basis(2, 2), catalog.projective_basis(2, 2),
                              Povm.trivial(3, 2)], [1 / 3] * 3)


if __name__ == '__main__':
    unittest.main()
