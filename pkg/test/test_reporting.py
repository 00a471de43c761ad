#!/usr/bin/env python3
"""
Tests for the pandas report tables
"""

import os
import tempfile
import unittest

import pandas as pd

from outcome_optimizer.algorithms.advantage import SeesawIteration, SeesawTrace
from outcome_optimizer.algorithms.discrimination import FreeGuessResult
from outcome_optimizer.algorithms.robustness import robustness
from outcome_optimizer.reporting import TableConfig, TableGenerator
from outcome_optimizer.solvers.conic import detect_available_backends
from outcome_optimizer.utils import catalog
from outcome_optimizer.utils.logging import OptimizationLogger

HAS_BACKEND = any(detect_available_backends().values())


def make_trace() -> SeesawTrace:
    ensemble = catalog.uniform_orthogonal_ensemble(3)
    povm = catalog.projective_basis(3)
    steps = tuple(SeesawIteration(ensemble, povm, ratio) for ratio in (1.2, 1.4, 1.5))
    return SeesawTrace(d=3, m=3, n=2, iterations=steps, final_ratio=1.5, converged=True,
                       restarts_used=2, best_restart=0, seeds=("saturating", "7"),
                       restart_ratios=(1.5, 1.25), saturation_guaranteed=True)


class TestThresholdTable(unittest.TestCase):

    def setUp(self):
        self.tables = TableGenerator()

    def test_without_observation(self):
        df = self.tables.thresholds.generate([1 / 3, 2 / 3, 1.0])
        self.assertEqual(list(df.columns), ["k", "optimal_free_guess"])
        self.assertEqual(df["k"].tolist(), [1, 2, 3])

    def test_exclusion_flags(self):
        df = self.tables.thresholds.generate([1 / 3, 2 / 3, 1.0], observed=0.7)
        self.assertEqual(df["excluded"].tolist(), [True, True, False])
        df = self.tables.thresholds.generate([1 / 3, 2 / 3, 1.0], observed=0.7, stat_tol=0.05)
        self.assertEqual(df["excluded"].tolist(), [True, False, False])

    def test_rounding(self):
        df = TableGenerator(TableConfig(precision=3)).thresholds.generate([1 / 3])
        self.assertEqual(df["optimal_free_guess"].iloc[0], 0.333)


class TestCombinationTable(unittest.TestCase):

    def test_labels_and_best_row(self):
        free = FreeGuessResult(value=2 / 3, best_combination=1, per_combination_values=[0.5, 2 / 3, 0.6],
                               combinations=[(0, 1), (0, 2), (1, 2)], best_povm=catalog.projective_basis(3),
                               sub_povms=[])
        df = TableGenerator().combinations.generate(free)
        self.assertEqual(df["combination"].tolist(), ["(0,1)", "(0,2)", "(1,2)"])
        self.assertEqual(df["best"].tolist(), [False, True, False])

        one_based = TableGenerator(TableConfig(label_base=1)).combinations.generate(free)
        self.assertEqual(one_based["combination"].iloc[0], "(1,2)")


class TestSeesawTable(unittest.TestCase):

    def test_iterations_and_restarts(self):
        tables = TableGenerator().seesaw_tables(make_trace())
        iterations, restarts = tables["iterations"], tables["restarts"]
        self.assertEqual(len(iterations), 3)
        self.assertTrue(pd.isna(iterations["improvement"].iloc[0]))
        self.assertAlmostEqual(iterations["improvement"].iloc[1], 0.2)
        self.assertEqual(restarts["seed"].tolist(), ["saturating", "7"])
        self.assertEqual(restarts["best"].tolist(), [True, False])

    def test_csv_export(self):
        generator = TableGenerator()
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "trace.csv")
            generator.export_csv(generator.seesaw.generate(make_trace()), path)
            restored = pd.read_csv(path)
        self.assertEqual(restored["ratio"].tolist(), [1.2, 1.4, 1.5])


@unittest.skipUnless(HAS_BACKEND, "no conic backend installed")
class TestMixtureTable(unittest.TestCase):

    def test_weights_form_a_distribution(self):
        result = robustness(catalog.trine(), 2, logger=OptimizationLogger("test-reporting"))
        df = TableGenerator().mixture.generate(result)
        self.assertEqual(len(df), 3)
        self.assertAlmostEqual(df["weight"].sum(), 1.0, places=6)
        self.assertTrue(df.loc[df["used"], "weight"].gt(0).all())

    def test_rounding(self):
        result = robustness(catalog.trine(), 2, logger=OptimizationLogger("test-reporting"))
        df = TableGenerator(TableConfig(precision=2)).mixture.generate(result)
        for raw, shown in zip(result.weights, df["weight"]):
            self.assertAlmostEqual(shown, round(raw, 2), places=12)
        self.assertEqual(df["combination"].tolist(), ["(0,1)", "(0,2)", "(1,2)"])


if __name__ == '__main__':
    unittest.main()
