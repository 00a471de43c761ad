#!/usr/bin/env python3
"""
Tests for the conic adapter: Hermitian embedding, model building and the solve loop
"""

import math
import unittest

import numpy as np

from outcome_optimizer.core.exceptions import DomainError, SolverFailureError
from outcome_optimizer.core.models import HermitianMatrix, OptimizationConfig
from outcome_optimizer.solvers.base import BackendOutcome, SolverBackend
from outcome_optimizer.solvers.conic import (
    SdpProblem,
    SolveStatus,
    detect_available_backends,
    embed_hermitian,
    extract_hermitian,
    select_backend,
    solve,
)
from outcome_optimizer.utils.logging import OptimizationLogger, timed_operation

PAULI_Y = np.array([[0, -1j], [1j, 0]])
HAS_BACKEND = any(detect_available_backends().values())


class ScriptedBackend(SolverBackend):
    """Backend replaying a fixed sequence of outcomes"""

    def __init__(self, outcomes, name="scripted"):
        super().__init__()
        self.name = name
        self.outcomes = list(outcomes)
        self.tolerances = []

    def is_available(self) -> bool:
        return True

    def solve(self, problem, tol, max_iterations):
        self.tolerances.append(tol)
        return self.outcomes.pop(0)


def positive_part_problem(matrix) -> SdpProblem:
    """min tr X subject to X >= matrix, X >= 0; optimum is the sum of positive eigenvalues"""
    problem = SdpProblem("positive-part")
    x = problem.add_psd("X", 2)
    problem.add_lmi("cover", x.embedded - SdpProblem.constant(matrix))
    problem.minimize(x.trace())
    return problem


class TestEmbedding(unittest.TestCase):
    """Real symmetric embedding of complex Hermitian matrices"""

    def setUp(self):
        self.matrix = HermitianMatrix(np.array([[1.0, 0.5 - 2j], [0.5 + 2j, -0.3]]))

    def test_embedding_is_symmetric_with_doubled_spectrum(self):
        embedded = embed_hermitian(self.matrix)
        np.testing.assert_allclose(embedded, embedded.T)
        doubled = np.sort(np.repeat(np.linalg.eigvalsh(self.matrix.data), 2))
        np.testing.assert_allclose(np.linalg.eigvalsh(embedded), doubled, atol=1e-12)

    def test_small_examples(self):
        np.testing.assert_array_equal(embed_hermitian(np.eye(2)), np.eye(4))
        np.testing.assert_allclose(np.linalg.eigvalsh(embed_hermitian(PAULI_Y)), [-1, -1, 1, 1], atol=1e-12)
        np.testing.assert_array_equal(np.diag(embed_hermitian(np.diag([2.0, 3.0]))), [2, 3, 2, 3])

    def test_extract_inverts_embed(self):
        self.assertTrue(extract_hermitian(embed_hermitian(self.matrix)).allclose(self.matrix, atol=1e-15))

    def test_extract_symmetrizes_noisy_output(self):
        noisy = embed_hermitian(self.matrix)
        noisy[0, 1] += 1e-7
        self.assertTrue(extract_hermitian(noisy).allclose(self.matrix, atol=1e-7))

    def test_trace_and_inner_factor(self):
        other = HermitianMatrix(np.array([[2.0, 1j], [-1j, 1.0]]))
        a, b = embed_hermitian(self.matrix), embed_hermitian(other)
        self.assertAlmostEqual(np.trace(a) / 2, self.matrix.trace)
        self.assertAlmostEqual(np.sum(a * b) / 2, self.matrix.inner(other))


class TestSdpProblemModel(unittest.TestCase):
    """Declaration, structure and feasibility checking (no solver required for margins)"""

    def test_counts_and_description(self):
        problem = SdpProblem("model")
        x = problem.add_psd("X", 2)
        z = problem.add_hermitian("Z", 2)
        problem.add_lmi("l", x.embedded - z.embedded)
        problem.add_equality("e", z.trace(), 1.0)
        problem.minimize(x.trace())
        self.assertEqual((problem.psd_block_count, problem.free_block_count), (1, 1))
        self.assertEqual((problem.lmi_count, problem.equality_count), (1, 1))
        self.assertIn("1 PSD", str(problem))

    def test_duplicate_block_name(self):
        problem = SdpProblem("dup")
        problem.add_psd("X", 2)
        with self.assertRaises(DomainError):
            problem.add_psd("X", 2)

    def test_undeclared_variable_rejected(self):
        stranger = SdpProblem("other").add_psd("Y", 2)
        problem = SdpProblem("main")
        problem.add_psd("X", 2)
        with self.assertRaises(DomainError):
            problem.add_lmi("bad", stranger.embedded)

    def test_build_requires_objective(self):
        problem = SdpProblem("empty")
        problem.add_psd("X", 2)
        with self.assertRaises(DomainError):
            problem.build()

    def test_strict_feasibility_of_trial_points(self):
        problem = positive_part_problem(PAULI_Y)
        self.assertTrue(problem.is_strictly_feasible({"X": 2 * np.eye(2)}))
        self.assertFalse(problem.is_strictly_feasible({"X": np.eye(2)}))
        margins = problem.constraint_margins({"X": 2 * np.eye(2)})
        self.assertAlmostEqual(margins["lmi:cover"], 1.0)
        self.assertAlmostEqual(margins["psd:X"], 2.0)


class TestSolveLoop(unittest.TestCase):
    """Retry and status classification with a scripted backend"""

    def setUp(self):
        self.problem = positive_part_problem(PAULI_Y)
        self.logger = OptimizationLogger("test-conic")
        self.config = OptimizationConfig(solver_tol=1e-8, retry_factor=10.0)

    def test_numerical_failure_is_retried_with_looser_tolerance(self):
        backend = ScriptedBackend([
            BackendOutcome("optimal_inaccurate", 1.0, 1e-3),
            BackendOutcome("optimal", 1.0, 1e-9),
        ])
        solution = solve(self.problem, config=self.config, backend=backend, logger=self.logger)
        self.assertEqual(solution.status, SolveStatus.OPTIMAL)
        self.assertTrue(solution.retried)
        self.assertEqual(backend.tolerances, [1e-8, 1e-7])
        self.assertAlmostEqual(solution.tolerance, 1e-7)
        self.assertEqual(self.logger.get_solver_statistics()["retries"], 1)

    def test_persistent_failure_is_reported(self):
        backend = ScriptedBackend([
            BackendOutcome("solver_error", float("nan"), float("nan")),
            BackendOutcome("optimal", 1.0, 0.5),
        ])
        solution = solve(self.problem, config=self.config, backend=backend, logger=self.logger)
        self.assertEqual(solution.status, SolveStatus.NUMERICAL_FAILURE)
        with self.assertRaises(SolverFailureError) as ctx:
            solution.require_optimal("positive part")
        self.assertEqual(ctx.exception.diagnostics["status"], "numerical-failure")

    def test_failed_retry_moves_to_fallback_backend(self):
        primary = ScriptedBackend([
            BackendOutcome("optimal_inaccurate", 1.0, 1e-3),
            BackendOutcome("optimal_inaccurate", 1.0, 1e-3),
        ])
        fallback = ScriptedBackend([BackendOutcome("optimal", 1.0, 1e-9)], name="scripted-fallback")
        solution = solve(self.problem, config=self.config, backend=primary, logger=self.logger,
                         fallbacks=[fallback])
        self.assertEqual(solution.status, SolveStatus.OPTIMAL)
        self.assertEqual(solution.backend, "scripted-fallback")
        self.assertTrue(solution.retried)
        self.assertFalse(solution.inaccurate)
        self.assertEqual(primary.tolerances, [1e-8, 1e-7])
        self.assertEqual(fallback.tolerances, [1e-7])

    def test_inaccurate_stop_within_loosened_gap_is_accepted(self):
        backend = ScriptedBackend([
            BackendOutcome("optimal_inaccurate", 1.0, 1e-3),
            BackendOutcome("optimal_inaccurate", 1.0, 5e-8),
        ])
        solution = solve(self.problem, config=self.config, backend=backend, logger=self.logger)
        self.assertEqual(solution.status, SolveStatus.OPTIMAL)
        self.assertTrue(solution.inaccurate)
        self.assertAlmostEqual(solution.tolerance, 1e-7)

    def test_inaccurate_stop_outside_gap_fails(self):
        backend = ScriptedBackend([
            BackendOutcome("optimal_inaccurate", 1.0, 1e-3),
            BackendOutcome("optimal_inaccurate", 1.0, 1e-4),
        ])
        solution = solve(self.problem, config=self.config, backend=backend, logger=self.logger)
        self.assertEqual(solution.status, SolveStatus.NUMERICAL_FAILURE)
        self.assertFalse(solution.inaccurate)

    def test_unreported_gap_stays_unknown(self):
        backend = ScriptedBackend([BackendOutcome("optimal", 1.0, float("nan"))])
        solution = solve(self.problem, config=self.config, backend=backend, logger=self.logger)
        self.assertEqual(solution.status, SolveStatus.OPTIMAL)
        self.assertTrue(math.isnan(solution.gap))

    def test_infeasible_is_not_retried(self):
        backend = ScriptedBackend([BackendOutcome("infeasible", float("inf"), float("nan"))])
        solution = solve(self.problem, config=self.config, backend=backend, logger=self.logger)
        self.assertEqual(solution.status, SolveStatus.INFEASIBLE)
        self.assertFalse(solution.retried)

    def test_operation_record_counts_solves(self):
        self.logger.reset_statistics()
        backend = ScriptedBackend([BackendOutcome("optimal", 1.0, 1e-9), BackendOutcome("optimal", 1.0, 1e-9)])
        self.logger.start_operation("two-solves", {"n": 2})
        solve(self.problem, config=self.config, backend=backend, logger=self.logger)
        solve(self.problem, config=self.config, backend=backend, logger=self.logger)
        record = self.logger.end_operation("two-solves", result={"value": 1.0})
        self.assertEqual(record.solves, 2)
        self.assertEqual(record.details, {"n": 2})
        self.assertIs(self.logger.operation_logs[-1], record)
        self.assertEqual(self.logger.get_solver_statistics()["backends"], {"scripted": 2})

    def test_timed_operation_records_failure(self):
        self.logger.reset_statistics()

        @timed_operation("failing", self.logger)
        def failing():
            raise DomainError("bad input")

        with self.assertRaises(DomainError):
            failing()
        record = self.logger.operation_logs[-1]
        self.assertFalse(record.success)
        self.assertEqual(record.result["error"], "bad input")
        self.assertEqual(record.solves, 0)


@unittest.skipUnless(HAS_BACKEND, "no conic backend installed")
class TestSolveWithBackend(unittest.TestCase):
    """End-to-end solves on small complex SDPs"""

    def test_positive_part_of_pauli_y(self):
        problem = positive_part_problem(PAULI_Y)
        solution = solve(problem).require_optimal("positive part")
        self.assertAlmostEqual(solution.objective_value, 1.0, places=6)
        x = solution.values["X"]
        self.assertIsInstance(x, HermitianMatrix)
        expected = (np.eye(2) + PAULI_Y) / 2
        self.assertTrue(x.allclose(HermitianMatrix(expected), atol=1e-5))
        self.assertIn("lmi:cover", solution.duals)

    def test_nonnegative_scalar(self):
        problem = SdpProblem("scalar")
        t = problem.add_scalar("t")
        problem.add_inequality("nonneg", t.variable)
        problem.minimize(t.variable)
        solution = solve(problem).require_optimal("scalar")
        self.assertAlmostEqual(solution.objective_value, 0.0, places=7)
        self.assertAlmostEqual(solution.values["t"], 0.0, places=6)

    def test_pure_state_optimum(self):
        problem = SdpProblem("density")
        rho = problem.add_psd("rho", 2)
        problem.add_equality("unit-trace", rho.trace(), 1.0)
        problem.maximize(rho.inner(np.diag([1.0, 0.0])))
        solution = solve(problem).require_optimal("density")
        self.assertAlmostEqual(solution.objective_value, 1.0, places=7)

    def test_helstrom_program(self):
        plus = np.full((2, 2), 0.5)
        states = [np.diag([0.5, 0.0]), plus / 2]
        problem = SdpProblem("helstrom")
        effects = [problem.add_psd(f"M[{b}]", 2) for b in range(2)]
        problem.add_equality("completeness", effects[0].embedded + effects[1].embedded, SdpProblem.identity(2))
        problem.maximize(effects[0].inner(states[0]) + effects[1].inner(states[1]))
        solution = solve(problem).require_optimal("helstrom")
        self.assertAlmostEqual(solution.objective_value, 0.5 + np.sqrt(2) / 4, delta=1e-7)

    def test_bounded_maximization(self):
        problem = SdpProblem("bounded")
        y = problem.add_psd("Y", 2)
        problem.add_lmi("upper", SdpProblem.identity(2) - y.embedded)
        problem.maximize(y.inner(np.diag([3.0, -2.0])))
        solution = solve(problem).require_optimal("bounded")
        self.assertAlmostEqual(solution.objective_value, 3.0, places=6)

    def test_infeasible_problem(self):
        problem = SdpProblem("infeasible")
        x = problem.add_psd("X", 2)
        problem.add_equality("negative-trace", x.trace(), -1.0)
        problem.minimize(x.trace())
        self.assertEqual(solve(problem).status, SolveStatus.INFEASIBLE)

    def test_standard_form_dump(self):
        payload = positive_part_problem(PAULI_Y).to_dict()
        self.assertEqual(payload["lmis"], ["cover"])
        self.assertTrue(payload["standard_form"]["cones"]["psd"])

    def test_backend_preference(self):
        available = [name for name, ok in detect_available_backends().items() if ok]
        self.assertEqual(select_backend("auto").solver_name, available[0])
        for preferred in ("CLARABEL", "SCS"):
            with self.subTest(preferred=preferred):
                expected = preferred if preferred in available else available[0]
                self.assertEqual(select_backend(preferred).solver_name, expected)


if __name__ == '__main__':
    unittest.main()
