#!/usr/bin/env python3
"""
Basic usage of Quantum Outcome Optimizer
Walks through robustness, discrimination, certification and the seesaw search
"""

from outcome_optimizer import (
    OptimizationConfig,
    advantage,
    certify_outcomes,
    effective_outcome_number,
    robustness,
    seesaw,
)
from outcome_optimizer.algorithms.advantage import max_advantage_bound, saturating_instance
from outcome_optimizer.algorithms.discrimination import certify
from outcome_optimizer.reporting.table_generator import TableGenerator
from outcome_optimizer.utils import catalog
from outcome_optimizer.utils.logging import setup_logging


def main():
    print("🔬 Quantum Outcome Optimizer - Basic Example")
    print("=" * 50)
    setup_logging()
    config = OptimizationConfig(solver_tol=1e-8)
    tables = TableGenerator()

    # 1. Robustness of the trine against 2-outcome measurements
    print("\n1. Robustness of the trine POVM (n = 2)...")
    trine = catalog.trine()
    result = robustness(trine, 2, config)
    print(f"  ✓ robustness = {result.robustness:.8f} (gap {result.gap:.2e})")
    print(f"  ✓ bound m/n = {max_advantage_bound(3, 2)}")
    print(tables.mixture.generate(result).to_string(index=False))

    # 2. The dual witness as a discrimination game
    print("\n2. Discrimination on the extracted ensemble...")
    report = advantage(result.extracted_ensemble, trine, 2, config)
    print(f"  ✓ P_guess = {report.p_guess:.8f}")
    print(f"  ✓ simulable optimum = {report.optimal_free:.8f}")
    print(f"  ✓ advantage ratio = {report.advantage_ratio:.8f} (1 + R = {1 + result.robustness:.8f})")

    # 3. Effective outcome numbers
    print("\n3. Effective outcome numbers...")
    for name, povm in [("basis (padded to 4)", catalog.projective_basis(2, 4)),
                       ("trine", trine), ("qubit SIC", catalog.sic_qubit())]:
        print(f"  ✓ {name}: {effective_outcome_number(povm, config)}")

    # 4. Certification from an observed guessing probability
    print("\n4. Certifying outcome numbers on three orthogonal states...")
    ensemble = catalog.uniform_orthogonal_ensemble(3)
    for observed in (0.30, 0.60, 0.70):
        print(f"  ✓ observed {observed:.2f} -> at least {certify_outcomes(ensemble, observed, config=config)} outcomes")
    print(tables.thresholds.generate(certify(ensemble, 1.0, config=config).thresholds, 0.70).to_string(index=False))

    # 5. Saturation and seesaw
    print("\n5. Maximal advantage...")
    instance = saturating_instance(3, 3, 2)
    print(f"  ✓ saturating instance ratio = {instance.ratio:.6f}")
    trace = seesaw(3, 3, 2, restarts=4, max_iter=10, seed=42, config=config)
    print(f"  ✓ seesaw final ratio = {trace.final_ratio:.8f} after {len(trace.iterations)} iterations")
    print(tables.seesaw.generate_restarts(trace).to_string(index=False))

    print("\n✅ Done")


if __name__ == "__main__":
    main()
