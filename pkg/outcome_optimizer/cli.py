"""
Command-line interface

    outcome-optimizer robustness --povm trine.json --n 2
    outcome-optimizer discriminate --ensemble e.json --povm m.json --n 2
    outcome-optimizer seesaw --d 3 --m 3 --n 2 --restarts 20 --seed 42 [--csv trace.csv]
    outcome-optimizer certify --ensemble orth3.json --observed 0.70
    outcome-optimizer effective-outcomes --povm m.json
    outcome-optimizer score --coeffs c.json --preps e.json --assemblage a.json [--free f.json ...]
    outcome-optimizer catalog --kind trine [--out trine.json]

Every command prints a RunReport as JSON on stdout. Exit codes: 0 success,
2 invalid input, 3 solver failure, 64 usage error. Any file argument may be '-'
to read from stdin.
"""

import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple

from . import __version__
from .algorithms.advantage import seesaw
from .algorithms.discrimination import advantage, certify, optimal_free_guess
from .algorithms.generalized import apply_f, generalized_advantage, score
from .algorithms.robustness import effective_outcome_number, robustness
from .core.exceptions import (
    DomainError,
    InvariantViolationError,
    SolverFailureError,
    ValidationError,
)
from .core.linalg import effective_outcome_count
from .core.models import OptimizationConfig
from .reporting.table_generator import TableGenerator
from .utils import catalog
from .utils.logging import OptimizationLogger, log_error, setup_logging
from .utils.serialization import (
    RunReport,
    assemblage_from_payload,
    coefficients_from_payload,
    digest,
    dumps,
    ensemble_from_payload,
    parse_json,
    povm_from_payload,
    read_text,
    write_json,
)

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_SOLVER_FAILURE = 3
EXIT_USAGE = 64


class CliArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 64"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Inputs:
    """Raw input texts in read order, for the report digest"""

    def __init__(self):
        self.texts: List[str] = []

    def load(self, path: str) -> Dict[str, Any]:
        text = read_text(path)
        self.texts.append(text)
        return parse_json(text, "stdin" if path == "-" else path)


def _common_options() -> argparse.ArgumentParser:
    common = CliArgumentParser(add_help=False)
    defaults = OptimizationConfig()
    common.add_argument("--tol", type=float, default=defaults.solver_tol,
                        help=f"solver tolerance (default {defaults.solver_tol:g}). The simulability "
                             f"threshold ({defaults.simulability_threshold:g}), the accepted duality gap "
                             f"({defaults.gap_tol:g}) and the PSD residual of results "
                             f"({defaults.result_psd_tol:g}) scale by tol / {defaults.solver_tol:g} "
                             f"when tol is looser than the default")
    common.add_argument("--jobs", type=int, default=defaults.jobs,
                        help="parallel workers for restarts and per-combination solves (-1: all cores)")
    common.add_argument("--solver", default=defaults.preferred_solver, choices=["auto", "CLARABEL", "SCS"],
                        help="conic backend (default: first available of CLARABEL, SCS)")
    common.add_argument("--dump-dir", default=None, help="write the standard form of every solve as JSON here")
    common.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="stderr log level")
    common.add_argument("--log-dir", default=None, help="also write a log file in this directory")
    return common


def build_parser() -> CliArgumentParser:
    common = _common_options()
    parser = CliArgumentParser(prog="outcome-optimizer",
                               description="Outcome-number robustness of quantum measurements")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = commands.add_parser("robustness", parents=[common], help="robustness of a POVM w.r.t. n-outcome simulation")
    p.add_argument("--povm", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dual-dump", default=None, help="write the dual witnesses Y_b and Z_x here")

    p = commands.add_parser("discriminate", parents=[common], help="advantage of a POVM on an ensemble")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--povm", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--csv", default=None, help="per-combination values as CSV")

    p = commands.add_parser("seesaw", parents=[common], help="search for the maximal advantage")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--convergence-tol", type=float, default=1e-7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None, help="iteration trace as CSV")

    p = commands.add_parser("certify", parents=[common], help="certify an outcome number from a guessing probability")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--observed", type=float, required=True)
    p.add_argument("--stat-tol", type=float, default=0.0)
    p.add_argument("--csv", default=None, help="threshold table as CSV")

    p = commands.add_parser("effective-outcomes", parents=[common], help="effective number of outcomes of a POVM")
    p.add_argument("--povm", required=True)

    p = commands.add_parser("score", parents=[common], help="generalized linear score")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--preps", required=True, help="ensemble with one state per x")
    p.add_argument("--assemblage", required=True)
    p.add_argument("--free", action="append", default=[], help="free assemblage sample (repeatable)")

    p = commands.add_parser("catalog", parents=[common], help="canonical and seeded random instances")
    p.add_argument("--kind", required=True, choices=[k.value for k in catalog.InstanceKind])
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--prior", default="uniform", choices=["uniform", "dirichlet"])
    p.add_argument("--out", default=None, help="also write the bare object here")

    return parser


Outcome = Tuple[Dict[str, Any], Dict[str, float], List[str]]


def _robustness(args, config: OptimizationConfig, inputs: Inputs, logger: OptimizationLogger) -> Outcome:
    povm = povm_from_payload(inputs.load(args.povm), args.povm)
    result = robustness(povm, args.n, config, logger)
    if args.dual_dump:
        write_json(args.dual_dump, {"witness_effects": [y.to_dict() for y in result.witness_effects],
                                    "free_duals": [z.to_dict() for z in result.free_duals]})
    tol = result.solver["tolerance"]
    return (result.to_dict(),
            {"robustness": tol, "primal_value": tol, "dual_value": tol, "gap": config.gap_tol,
             "weights": tol, "simulability_threshold": config.simulability_threshold},
            list(result.warnings))


def _discriminate(args, config, inputs, logger) -> Outcome:
    ensemble = ensemble_from_payload(inputs.load(args.ensemble), args.ensemble)
    povm = povm_from_payload(inputs.load(args.povm), args.povm)
    report = advantage(ensemble, povm, args.n, config, logger)
    if args.csv:
        tables = TableGenerator()
        tables.export_csv(tables.combinations.generate(optimal_free_guess(ensemble, args.n, config, logger)),
                          args.csv)
    return (report.to_dict(),
            {"p_guess": 1e-12, "optimal_free": config.solver_tol, "advantage_ratio": config.solver_tol,
             "per_combination_values": config.solver_tol},
            [])


def _seesaw(args, config, inputs, logger) -> Outcome:
    trace = seesaw(args.d, args.m, args.n, restarts=args.restarts, max_iter=args.max_iter,
                   tol=args.convergence_tol, seed=args.seed, config=config, logger=logger)
    if args.csv:
        tables = TableGenerator()
        tables.export_csv(tables.seesaw.generate(trace), args.csv)
    return (trace.to_dict(),
            {"final_ratio": config.solver_tol, "ratios": config.solver_tol, "restart_ratios": config.solver_tol,
             "bound": 0.0, "convergence_tol": args.convergence_tol},
            list(trace.warnings))


def _certify(args, config, inputs, logger) -> Outcome:
    ensemble = ensemble_from_payload(inputs.load(args.ensemble), args.ensemble)
    result = certify(ensemble, args.observed, args.stat_tol, config, logger)
    if args.csv:
        tables = TableGenerator()
        tables.export_csv(tables.thresholds.generate(result.thresholds, args.observed, args.stat_tol), args.csv)
    warnings = []
    if result.exceeds_all:
        warnings.append("Observed value exceeds the unrestricted optimum")
    return ({"certified_min_outcomes": result.certified_min_outcomes,
             "observed": args.observed,
             "thresholds": [{"k": k, "optimal_free_guess": t} for k, t in enumerate(result.thresholds, 1)],
             "exceeds_all": result.exceeds_all},
            {"thresholds": config.solver_tol, "stat_tol": args.stat_tol},
            warnings)


def _effective_outcomes(args, config, inputs, logger) -> Outcome:
    povm = povm_from_payload(inputs.load(args.povm), args.povm)
    k = effective_outcome_number(povm, config, logger)
    return ({"effective_outcome_number": k, "outcomes": povm.outcome_count,
             "nonzero_effects": effective_outcome_count(povm), "dim": povm.dim},
            {"simulability_threshold": config.simulability_threshold},
            [])


def _score(args, config, inputs, logger) -> Outcome:
    coefficients = coefficients_from_payload(inputs.load(args.coeffs), args.coeffs)
    preparations = ensemble_from_payload(inputs.load(args.preps), args.preps)
    assemblage = assemblage_from_payload(inputs.load(args.assemblage), args.assemblage)

    value = score(coefficients, preparations, assemblage)
    payload: Dict[str, Any] = {
        "score": value,
        "mapped_family": [n.to_dict() for n in apply_f(coefficients, assemblage)],
    }
    tolerances = {"score": 1e-10}
    warnings: List[str] = []

    if args.free:
        samples = [assemblage_from_payload(inputs.load(path), path) for path in args.free]
        result = generalized_advantage(coefficients, assemblage, samples, preparations=preparations,
                                       config=config, logger=logger)
        payload["advantage"] = result.to_dict()
        tolerances["advantage"] = 1e-10
        warnings.extend(result.warnings)

    return payload, tolerances, warnings


def _catalog(args, config, inputs, logger) -> Outcome:
    spec = catalog.InstanceSpec(kind=args.kind, d=args.d, m=args.m, seed=args.seed,
                                rank=args.rank, prior=args.prior)
    instance = catalog.make(spec)
    payload = instance.to_dict()
    if args.out:
        write_json(args.out, payload)
    return ({"spec": spec.to_dict(),
             "type": "ensemble" if spec.kind in catalog.ENSEMBLE_KINDS else "povm",
             "object": payload},
            {"object": 0.0},
            [])


COMMANDS: Dict[str, Callable[..., Outcome]] = {
    "robustness": _robustness,
    "discriminate": _discriminate,
    "seesaw": _seesaw,
    "certify": _certify,
    "effective-outcomes": _effective_outcomes,
    "score": _score,
    "catalog": _catalog,
}


def _config_from_args(args) -> OptimizationConfig:
    config = OptimizationConfig.for_tolerance(args.tol, jobs=args.jobs, preferred_solver=args.solver,
                                              problem_dump_dir=args.dump_dir)
    issues = config.validate()
    if issues:
        raise ValidationError("; ".join(issues))
    return config


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run the command, print the report; returns the exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)

    logger = setup_logging(getattr(logging, args.log_level), args.log_dir)
    logger.set_console_level(getattr(logging, args.log_level))
    logger.reset_statistics()

    try:
        config = _config_from_args(args)
        inputs = Inputs()
        results, tolerances, warnings = COMMANDS[args.command](args, config, inputs, logger)
    except SolverFailureError as e:
        log_error(f"Solver failure: {e} {e.diagnostics}")
        print(f"error: solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE
    except (ValidationError, InvariantViolationError, DomainError) as e:
        print(f"error: invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT

    report = RunReport(
        command=args.command,
        inputs_digest=digest(inputs.texts),
        version=__version__,
        solver_statistics={**logger.get_solver_statistics(), "operations": logger.operation_summary()},
        results=results,
        tolerances=tolerances,
        warnings=warnings,
    )
    print(dumps(report.model_dump()))
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
