"""
Tabular reports for optimization results

pandas tables for outcome certification thresholds, per-combination
discrimination values, robustness mixtures and seesaw traces, with CSV export.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import pandas as pd

from ..algorithms.advantage import SeesawTrace
from ..algorithms.discrimination import FreeGuessResult
from ..algorithms.robustness import RobustnessResult
from ..utils.logging import log_info


@dataclass
class TableConfig:
    """Configuration for table generation"""
    precision: Optional[int] = None      # round floats when set; None keeps full precision
    label_base: int = 0                  # 1 prints outcome labels 1-based


def _labels(combination: Sequence[int], base: int) -> str:
    return "(" + ",".join(str(b + base) for b in combination) + ")"


class ThresholdTable:
    """Simulable optimum per outcome number and whether an observed value exceeds it"""

    def __init__(self, config: Optional[TableConfig] = None):
        self.config = config or TableConfig()

    def generate(self, thresholds: List[float], observed: Optional[float] = None,
                 stat_tol: float = 0.0) -> pd.DataFrame:
        data = []
        for k, value in enumerate(thresholds, 1):
            row = {"k": k, "optimal_free_guess": value}
            if observed is not None:
                row["excluded"] = observed > value + stat_tol
            data.append(row)
        df = pd.DataFrame(data)
        return df.round(self.config.precision) if self.config.precision is not None else df


class CombinationTable:
    """Optimal sub-ensemble value of every combination"""

    def __init__(self, config: Optional[TableConfig] = None):
        self.config = config or TableConfig()

    def generate(self, free: FreeGuessResult) -> pd.DataFrame:
        data = [{
            "x": x,
            "combination": _labels(combination, self.config.label_base),
            "value": value,
            "best": x == free.best_combination,
        } for x, (combination, value) in enumerate(zip(free.combinations, free.per_combination_values))]
        df = pd.DataFrame(data)
        return df.round(self.config.precision) if self.config.precision is not None else df


class MixtureTable:
    """Mixture weights p(x) of the simulating measurement found by the robustness primal"""

    def __init__(self, config: Optional[TableConfig] = None):
        self.config = config or TableConfig()

    def generate(self, result: RobustnessResult) -> pd.DataFrame:
        data = [{
            "x": x,
            "combination": _labels(combination, self.config.label_base),
            "weight": weight,
            "used": result.sub_povms[x] is not None,
        } for x, (combination, weight) in enumerate(zip(result.scheme.combinations, result.weights))]
        df = pd.DataFrame(data)
        return df.round(self.config.precision) if self.config.precision is not None else df


class SeesawTable:
    """Ratio per iteration of the best restart, plus the final ratio of every restart"""

    def __init__(self, config: Optional[TableConfig] = None):
        self.config = config or TableConfig()

    def generate(self, trace: SeesawTrace) -> pd.DataFrame:
        data = [{"restart": trace.best_restart, "iteration": i, "ratio": step.ratio,
                 "improvement": step.ratio - trace.iterations[i - 1].ratio if i else None}
                for i, step in enumerate(trace.iterations)]
        return pd.DataFrame(data, columns=["restart", "iteration", "ratio", "improvement"])

    def generate_restarts(self, trace: SeesawTrace) -> pd.DataFrame:
        return pd.DataFrame([{"restart": i, "seed": seed, "final_ratio": ratio, "best": i == trace.best_restart}
                             for i, (seed, ratio) in enumerate(zip(trace.seeds, trace.restart_ratios))])


class TableGenerator:
    """Main table generator class"""

    def __init__(self, config: Optional[TableConfig] = None):
        self.config = config or TableConfig()
        self.thresholds = ThresholdTable(self.config)
        self.combinations = CombinationTable(self.config)
        self.mixture = MixtureTable(self.config)
        self.seesaw = SeesawTable(self.config)

    def seesaw_tables(self, trace: SeesawTrace) -> Dict[str, pd.DataFrame]:
        return {"iterations": self.seesaw.generate(trace),
                "restarts": self.seesaw.generate_restarts(trace)}

    def export_csv(self, df: pd.DataFrame, filepath: str):
        df.to_csv(filepath, index=False, float_format="%.17g")
        log_info(f"Table exported to {filepath}")
