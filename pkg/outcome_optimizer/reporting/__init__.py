"""
Reporting module for Outcome Optimizer
"""

from .table_generator import (
    TableConfig,
    TableGenerator,
    ThresholdTable,
    CombinationTable,
    MixtureTable,
    SeesawTable
)

__all__ = [
    'TableConfig',
    'TableGenerator',
    'ThresholdTable',
    'CombinationTable',
    'MixtureTable',
    'SeesawTable'
]
