"""
Usage examples for Outcome Optimizer
"""
