"""
Test suite for Outcome Optimizer
"""
