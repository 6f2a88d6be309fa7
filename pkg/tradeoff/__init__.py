"""Parallel Tradeoff CLI - memory/time cost frontiers for operator-level parallelism"""
__version__ = "1.0.0"
