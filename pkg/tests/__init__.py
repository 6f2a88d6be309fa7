"""Test package for the parallel tradeoff CLI"""
