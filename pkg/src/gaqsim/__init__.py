"""Genetic-algorithm synthesis of digital quantum simulation circuits and
error-resilient composite gates, at exact-diagonalization scale."""

__version__ = "0.1.0"
