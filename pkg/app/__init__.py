"""Exact multiparameter R-matrices, their deformations and classical limits."""
