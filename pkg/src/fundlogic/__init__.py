"""Fundamental logic: proofs, decision procedures, lattices and relational frames."""

__version__ = "0.1.0"
