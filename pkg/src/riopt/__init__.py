"""Rearrangement-invariant norms, Copson-type operators and Sobolev embedding optimality."""

__version__ = "0.1.0"
