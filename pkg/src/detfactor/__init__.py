"""Deterministic factoring and automorphism finding over finite fields."""

__version__ = "0.1.0"
