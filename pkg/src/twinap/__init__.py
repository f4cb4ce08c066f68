"""Desk-scale workbench for admissible tuples, GPY sieve weights, prime
constellations, de Polignac gap statistics and the W-tricked measure."""

__version__ = "0.1.0"
