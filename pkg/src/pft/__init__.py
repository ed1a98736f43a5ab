"""Workbench for many-sorted second-order abstraction theories.

Subpackages cover the concrete language (syntax), axiom schemas
(schemas), a small Hilbert-style proof checker (kernel), brute-force
finite semantics (models), proof construction helpers (tactics), the
comprehension-recovery compiler (compiler), the arithmetic
interpretation (pa2), the shipped corpus (corpus) and the command line
front end (cli).
"""

__version__ = "0.1.0"
