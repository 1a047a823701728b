"""weaklab: desk-scale numerical laboratory for weak measurements.

Closed-form weak values and weak correlations over pre/mid/post-selected
protocols, an exact von Neumann pointer simulator, a Born-rule Monte
Carlo ensemble, and canned experiments (Pauli suite, canonical
commutator, Riemann operator) with a config-driven CLI.
"""

__version__ = "0.1.0"
