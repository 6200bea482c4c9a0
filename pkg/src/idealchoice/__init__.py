"""Finite combinatorics of choosing between incompatible ideals.

Hypergraph partition numbers H(n), sign-family numbers I(n), the recursive
tree construction, exact counting bounds and the conditionally convergent
series constructions, all with exact verification.
"""

__version__ = "0.1.0"
