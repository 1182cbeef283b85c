"""Holomorphic Borcherds products of singular weight for simple lattices.

Exact Eisenstein coefficients of the dual Weil representation, the bounds
that make the search finite, the classification over the catalog of simple
lattices of signature (2, n), and a numeric check of the signature (2, 3)
products against genus-2 theta constants.
"""

__version__ = "0.1.0"
