"""bvlab: desk-scale workbench for prime-progression error terms,
Dirichlet characters, the Heath-Brown decomposition, Dirichlet-polynomial
mean-value checks, and the exact-rational exponent case analysis."""

__version__ = "0.1.0"
