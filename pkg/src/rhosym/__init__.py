"""Norm derivatives, orthogonality relations and symmetric points in
finite-dimensional Banach spaces."""
