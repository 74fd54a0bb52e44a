"""Numerical services: special functions, quadrature, series and identity checks."""
