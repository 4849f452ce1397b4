"""Exact arithmetic substrate: rings, polynomials, series, escape criteria."""
