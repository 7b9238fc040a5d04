"""Numerical algebraic geometry on the cut surfaces: solving, sampling,
singular-point search and classification, and the discriminant checks."""
