"""Equivariant linear cuts of the octonionic projective plane."""

__version__ = "0.1.0"
