"""Exact formal calculus over Grassmann algebras for N=2 superconformal structures."""

__version__ = "0.1.0"
