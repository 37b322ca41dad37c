"""Exact desk-scale verification of MGM duality and the co/contramodule calculus."""

__version__ = "0.1.0"
