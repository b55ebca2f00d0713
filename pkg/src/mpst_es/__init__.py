"""Multiparty session calculus with event-structure semantics."""

__version__ = "0.1.0"
