"""Span programs, adversary bounds and quantum-walk evaluation at desk scale."""

__version__ = "0.1.0"
