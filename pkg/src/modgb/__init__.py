"""Multi-modular Groebner bases over the rationals."""

__version__ = "0.1.0"
