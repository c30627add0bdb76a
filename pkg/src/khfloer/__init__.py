"""Filtered Khovanov-Floer theories over F2."""

__version__ = "0.1.0"
