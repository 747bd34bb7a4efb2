"""Exact hybrid group rings and Iwasawa algebras."""
__version__ = "0.1.0"
