"""Schrodingerisation circuits and simulation for the Black-Scholes equation."""
__version__ = "0.1.0"
