"""Statevector simulation and the end-to-end pipeline."""
