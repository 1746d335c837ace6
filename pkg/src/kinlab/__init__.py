"""Numerical checks of the compressible Euler and acoustic limits of the Boltzmann equation."""
__version__ = "0.1.0"
