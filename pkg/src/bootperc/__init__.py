"""Bootstrap percolation on Z^2: universality classification, box closures,
Monte Carlo estimation, oriented-percolation bounds, noise sensitivity and
kinetically constrained dynamics."""

__version__ = "0.1.0"
