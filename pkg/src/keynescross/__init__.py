"""Keynesian cross model: equilibria, stability, phase portraits and bifurcation sweeps."""
__version__ = '0.1.0'
