"""Simulation and spectral analysis of reflection-group jump processes
driven by radial particle systems in a Weyl chamber."""

__version__ = "0.1.0"
