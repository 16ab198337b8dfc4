"""2D Helmholtz FEM experiment platform."""

__version__ = "0.1.0"
