"""Numerical toolkit for wedge geometry, Tomita–Takesaki data and geometric modular action."""

__version__ = "0.1.0"
