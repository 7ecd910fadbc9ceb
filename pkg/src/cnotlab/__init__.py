"""Simulation workbench for conditional quantum dynamics and the controlled-NOT gate."""

__version__ = "0.1.0"
