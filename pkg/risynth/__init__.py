"""Reconfigurable intelligent surface synthesis and far-field prediction."""

__version__ = "0.1.0"
