"""Trilingual entity discovery and linking at desk scale."""

__version__ = "0.1.0"
