"""Lifting structures in finite presheaf categories."""
__version__ = "0.1.0"
