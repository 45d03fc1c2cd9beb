"""Symbolic claims validation: controlled English in, audited adjudications out."""

__version__ = "0.1.0"
