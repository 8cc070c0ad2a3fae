"""Canonical p-adic parallel transport for unipotent logarithmic connections."""

from .padic import PadicContext, PadicNumber, teichmuller

__all__ = ["PadicContext", "PadicNumber", "teichmuller"]
