"""Probabilistic trajectory forecasting over learned flow fields."""

from flowcast._core import Model, mhd, synthesize

__all__ = ["Model", "mhd", "synthesize"]
