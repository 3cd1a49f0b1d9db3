"""Exact combinatorics of toric Fano varieties and stacks with Picard number three."""

__version__ = "0.1.0"
