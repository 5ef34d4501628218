"""Competency-question benchmark tooling over WordNet, SUMO and their mapping."""

__version__ = "0.1.0"
