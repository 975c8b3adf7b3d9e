"""Predict which source terms a simultaneous interpreter will leave untranslated."""

__version__ = "0.1.0"
