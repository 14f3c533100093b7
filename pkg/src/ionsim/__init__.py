"""Pulse-level simulator of a trapped Yb-171 ion quantum computer."""

__version__ = "0.1.0"
