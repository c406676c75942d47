"""Supersingular p-adic L-function toolkit for rational elliptic curves."""
from __future__ import annotations

__version__ = "0.1.0"
