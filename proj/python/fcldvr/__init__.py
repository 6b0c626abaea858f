"""Transient simulator and design toolkit for a series-transformer
fault current limiter / sag compensator."""

from fcldvr._core import *  # noqa: F401,F403

__version__ = "0.1.0"
