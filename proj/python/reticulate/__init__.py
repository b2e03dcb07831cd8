"""Effective conductance of periodic network media on the flat torus."""

from ._core import *  # noqa: F401,F403
from ._core import Error, Network

__all__ = [name for name in dir() if not name.startswith("_")]
