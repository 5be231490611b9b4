"""Finite-level laboratory for grid functions over a non-Archimedean scalar model."""

from ultralab._core import *  # noqa: F401,F403
from ultralab._core import __doc__  # noqa: F401
