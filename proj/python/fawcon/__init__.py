"""Streaming point-cloud fusion: spatial index, point octrees, fusion-aware convolution."""

from ._fawcon import *  # noqa: F401,F403
from ._fawcon import __version__  # noqa: F401
