"""Mutual information of continuous-aperture and discrete line-array transceivers."""

from ._capmimo import *  # noqa: F401,F403
from ._capmimo import __doc__  # noqa: F401

__version__ = "0.1.0"
