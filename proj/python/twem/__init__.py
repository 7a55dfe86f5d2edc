"""TWEM text classification toolkit."""

from ._twem import *  # noqa: F401,F403
from ._twem import __doc__  # noqa: F401
