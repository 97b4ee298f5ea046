"""Correlation inequalities for up-sets of permutation orders."""

from .chains import *  # noqa: F401,F403
from .engine import *  # noqa: F401,F403
from .families import *  # noqa: F401,F403
from .measures import *  # noqa: F401,F403
from .orders import *  # noqa: F401,F403
from .perm import *  # noqa: F401,F403
from .permset import PermSet  # noqa: F401

__version__ = "0.1.0"
