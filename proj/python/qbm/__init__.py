from ._qbm import *  # noqa: F401,F403
from ._qbm import __doc__  # noqa: F401

__version__ = "0.1.0"
