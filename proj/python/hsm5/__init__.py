"""Five-axis HSM toolpath engine: surfaces, toolpaths, kinematics and simulation."""

from ._hsm5 import *  # noqa: F401,F403
from ._hsm5 import __doc__  # noqa: F401

__version__ = "0.1.0"
