from ._cfmmlab import *  # noqa: F401,F403
from ._cfmmlab import __doc__  # noqa: F401
