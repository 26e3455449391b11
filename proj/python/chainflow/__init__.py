"""Flow-level optimizer for service-chain forwarding and computation offloading.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

from ._chainflow import *  # noqa: F401,F403
from ._chainflow import __doc__  # noqa: F401
