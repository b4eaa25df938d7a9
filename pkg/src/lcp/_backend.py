"""Pick the codec kernel at import time.

The compiled extension is preferred; setting ``LCP_PURE_PYTHON=1`` forces
the pure-Python kernels (useful for debugging and for cross-checking).
"""

import os

from . import _pycore

pycore = _pycore

try:
    from . import _ccore as ccore
except ImportError:  # extension not built
    ccore = None

if ccore is not None and not os.environ.get("LCP_PURE_PYTHON"):
    core = ccore
else:
    core = pycore

BACKEND = core.NAME
