"""Hot kernels with a compiled core and a numpy fallback.

The compiled extension is used when it was built and importable; set
``WIKICCC_PURE_PYTHON=1`` to force the fallback. ``BACKEND`` names the
active implementation.
"""

import os

from . import _pykernels

BACKEND = "python"
best_split = _pykernels.best_split
grow_tree = _pykernels.grow_tree
points_in_ring = _pykernels.points_in_ring

if os.environ.get("WIKICCC_PURE_PYTHON") != "1":
    try:
        from . import _ckernels
    except ImportError:
        _ckernels = None
    if _ckernels is not None:
        BACKEND = "cython"
        best_split = _ckernels.best_split
        grow_tree = _ckernels.grow_tree
        points_in_ring = _ckernels.points_in_ring


def available_backends():
    """Return ``{name: module}`` for every kernel implementation that imports."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels as compiled
    except ImportError:
        return found
    found["cython"] = compiled
    return found
