"""Kernel selection: compiled extension when importable, pure Python otherwise.

Set ``NECKLACE_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
if not os.environ.get("NECKLACE_PURE_PYTHON"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

component_labels = _impl.component_labels
articulation_mask = _impl.articulation_mask

__all__ = ["BACKEND", "component_labels", "articulation_mask"]
