"""Block-kernel backend selection.

The compiled Cython kernels are preferred when the extension built; the
numpy backend is the portable fallback.  Set ``TWINBEAM_KERNELS=numpy`` or
``TWINBEAM_KERNELS=cython`` to force a choice (``auto`` is the default).
Both backends expose identical signatures and are interchangeable.
"""

from __future__ import annotations

import os

from . import numpy_backend

try:
    from . import _cy_kernels as cython_backend
except ImportError:
    cython_backend = None

_choice = os.environ.get("TWINBEAM_KERNELS", "auto").lower()
if _choice not in ("auto", "numpy", "cython"):
    raise ValueError(f"TWINBEAM_KERNELS must be auto, numpy or cython, got {_choice!r}")
if _choice == "cython" and cython_backend is None:
    raise ImportError("TWINBEAM_KERNELS=cython but the compiled extension is unavailable")

if _choice in ("auto", "cython") and cython_backend is not None:
    _active = cython_backend
    BACKEND = "cython"
else:
    _active = numpy_backend
    BACKEND = "numpy"

tms_blocks = _active.tms_blocks
apply_symplectic_blocks = _active.apply_symplectic_blocks
apply_loss_blocks = _active.apply_loss_blocks
photon_moments_blocks = _active.photon_moments_blocks
joint_quadrature_variance_blocks = _active.joint_quadrature_variance_blocks
min_symplectic_eigenvalue_blocks = _active.min_symplectic_eigenvalue_blocks

__all__ = [
    "BACKEND",
    "cython_backend",
    "numpy_backend",
    "tms_blocks",
    "apply_symplectic_blocks",
    "apply_loss_blocks",
    "photon_moments_blocks",
    "joint_quadrature_variance_blocks",
    "min_symplectic_eigenvalue_blocks",
]
