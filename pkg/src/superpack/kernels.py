"""Backend selection for the hot kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementation in ``_pykernels``.  Setting ``SUPERPACK_PURE_PYTHON=1``
forces the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("SUPERPACK_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

lattice_norms = _impl.lattice_norms
cofactor = _impl.cofactor
stationarity_residual = _impl.stationarity_residual
stationarity_jacobian = _impl.stationarity_jacobian

__all__ = [
    "BACKEND",
    "lattice_norms",
    "cofactor",
    "stationarity_residual",
    "stationarity_jacobian",
]
