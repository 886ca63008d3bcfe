"""Backend selection for the Pauli hot loops.

The Cython extension is used when it imports cleanly; otherwise, or when
the environment variable ``SGQST_PURE`` is set to a non-empty value other
than ``0``, the numpy implementation is used. ``BACKEND`` names the choice.
"""
import os

import numpy as np

from . import _kernels_py

_force_pure = os.environ.get("SGQST_PURE", "") not in ("", "0")

try:
    if _force_pure:
        raise ImportError("pure backend requested")
    from . import _kernels as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"


def _masks(xmask, zmask, ny):
    return (np.ascontiguousarray(xmask, dtype=np.int64),
            np.ascontiguousarray(zmask, dtype=np.int64),
            np.ascontiguousarray(ny, dtype=np.int64))


def pauli_expectations(rho, xmask, zmask, ny, impl=None):
    """Real parts of Tr(rho P_k) for a batch of Pauli strings given as masks."""
    impl = impl or _impl
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    return impl.pauli_expectations(rho, *_masks(xmask, zmask, ny))


def pauli_traces(rho, xmask, zmask, ny, impl=None):
    impl = impl or _impl
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    return impl.pauli_traces(rho, *_masks(xmask, zmask, ny))


def pauli_combination(coeffs, xmask, zmask, ny, dim, impl=None):
    """Dense sum_k coeffs[k] * P_k as a (dim, dim) complex matrix."""
    impl = impl or _impl
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    return impl.pauli_combination(coeffs, *_masks(xmask, zmask, ny), int(dim))
