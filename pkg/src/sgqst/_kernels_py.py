"""Pure numpy versions of the compiled Pauli kernels.

Same signatures and semantics as ``_kernels.pyx``; used when the extension
is not built or when ``SGQST_PURE=1`` is set.
"""
import numpy as np

_PHASES = np.array([1, 1j, -1, -1j])


def _signed_columns(dim, xmask, zmask, ny):
    b = np.arange(dim, dtype=np.int64)
    cols = b[None, :] ^ xmask[:, None]
    parity = np.bitwise_count(b[None, :] & zmask[:, None]) & 1
    signs = 1.0 - 2.0 * parity
    return b, cols, signs, _PHASES[ny % 4]


def pauli_traces(rho, xmask, zmask, ny):
    dim = rho.shape[0]
    b, cols, signs, phase = _signed_columns(dim, xmask, zmask, ny)
    return phase * np.sum(rho[b[None, :], cols] * signs, axis=1)


def pauli_expectations(rho, xmask, zmask, ny):
    return pauli_traces(rho, xmask, zmask, ny).real.copy()


def pauli_combination(coeffs, xmask, zmask, ny, dim):
    b, cols, signs, phase = _signed_columns(dim, xmask, zmask, ny)
    vals = (coeffs * phase)[:, None] * signs
    out = np.zeros((dim, dim), dtype=np.complex128)
    np.add.at(out, (cols, np.broadcast_to(b, cols.shape)), vals)
    return out
