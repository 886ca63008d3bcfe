"""Dense Hermitian kernels built on a single eigendecomposition.

Matrix functions (exponential, square root) and the Frechet derivative of
the exponential are all evaluated in the eigenbasis; dimensions here never
exceed 2**5 in the benchmarks, so an O(d**3) ``eigh`` is the cheapest route.
"""
from dataclasses import dataclass

import numpy as np

HERMITIAN_RTOL = 1e-9
EXP_MAX_ARG = 700.0
PSD_CLIP_TOL = 1e-10
DEGENERATE_GAP = 1e-9


class LinalgError(ValueError):
    """Input violates a kernel precondition (non-Hermitian, overflow, not PSD)."""


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reassemble(self, values=None) -> np.ndarray:
        """V diag(values) V^dagger, defaulting to the stored eigenvalues."""
        w = self.eigenvalues if values is None else values
        v = self.eigenvectors
        return (v * w) @ v.conj().T


def _hermitian(h):
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {h.shape}")
    resid = np.linalg.norm(h - h.conj().T)
    if resid > HERMITIAN_RTOL * np.linalg.norm(h):
        raise LinalgError(f"matrix is not Hermitian (residual {resid:.3g})")
    return 0.5 * (h + h.conj().T)


def eigh(h) -> HermitianEig:
    """Spectral decomposition with ascending eigenvalues."""
    h = _hermitian(h)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise LinalgError(f"eigendecomposition failed: {exc}") from exc
    return HermitianEig(w, v)


def expm_hermitian(h) -> np.ndarray:
    eig = eigh(h)
    if eig.eigenvalues.size and np.max(np.abs(eig.eigenvalues)) > EXP_MAX_ARG:
        raise LinalgError(
            f"eigenvalue magnitude {np.max(np.abs(eig.eigenvalues)):.4g} exceeds {EXP_MAX_ARG}; "
            "bound the coefficients first")
    return eig.reassemble(np.exp(eig.eigenvalues))


def sqrtm_psd(a) -> np.ndarray:
    """Principal square root of a PSD matrix; eigenvalues down to -1e-10 are clipped."""
    eig = eigh(a)
    w = eig.eigenvalues
    if w.size and w[0] < -PSD_CLIP_TOL:
        raise LinalgError(f"matrix has eigenvalue {w[0]:.3g} < -{PSD_CLIP_TOL}; not PSD")
    return eig.reassemble(np.sqrt(np.clip(w, 0.0, None)))


def exp_divided_differences(w) -> np.ndarray:
    """Matrix phi[i, j] = (e^{w_i} - e^{w_j}) / (w_i - w_j), with the diagonal limit e^{w}.

    Pairs closer than ``DEGENERATE_GAP`` use e^{(w_i + w_j)/2}, which avoids
    cancellation in the quotient.
    """
    w = np.asarray(w, dtype=float)
    ew = np.exp(w)
    diff = w[:, None] - w[None, :]
    close = np.abs(diff) < DEGENERATE_GAP
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = (ew[:, None] - ew[None, :]) / np.where(close, 1.0, diff)
    return np.where(close, np.exp(0.5 * (w[:, None] + w[None, :])), phi)


def frechet_expm(h, direction, eig: HermitianEig = None) -> np.ndarray:
    """Directional derivative D exp(H)[V] by the Daleckii-Krein formula.

    Pass a precomputed ``eig`` of ``h`` to reuse it across directions.
    """
    if eig is None:
        eig = eigh(h)
    if eig.eigenvalues.size and np.max(np.abs(eig.eigenvalues)) > EXP_MAX_ARG:
        raise LinalgError("eigenvalue magnitude exceeds the exponential overflow guard")
    v = eig.eigenvectors
    direction = _hermitian(direction)
    if direction.shape != v.shape:
        raise LinalgError(f"direction shape {direction.shape} does not match {v.shape}")
    inner = v.conj().T @ direction @ v
    return v @ (exp_divided_differences(eig.eigenvalues) * inner) @ v.conj().T


def project_simplex(values) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    v = np.asarray(values, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    mu = css[rho] / (rho + 1.0)
    return np.maximum(v - mu, 0.0)


def project_to_density(a) -> np.ndarray:
    """Frobenius-closest PSD unit-trace matrix to the Hermitian input."""
    eig = eigh(a)
    return eig.reassemble(project_simplex(eig.eigenvalues))
