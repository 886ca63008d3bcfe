"""Density matrices, GHZ construction and state distances."""
from dataclasses import dataclass

import numpy as np

from . import linalg
from .pauli import (MAX_QUBITS, PauliError, PauliString, enumerate_paulis, expectations,
                    parse_label, pauli_masks)
from . import kernels

STATE_TOL = 1e-9


class StateError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated n-qubit density matrix.

    Construction checks Hermiticity, unit trace and positivity, each to
    ``STATE_TOL``.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        d = m.shape[0]
        if m.ndim != 2 or m.shape != (d, d) or d < 2 or d & (d - 1):
            raise StateError(f"density matrix must be 2^n x 2^n, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > STATE_TOL:
            raise StateError("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        if abs(np.trace(m).real - 1.0) > STATE_TOL:
            raise StateError(f"density matrix has trace {np.trace(m).real:.12g}")
        wmin = np.linalg.eigvalsh(m)[0]
        if wmin < -STATE_TOL:
            raise StateError(f"density matrix has negative eigenvalue {wmin:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.dim.bit_length() - 1

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def _mat(x):
    return np.asarray(getattr(x, "matrix", x), dtype=complex)


def _check_n(n):
    if not 1 <= n <= MAX_QUBITS:
        raise StateError(f"qubit count {n} outside [1, {MAX_QUBITS}]")


def ghz(n: int) -> DensityMatrix:
    """|GHZ_n><GHZ_n| with |GHZ_n> = (|0...0> + |1...1>)/sqrt(2)."""
    _check_n(n)
    d = 1 << n
    m = np.zeros((d, d), dtype=complex)
    m[0, 0] = m[0, -1] = m[-1, 0] = m[-1, -1] = 0.5
    return DensityMatrix(m)


def maximally_mixed(n: int) -> DensityMatrix:
    _check_n(n)
    d = 1 << n
    return DensityMatrix(np.eye(d, dtype=complex) / d)


def basis_mixture(n: int, indices) -> DensityMatrix:
    """Equal classical mixture of computational basis states."""
    d = 1 << n
    m = np.zeros((d, d), dtype=complex)
    for i in indices:
        m[i, i] += 1.0 / len(indices)
    return DensityMatrix(m)


def from_pauli_vector(estimates, n: int) -> np.ndarray:
    """(I + sum_P m_P P) / 2**n from a mapping of Pauli strings (or labels) to reals.

    The result is Hermitian but not necessarily positive.
    """
    _check_n(n)
    paulis, coeffs = [], []
    for key, val in dict(estimates).items():
        p = key if isinstance(key, PauliString) else parse_label(key, n)
        if p.n != n:
            raise PauliError(f"operator {p.label} has length {p.n}, expected {n}")
        if p.is_identity:
            raise PauliError("identity coefficient is fixed to 1 and may not be supplied")
        paulis.append(p)
        coeffs.append(float(val))
    d = 1 << n
    out = np.eye(d, dtype=complex)
    if paulis:
        out += kernels.pauli_combination(np.array(coeffs), *pauli_masks(paulis), d)
    return out / d


def to_pauli_vector(rho) -> dict:
    """Expectations of every non-identity Pauli string, keyed by PauliString."""
    m = _mat(rho)
    n = m.shape[0].bit_length() - 1
    paulis = enumerate_paulis(n)
    return dict(zip(paulis, expectations(m, paulis)))


def _clipped(m):
    eig = linalg.eigh(m)
    w = eig.eigenvalues
    # eigenvalues at the rounding level are zero; their square roots are not small
    noise = len(w) * np.finfo(float).eps * max(np.abs(w).max(), 1.0)
    w = np.where(w > noise, w, 0.0)
    w = w / w.sum()
    return eig, w


def fidelity(a, b) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(b) a sqrt(b)))**2.

    Computed as the squared nuclear norm of sqrt(a) sqrt(b), which avoids
    taking square roots of the rounding noise in near-zero eigenvalues.
    Eigenvalues of either input at or below the rounding level are set to
    zero and the input is renormalized first.
    """
    ma, mb = _mat(a), _mat(b)
    if ma.shape != mb.shape:
        raise StateError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    eig_a, wa = _clipped(ma)
    eig_b, wb = _clipped(mb)
    prod = eig_a.reassemble(np.sqrt(wa)) @ eig_b.reassemble(np.sqrt(wb))
    f = np.sum(np.linalg.svd(prod, compute_uv=False)) ** 2
    return float(min(max(f, 0.0), 1.0))


def trace_distance(a, b) -> float:
    ma, mb = _mat(a), _mat(b)
    if ma.shape != mb.shape:
        raise StateError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    w = np.linalg.eigvalsh(0.5 * ((ma - mb) + (ma - mb).conj().T))
    return float(0.5 * np.sum(np.abs(w)))
