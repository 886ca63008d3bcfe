"""n-qubit Pauli strings, their dense matrices and expectation values.

Labels are n-character words over ``IXYZ`` with qubit 0 as the leftmost
character. Qubit 0 is also the most significant bit of a computational
basis index, so ``|0...0>`` is index 0 and ``|1...1>`` is index 2**n - 1.

Since ``"I" < "X" < "Y" < "Z"`` in ASCII, plain string ordering of labels is
the lexicographic site ordering used throughout the package.
"""
from dataclasses import dataclass
from functools import cached_property
import itertools

import numpy as np

from . import kernels

MAX_QUBITS = 12
IMAG_TOL = 1e-10
ALPHABET = "IXYZ"

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class PauliError(ValueError):
    """Malformed Pauli label or operator specification."""


@dataclass(frozen=True, order=True)
class PauliString:
    """A tensor product of single-qubit Paulis, stored as its label."""

    label: str

    def __post_init__(self):
        if not self.label or any(c not in ALPHABET for c in self.label):
            raise PauliError(f"invalid Pauli label {self.label!r}")

    @property
    def n(self) -> int:
        return len(self.label)

    @property
    def symbols(self) -> tuple:
        return tuple(self.label)

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.label)

    @property
    def is_identity(self) -> bool:
        return self.weight == 0

    @cached_property
    def masks(self) -> tuple:
        """(x, z, ny): bit-flip mask, sign mask and number of Y sites."""
        x = z = 0
        for i, c in enumerate(self.label):
            bit = 1 << (self.n - 1 - i)
            if c in "XY":
                x |= bit
            if c in "YZ":
                z |= bit
        return x, z, self.label.count("Y")

    def __str__(self):
        return self.label


def parse_label(text: str, n: int) -> PauliString:
    """Parse an n-character label, case-insensitively."""
    if not isinstance(text, str):
        raise PauliError(f"Pauli label must be a string, got {text!r}")
    if len(text) != n:
        raise PauliError(f"Pauli label {text!r} has length {len(text)}, expected {n}")
    label = text.upper()
    bad = [c for c in label if c not in ALPHABET]
    if bad:
        raise PauliError(f"Pauli label {text!r} contains {bad[0]!r} outside {{I,X,Y,Z}}")
    return PauliString(label)


def format_label(p: PauliString) -> str:
    return p.label


def _check_cap(n):
    if n > MAX_QUBITS:
        raise PauliError(f"{n} qubits exceeds the dense-matrix cap of {MAX_QUBITS}")


def to_matrix(p: PauliString) -> np.ndarray:
    """Dense 2**n x 2**n matrix of ``p`` (Kronecker product, qubit 0 first)."""
    _check_cap(p.n)
    m = np.ones((1, 1), dtype=complex)
    for c in p.label:
        m = np.kron(m, _SINGLE[c])
    return m


def enumerate_paulis(n: int, include_identity: bool = False) -> list:
    """All Pauli strings on n qubits in lexicographic I<X<Y<Z order."""
    if n < 1:
        raise PauliError("need at least one qubit")
    out = [PauliString("".join(t)) for t in itertools.product(ALPHABET, repeat=n)]
    return out if include_identity else out[1:]


def pauli_masks(paulis) -> tuple:
    """Stack the (x, z, ny) masks of a sequence of strings into int64 arrays."""
    m = np.array([p.masks for p in paulis], dtype=np.int64).reshape(-1, 3)
    return m[:, 0].copy(), m[:, 1].copy(), m[:, 2].copy()


def _as_matrix(rho):
    return np.asarray(getattr(rho, "matrix", rho))


def expectations(rho, paulis, masks=None) -> np.ndarray:
    """Vector of Tr(rho P) over ``paulis`` (no Hermiticity check).

    ``masks`` may be a precomputed ``pauli_masks(paulis)`` to skip the
    label-to-mask conversion in hot loops.
    """
    mat = _as_matrix(rho)
    if masks is None:
        masks = pauli_masks(paulis)
    return kernels.pauli_expectations(mat, *masks)


def expectation(rho, p: PauliString) -> float:
    """Tr(rho P) via the signed-permutation action of P.

    Raises ``PauliError`` on a dimension mismatch or when the imaginary part
    exceeds ``IMAG_TOL`` (non-Hermitian input).
    """
    mat = _as_matrix(rho)
    if mat.shape != (1 << p.n, 1 << p.n):
        raise PauliError(f"state of shape {mat.shape} does not match {p.n}-qubit operator {p.label}")
    x, z, ny = p.masks
    val = kernels.pauli_traces(mat, [x], [z], [ny])[0]
    if abs(val.imag) > IMAG_TOL:
        raise PauliError(f"Tr(rho {p.label}) has imaginary part {val.imag:.3g}; input is not Hermitian")
    return float(val.real)
