"""Model-vs-target and model-vs-MLE comparisons, and Pauli residual ranking."""
from dataclasses import dataclass
import csv
import io

import numpy as np

from .operators import full_set
from .pauli import PauliString, expectations, pauli_masks
from .states import StateError, fidelity


@dataclass(frozen=True)
class ResidualEntry:
    pauli: PauliString
    delta: float

    def __post_init__(self):
        if abs(self.delta) > 2.0 + 1e-12:
            raise ValueError(f"residual {self.delta} for {self.pauli.label} exceeds 2 in magnitude")


def _dim(x):
    return np.asarray(getattr(x, "matrix", x)).shape


def target_fidelity(result_state, target_state) -> float:
    return fidelity(result_state, target_state)


def mle_agreement(model_state, mle_state) -> float:
    return fidelity(model_state, mle_state)


def _probe(model_state, probe_set):
    if probe_set is None:
        n = _dim(model_state)[0].bit_length() - 1
        probe_set = full_set(n)
    ops = list(getattr(probe_set, "operators", probe_set))
    if not ops:
        raise ValueError("probe set is empty")
    return ops


def _deltas(mle_state, model_state, ops):
    if _dim(mle_state) != _dim(model_state):
        raise StateError(f"dimension mismatch: {_dim(mle_state)} vs {_dim(model_state)}")
    masks = pauli_masks(ops)
    return expectations(mle_state, ops, masks) - expectations(model_state, ops, masks)


def residuals(mle_state, model_state, probe_set=None) -> list:
    """Delta(P) = <P>_MLE - <P>_model for each probe operator (default: full set)."""
    ops = _probe(model_state, probe_set)
    return [ResidualEntry(p, float(d)) for p, d in zip(ops, _deltas(mle_state, model_state, ops))]


def observable_error(mle_state, model_state, probe_set=None) -> float:
    """Mean squared residual over the probe set."""
    ops = _probe(model_state, probe_set)
    d = _deltas(mle_state, model_state, ops)
    return float(np.mean(d * d))


def top_k_residuals(entries, k: int) -> list:
    """Largest |delta| first; equal magnitudes fall back to label order."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return sorted(entries, key=lambda e: (-abs(e.delta), e.pauli.label))[:k]


def residuals_csv(entries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pauli", "delta"])
    for e in entries:
        w.writerow([e.pauli.label, format(e.delta, ".17g")])
    return buf.getvalue()
