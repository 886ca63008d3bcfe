"""Reconstruction engines: linear inversion + projection, Cholesky-form MLE, structured Gibbs fit.

Both fitted estimators minimize the same squared loss

    L = sum_k (Tr(rho P_k) - m_k)**2

over their operator list (all 4**n - 1 strings for MLE, the model set for
Gibbs), by multi-start bounded L-BFGS.
"""
from dataclasses import dataclass, field
import logging
import time

import numpy as np

from . import kernels, linalg
from .measurement import Dataset, substream
from .operators import OperatorSet, by_tag, full_set
from .optimize import lbfgs_minimize
from .pauli import PauliString, pauli_masks
from .states import DensityMatrix, from_pauli_vector

log = logging.getLogger(__name__)

MAX_LAMBDA_BOUND = 350.0
TIE_TOL = 1e-12


class CoverageError(ValueError):
    """The dataset lacks estimates for operators the estimator needs."""

    def __init__(self, missing):
        self.missing = list(missing)
        shown = ", ".join(p.label for p in self.missing[:20])
        more = "" if len(self.missing) <= 20 else f", ... ({len(self.missing)} total)"
        super().__init__(f"dataset is missing {len(self.missing)} operator(s): {shown}{more}")


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 500
    grad_tol: float = 1e-8
    restarts: int = 10
    seed: int = 0
    lambda_bound: float = 30.0
    lbfgs_memory: int = 10
    cholesky_bound: float = 10.0

    def __post_init__(self):
        for name in ("max_iters", "grad_tol", "restarts", "lambda_bound", "lbfgs_memory", "cholesky_bound"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.lambda_bound > MAX_LAMBDA_BOUND:
            raise ValueError(f"lambda_bound must not exceed {MAX_LAMBDA_BOUND}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass
class ReconstructionResult:
    estimator: str
    state: DensityMatrix
    params: np.ndarray
    operators: tuple
    final_loss: float
    iterations: int = 0
    restarts_used: int = 0
    wall_time: float = 0.0
    converged: bool = True
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.state.n


def _targets(data, ops, strict=True):
    """Align data (a Dataset or a mapping PauliString/label -> value) with ``ops``."""
    if isinstance(data, Dataset):
        table = data.estimates()
    else:
        table = {(k if isinstance(k, PauliString) else PauliString(k.upper())): float(v)
                 for k, v in dict(data).items()}
    missing = [p for p in ops if p not in table]
    if missing and strict:
        raise CoverageError(missing)
    return np.array([table.get(p, 0.0) for p in ops]), missing


def _n_of(data):
    if isinstance(data, Dataset):
        return data.n
    key = next(iter(dict(data)))
    return len(key.label if isinstance(key, PauliString) else key)


def squared_loss(state, data, ops) -> float:
    """Loss of a state against the data, summed over ``ops``."""
    ops = list(getattr(ops, "operators", ops))
    m, _ = _targets(data, ops)
    pred = kernels.pauli_expectations(np.asarray(getattr(state, "matrix", state)), *pauli_masks(ops))
    return float(np.sum((pred - m) ** 2))


# -- linear inversion ------------------------------------------------------

def linear_inversion(data):
    """Pauli-basis synthesis of the estimates.

    Returns ``(matrix, min_eigenvalue, missing)``; operators absent from the
    data enter with coefficient zero and are listed in ``missing``.
    """
    n = _n_of(data)
    ops = full_set(n).operators
    m, missing = _targets(data, ops, strict=False)
    if missing:
        log.warning("linear inversion: %d of %d operators missing, treated as 0", len(missing), len(ops))
    mat = from_pauli_vector(dict(zip(ops, m)), n)
    return mat, float(np.linalg.eigvalsh(mat)[0]), missing


def psd_estimate(data) -> ReconstructionResult:
    t0 = time.perf_counter()
    raw, min_eig, missing = linear_inversion(data)
    n = raw.shape[0].bit_length() - 1
    ops = full_set(n).operators
    state = DensityMatrix(linalg.project_to_density(raw))
    m, _ = _targets(data, ops, strict=False)
    loss = float(np.sum((kernels.pauli_expectations(state.matrix, *pauli_masks(ops)) - m) ** 2))
    return ReconstructionResult(
        "PSD", state, m, tuple(ops), loss, wall_time=time.perf_counter() - t0,
        diagnostics={"min_eigenvalue": min_eig, "negative": min_eig < 0,
                     "missing": [p.label for p in missing]})


# -- Gibbs model -------------------------------------------------------------

@dataclass(frozen=True)
class GibbsModel:
    ops: OperatorSet
    lambdas: np.ndarray
    bound: float = 30.0

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.shape != (len(self.ops),):
            raise ValueError(f"expected {len(self.ops)} coefficients, got shape {lam.shape}")
        if np.any(np.abs(lam) > self.bound):
            raise ValueError(f"coefficients exceed the bound {self.bound}")
        object.__setattr__(self, "lambdas", lam)


class GibbsObjective:
    """Loss and exact gradient of the normalized exponential family.

    With A = -sum_k lambda_k P_k = V diag(w) V^dagger, rho = e^A / Tr e^A.
    The gradient uses one Daleckii-Krein transform of the residual operator
    G = 2 sum_k r_k P_k, so each evaluation is O(d**3 + K d).
    """

    def __init__(self, ops, targets):
        self.ops = list(getattr(ops, "operators", ops))
        self.masks = pauli_masks(self.ops)
        self.targets = np.asarray(targets, dtype=float)
        self.dim = 1 << self.ops[0].n

    def decompose(self, lam):
        a = -kernels.pauli_combination(lam, *self.masks, self.dim)
        w, v = np.linalg.eigh(a)
        # shifting by max(w) cancels in the normalization and keeps exp finite
        w = w - w[-1]
        return w, v

    def state(self, lam) -> np.ndarray:
        w, v = self.decompose(lam)
        p = np.exp(w)
        return (v * (p / p.sum())) @ v.conj().T

    def __call__(self, lam):
        w, v = self.decompose(lam)
        e = np.exp(w)
        z = e.sum()
        rho = (v * (e / z)) @ v.conj().T
        pred = kernels.pauli_expectations(rho, *self.masks)
        r = pred - self.targets
        loss = float(r @ r)
        gmat = kernels.pauli_combination(2.0 * r, *self.masks, self.dim)
        g = float(2.0 * r @ pred)
        inner = v.conj().T @ gmat @ v
        k = v @ (linalg.exp_divided_differences(w) * inner) @ v.conj().T
        grad = kernels.pauli_expectations(g * rho - k / z, *self.masks)
        return loss, grad


def gibbs_state(model: GibbsModel) -> DensityMatrix:
    """exp(-sum_k lambda_k P_k), trace-normalized."""
    if len(model.ops) == 0:
        d = 1 << model.ops.n
        return DensityMatrix(np.eye(d) / d)
    return DensityMatrix(GibbsObjective(model.ops, np.zeros(len(model.ops))).state(model.lambdas))


def gibbs_loss_grad(model: GibbsModel, targets):
    """(loss, gradient) of the model against targets keyed by its operators."""
    m, _ = _targets(targets, model.ops.operators)
    return GibbsObjective(model.ops, m)(model.lambdas)


def _multistart(objective, starts, lower, upper, config):
    best = None
    total_iters = 0
    losses = []
    for r, x0 in enumerate(starts):
        res = lbfgs_minimize(objective, x0, lower, upper, max_iters=config.max_iters,
                             grad_tol=config.grad_tol, memory=config.lbfgs_memory)
        total_iters += res.iterations
        losses.append(res.fun)
        if best is None or res.fun < best.fun - TIE_TOL:
            best = res
    return best, total_iters, losses


def fit_gibbs(ops: OperatorSet, data, config: OptimizerConfig = None) -> ReconstructionResult:
    """Best-of-restarts Gibbs coefficients under |lambda_k| <= config.lambda_bound.

    Only the records for ``ops`` are read. Restart 0 starts at lambda = 0;
    restart r >= 1 draws uniform [-1, 1] starts from substream (seed, r).
    """
    config = config or OptimizerConfig()
    t0 = time.perf_counter()
    m, _ = _targets(data, ops.operators)
    obj = GibbsObjective(ops, m)
    k = len(ops)
    starts = [np.zeros(k)]
    starts += [substream(config.seed, r).uniform(-1.0, 1.0, size=k) for r in range(1, config.restarts)]
    best, iters, losses = _multistart(obj, starts, -config.lambda_bound, config.lambda_bound, config)
    if not best.converged:
        log.warning("%s fit: best restart stopped without convergence (%s)", ops.tag, best.message)
    model = GibbsModel(ops, best.x, config.lambda_bound)
    state = gibbs_state(model)
    return ReconstructionResult(
        ops.tag, state, best.x.copy(), tuple(ops.operators), obj(best.x)[0],
        iterations=iters, restarts_used=len(starts), wall_time=time.perf_counter() - t0,
        converged=best.converged,
        diagnostics={"message": best.message, "restart_losses": losses})


# -- Cholesky-form MLE -------------------------------------------------------

class CholeskyParams:
    """Packing of a lower-triangular T with real diagonal into d**2 reals.

    Layout: the d diagonal entries, then real parts, then imaginary parts of
    the strictly-lower entries in row-major order.
    """

    def __init__(self, dim):
        self.dim = dim
        self.rows, self.cols = np.tril_indices(dim, -1)
        self.size = dim * dim

    def unpack(self, x) -> np.ndarray:
        d = self.dim
        t = np.zeros((d, d), dtype=complex)
        t[np.arange(d), np.arange(d)] = x[:d]
        nl = len(self.rows)
        t[self.rows, self.cols] = x[d:d + nl] + 1j * x[d + nl:]
        return t

    def pack(self, t) -> np.ndarray:
        t = np.asarray(t)
        d = self.dim
        low = t[self.rows, self.cols]
        return np.concatenate([t[np.arange(d), np.arange(d)].real, low.real, low.imag])

    def pack_gradient(self, w) -> np.ndarray:
        """Real gradient from the complex matrix W with dL = 2 Re sum W_ij dT_ij."""
        d = self.dim
        low = w[self.rows, self.cols]
        return 2.0 * np.concatenate([w[np.arange(d), np.arange(d)].real, low.real, -low.imag])


class CholeskyObjective:
    """Loss over the full Pauli set with rho = T^dagger T / Tr(T^dagger T)."""

    def __init__(self, ops, targets):
        self.ops = list(getattr(ops, "operators", ops))
        self.masks = pauli_masks(self.ops)
        self.targets = np.asarray(targets, dtype=float)
        self.dim = 1 << self.ops[0].n
        self.packing = CholeskyParams(self.dim)

    def state(self, x) -> np.ndarray:
        t = self.packing.unpack(x)
        a = t.conj().T @ t
        return a / np.trace(a).real

    def __call__(self, x):
        t = self.packing.unpack(x)
        a = t.conj().T @ t
        tr = np.trace(a).real
        rho = a / tr
        pred = kernels.pauli_expectations(rho, *self.masks)
        r = pred - self.targets
        loss = float(r @ r)
        gmat = kernels.pauli_combination(2.0 * r, *self.masks, self.dim)
        g = float(2.0 * r @ pred)
        gmat[np.diag_indices(self.dim)] -= g
        w = ((gmat / tr) @ t.conj().T).T
        return loss, self.packing.pack_gradient(w)


def mle_fit(data, config: OptimizerConfig = None) -> ReconstructionResult:
    """Least-squares fit of rho = T^dagger T / Tr(T^dagger T) to all 4**n - 1 estimates.

    Restart 0 starts at T = I / sqrt(d); restart r >= 1 adds N(0, 0.1**2)
    noise to every real parameter, drawn from substream (seed, r).
    """
    config = config or OptimizerConfig()
    t0 = time.perf_counter()
    n = _n_of(data)
    ops = full_set(n).operators
    m, _ = _targets(data, ops)
    obj = CholeskyObjective(ops, m)
    base = obj.packing.pack(np.eye(obj.dim) / np.sqrt(obj.dim))
    starts = [base]
    starts += [base + 0.1 * substream(config.seed, r).standard_normal(base.size)
               for r in range(1, config.restarts)]
    bound = config.cholesky_bound
    starts = [np.clip(s, -bound, bound) for s in starts]
    best, iters, losses = _multistart(obj, starts, -bound, bound, config)
    if not best.converged:
        log.info("MLE fit: best restart stopped without convergence (%s)", best.message)
    state = DensityMatrix(obj.state(best.x))
    return ReconstructionResult(
        "MLE", state, best.x.copy(), tuple(ops), obj(best.x)[0],
        iterations=iters, restarts_used=len(starts), wall_time=time.perf_counter() - t0,
        converged=best.converged,
        diagnostics={"message": best.message, "restart_losses": losses})


def reconstruct(tag: str, data, config: OptimizerConfig = None, ops: OperatorSet = None):
    """Dispatch on an estimator tag: MLE, PSD, G1-G4, or CUSTOM with ``ops``."""
    key = tag.upper()
    if key == "MLE":
        return mle_fit(data, config)
    if key == "PSD":
        return psd_estimate(data)
    if key == "CUSTOM":
        if ops is None:
            raise ValueError("CUSTOM estimator needs an operator set")
        return fit_gibbs(ops, data, config)
    return fit_gibbs(by_tag(key, _n_of(data)), data, config)
