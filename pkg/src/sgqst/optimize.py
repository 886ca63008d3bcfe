"""Limited-memory quasi-Newton minimization under box bounds.

Each iteration freezes the variables that sit on a bound with the gradient
pushing outward, builds the L-BFGS direction on the remaining free
variables, and searches along it:

* if the full step stays inside the box, a strong-Wolfe line search
  (c1=1e-4, c2=0.9) is run on the segment up to the first bound crossing;
* otherwise the step is projected back onto the box and backtracked until
  the Armijo condition holds along the projected path.

When neither succeeds a projected steepest-descent step with backtracking
is tried before giving up. Accepted objective values never increase.
"""
from dataclasses import dataclass
from collections import deque
import logging

import numpy as np

log = logging.getLogger(__name__)

C1 = 1e-4
C2 = 0.9
MAX_LINESEARCH = 40
CURVATURE_EPS = 1e-12


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    iterations: int
    converged: bool
    nfev: int
    message: str = ""


def projected_gradient(x, g, lower, upper) -> np.ndarray:
    return np.clip(x - g, lower, upper) - x


class _Counted:
    def __init__(self, fun):
        self.fun = fun
        self.nfev = 0

    def __call__(self, x):
        self.nfev += 1
        f, g = self.fun(x)
        return float(f), np.asarray(g, dtype=float)


def _two_loop(q, pairs, free):
    """Apply the inverse-Hessian approximation to ``q`` on the free subspace."""
    q = q * free
    alphas = []
    used = []
    for s, y in reversed(pairs):
        sf, yf = s * free, y * free
        sy = sf @ yf
        if sy <= CURVATURE_EPS * np.linalg.norm(sf) * np.linalg.norm(yf) or sy <= 0:
            continue
        a = (sf @ q) / sy
        q = q - a * yf
        alphas.append(a)
        used.append((sf, yf, sy))
    if used:
        sf, yf, sy = used[0]
        q = q * (sy / (yf @ yf))
    for (sf, yf, sy), a in zip(reversed(used), reversed(alphas)):
        b = (yf @ q) / sy
        q = q + (a - b) * sf
    return q * free


def _cubic_min(a, fa, da, b, fb, db):
    """Minimizer of the cubic interpolant on [a, b]; None when it does not exist."""
    d1 = da + db - 3.0 * (fa - fb) / (a - b)
    rad = d1 * d1 - da * db
    if rad < 0:
        return None
    d2 = np.sign(b - a) * np.sqrt(rad)
    denom = db - da + 2.0 * d2
    if denom == 0:
        return None
    return b - (b - a) * (db + d2 - d1) / denom


def _strong_wolfe(fun, x, f0, g0, d, alpha0, alpha_max, lower, upper):
    """Line search along x + alpha d with alpha <= alpha_max.

    Returns (alpha, f, g, x_new) or None when no acceptable step was found.
    """
    dphi0 = g0 @ d
    cache = {}

    def phi(a):
        if a not in cache:
            xa = np.clip(x + a * d, lower, upper)
            fa, ga = fun(xa)
            cache[a] = (fa, ga, xa)
        return cache[a]

    def zoom(lo, hi):
        for _ in range(MAX_LINESEARCH):
            flo, glo, _ = phi(lo)
            fhi, ghi, _ = phi(hi)
            a = _cubic_min(lo, flo, glo @ d, hi, fhi, ghi @ d)
            left, right = min(lo, hi), max(lo, hi)
            margin = 0.1 * (right - left)
            if a is None or not (left + margin <= a <= right - margin):
                a = 0.5 * (lo + hi)
            fa, ga, xa = phi(a)
            if fa > f0 + C1 * a * dphi0 or fa >= flo:
                hi = a
            else:
                da = ga @ d
                if abs(da) <= -C2 * dphi0:
                    return a
                if da * (hi - lo) >= 0:
                    hi = lo
                lo = a
            if abs(hi - lo) <= 1e-16 * max(1.0, abs(lo)):
                break
        # no strong-Wolfe point; accept the best sufficient-decrease point seen
        flo, _, _ = phi(lo)
        if lo > 0 and flo <= f0 + C1 * lo * dphi0:
            return lo
        return None

    a_prev, f_prev = 0.0, f0
    cache[0.0] = (f0, g0, x)
    a = min(alpha0, alpha_max)
    for i in range(MAX_LINESEARCH):
        fa, ga, xa = phi(a)
        if not np.isfinite(fa) or fa > f0 + C1 * a * dphi0 or (i > 0 and fa >= f_prev):
            a = zoom(a_prev, a)
            break
        da = ga @ d
        if abs(da) <= -C2 * dphi0:
            break
        if da >= 0:
            a = zoom(a, a_prev)
            break
        if a >= alpha_max:
            break
        a_prev, f_prev = a, fa
        a = min(2.0 * a, alpha_max)
    if a is None or a == 0.0:
        return None
    fa, ga, xa = phi(a)
    return a, fa, ga, xa


def _projected_backtrack(fun, x, f0, g0, d, alpha0, lower, upper):
    a = alpha0
    for _ in range(MAX_LINESEARCH):
        xa = np.clip(x + a * d, lower, upper)
        step = xa - x
        slope = g0 @ step
        if slope >= 0 or not np.any(step):
            return None
        fa, ga = fun(xa)
        if np.isfinite(fa) and fa <= f0 + C1 * slope:
            return a, fa, ga, xa
        a *= 0.5
    return None


def lbfgs_minimize(fun, x0, lower, upper, max_iters=500, grad_tol=1e-8, memory=10) -> OptimizeResult:
    """Minimize ``fun`` (returning value and gradient) over the box [lower, upper].

    Terminates when the infinity norm of the projected gradient drops to
    ``grad_tol`` or after ``max_iters`` accepted steps. A failed line search
    falls back to projected steepest descent; if that fails too the best
    iterate is returned with ``converged=False``.
    """
    fun = _Counted(fun)
    x = np.asarray(x0, dtype=float).copy()
    lower = np.broadcast_to(np.asarray(lower, dtype=float), x.shape)
    upper = np.broadcast_to(np.asarray(upper, dtype=float), x.shape)
    if np.any(~np.isfinite(lower)) or np.any(~np.isfinite(upper)) or np.any(lower > upper):
        raise ValueError("bounds must be finite with lower <= upper")
    x = np.clip(x, lower, upper)
    f, g = fun(x)
    pairs = deque(maxlen=memory)
    message = "max_iters reached"
    converged = False
    it = 0
    while True:
        pg = projected_gradient(x, g, lower, upper)
        if np.max(np.abs(pg), initial=0.0) <= grad_tol:
            converged, message = True, "projected gradient below tolerance"
            break
        if it >= max_iters:
            break
        at_lower = (x <= lower) & (g > 0)
        at_upper = (x >= upper) & (g < 0)
        free = (~(at_lower | at_upper)).astype(float)

        d = -_two_loop(g, pairs, free)
        gd = g @ d
        if not gd < 0:
            pairs.clear()
            d = -g * free
            gd = g @ d
        alpha0 = 1.0 if pairs else min(1.0, 1.0 / max(np.linalg.norm(d), 1e-300))

        with np.errstate(divide="ignore", invalid="ignore"):
            room = np.where(d > 0, (upper - x) / d, np.where(d < 0, (lower - x) / d, np.inf))
        alpha_max = float(np.min(room, initial=np.inf))

        step = None
        if alpha_max >= alpha0:
            step = _strong_wolfe(fun, x, f, g, d, alpha0, alpha_max, lower, upper)
        else:
            step = _projected_backtrack(fun, x, f, g, d, alpha0, lower, upper)
        if step is None:
            pairs.clear()
            sd = -g
            step = _projected_backtrack(fun, x, f, g, sd, min(1.0, 1.0 / max(np.max(np.abs(g)), 1e-300)),
                                        lower, upper)
            if step is None:
                message = "line search failed"
                log.debug("lbfgs: line search failed at iteration %d (f=%.6g)", it, f)
                break
        _, f_new, g_new, x_new = step
        if f_new > f:
            message = "non-monotone step rejected"
            break
        s, y = x_new - x, g_new - g
        if s @ y > CURVATURE_EPS * np.linalg.norm(s) * np.linalg.norm(y):
            pairs.append((s, y))
        x, f, g = x_new, f_new, g_new
        it += 1
    return OptimizeResult(x=x, fun=f, grad=g, iterations=it, converged=converged,
                          nfev=fun.nfev, message=message)
