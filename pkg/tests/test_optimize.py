import numpy as np
import pytest
import scipy.optimize
from hypothesis import given, settings, strategies as st

from sgqst.optimize import lbfgs_minimize, projected_gradient


def quad(c):
    return lambda x: (float(np.sum((x - c) ** 2)), 2.0 * (x - c))


def rosenbrock(x):
    a, b = x
    f = (1 - a) ** 2 + 100 * (b - a * a) ** 2
    g = np.array([-2 * (1 - a) - 400 * a * (b - a * a), 200 * (b - a * a)])
    return f, g


def test_unconstrained_quadratic():
    res = lbfgs_minimize(quad(3.0), [0.0], -10, 10)
    assert res.converged
    assert res.x[0] == pytest.approx(3.0, abs=1e-8)


def test_active_bound():
    res = lbfgs_minimize(quad(3.0), [0.0], -10, 2)
    assert res.converged
    assert res.x[0] == 2.0
    assert res.grad[0] == pytest.approx(-2.0)


def test_rosenbrock():
    res = lbfgs_minimize(rosenbrock, [-1.2, 1.0], -5, 5, max_iters=200)
    assert res.converged
    assert res.iterations <= 200
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-6)


def test_start_outside_box_is_clipped():
    res = lbfgs_minimize(quad(0.0), [50.0, -50.0], -1, 1)
    np.testing.assert_allclose(res.x, 0.0, atol=1e-8)


def test_bad_bounds():
    with pytest.raises(ValueError):
        lbfgs_minimize(quad(0.0), [0.0], 1.0, -1.0)
    with pytest.raises(ValueError):
        lbfgs_minimize(quad(0.0), [0.0], -np.inf, 1.0)


def test_max_iters_flag():
    res = lbfgs_minimize(rosenbrock, [-1.2, 1.0], -5, 5, max_iters=3)
    assert not res.converged and res.iterations == 3


def test_projected_gradient_zero_at_box_optimum():
    x = np.array([2.0, 0.5])
    g = np.array([-1.0, 0.0])
    np.testing.assert_array_equal(projected_gradient(x, g, -2.0, 2.0), [0.0, 0.0])


def test_monotone_objective():
    seen = []

    def f(x):
        v, g = rosenbrock(x)
        seen.append(v)
        return v, g

    res = lbfgs_minimize(f, [-1.2, 1.0], -5, 5)
    assert res.fun <= seen[0]
    assert res.fun == min(seen)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2 ** 32 - 1))
def test_matches_scipy_on_bounded_quadratics(dim, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim))
    h = a @ a.T + 0.1 * np.eye(dim)
    b = rng.normal(size=dim) * 3

    def f(x):
        return 0.5 * x @ h @ x - b @ x, h @ x - b

    lo, hi = -np.ones(dim), np.ones(dim)
    ours = lbfgs_minimize(f, np.zeros(dim), lo, hi, max_iters=2000, grad_tol=1e-10)
    ref = scipy.optimize.minimize(f, np.zeros(dim), jac=True, method="L-BFGS-B",
                                  bounds=list(zip(lo, hi)), options={"ftol": 1e-15, "gtol": 1e-12,
                                                                     "maxiter": 5000})
    assert ours.fun <= ref.fun + 1e-8
    # strictly convex: the minimizer is unique
    np.testing.assert_allclose(ours.x, ref.x, atol=1e-5)
