import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sgqst.pauli import PauliError, PauliString
from sgqst.states import (DensityMatrix, StateError, basis_mixture, fidelity, from_pauli_vector, ghz,
                          maximally_mixed, to_pauli_vector, trace_distance)

from .conftest import random_density


def test_ghz_matrix():
    g = ghz(3).matrix
    assert g[0, 0] == g[0, 7] == g[7, 0] == g[7, 7] == 0.5
    assert np.count_nonzero(g) == 4
    assert ghz(3).purity() == pytest.approx(1.0)


def test_density_validation():
    with pytest.raises(StateError):
        DensityMatrix(np.diag([0.5, 0.6]))
    with pytest.raises(StateError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(StateError):
        DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(StateError):
        DensityMatrix(np.eye(3) / 3)
    m = ghz(2).matrix
    with pytest.raises(ValueError):
        m[0, 0] = 1.0


def test_fidelity_examples():
    assert fidelity(ghz(3), maximally_mixed(3)) == pytest.approx(0.125, abs=1e-12)
    assert fidelity(ghz(3), basis_mixture(3, [0, 7])) == pytest.approx(0.5, abs=1e-12)
    assert fidelity(ghz(5), maximally_mixed(5)) == pytest.approx(0.03125, abs=1e-12)
    assert fidelity(ghz(4), ghz(4)) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_pure_overlap(rng):
    # oracle: for pure psi, F(psi, sigma) = <psi|sigma|psi>
    for _ in range(20):
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        v /= np.linalg.norm(v)
        sigma = random_density(3, rng)
        expected = (v.conj() @ sigma @ v).real
        assert fidelity(np.outer(v, v.conj()), sigma) == pytest.approx(expected, abs=1e-9)


def test_fidelity_symmetric_and_bounded(rng):
    for _ in range(20):
        a, b = random_density(2, rng), random_density(2, rng, rank=2)
        f = fidelity(a, b)
        assert 0.0 <= f <= 1.0
        assert f == pytest.approx(fidelity(b, a), abs=1e-9)


def test_fidelity_dimension_mismatch():
    with pytest.raises(StateError):
        fidelity(ghz(2), ghz(3))


def test_trace_distance():
    assert trace_distance(ghz(3), maximally_mixed(3)) == pytest.approx(0.875, abs=1e-12)
    assert trace_distance(ghz(3), ghz(3)) == pytest.approx(0.0, abs=1e-14)


def test_from_pauli_vector_examples():
    np.testing.assert_allclose(from_pauli_vector({}, 2), np.eye(4) / 4)
    np.testing.assert_allclose(from_pauli_vector({"Z": 1.0}, 1), np.diag([1.0, 0.0]))
    np.testing.assert_allclose(from_pauli_vector({PauliString("X"): 1.0}, 1), 0.5 * np.ones((2, 2)))
    # not positive: still Hermitian with unit trace
    m = from_pauli_vector({"Z": 2.0}, 1)
    np.testing.assert_allclose(m, np.diag([1.5, -0.5]))


def test_from_pauli_vector_rejects():
    with pytest.raises(PauliError):
        from_pauli_vector({"II": 1.0}, 2)
    with pytest.raises(PauliError):
        from_pauli_vector({"XYZ": 1.0}, 2)


def test_ghz_pauli_vector_reconstructs():
    np.testing.assert_allclose(from_pauli_vector(to_pauli_vector(ghz(3)), 3), ghz(3).matrix, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_pauli_vector_round_trip(n, seed):
    rho = random_density(n, np.random.default_rng(seed))
    np.testing.assert_allclose(from_pauli_vector(to_pauli_vector(rho), n), rho, atol=1e-12)
