from functools import reduce

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sgqst.pauli import (PauliError, PauliString, enumerate_paulis, expectation, expectations,
                         parse_label, to_matrix)
from sgqst.states import ghz, to_pauli_vector

from .conftest import random_density

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)


def dense_kron(*mats):
    return reduce(np.kron, mats)


@pytest.mark.parametrize("text,n,expected", [
    ("XXX", 3, ("X", "X", "X")),
    ("III", 3, ("I", "I", "I")),
    ("IZY", 3, ("I", "Z", "Y")),
    ("izy", 3, ("I", "Z", "Y")),
])
def test_parse_label(text, n, expected):
    p = parse_label(text, n)
    assert p.symbols == expected
    assert p.n == n


def test_parse_identity_weight():
    assert parse_label("III", 3).weight == 0


@pytest.mark.parametrize("text,n", [("XX", 3), ("XXXX", 3), ("XAX", 3), ("", 1)])
def test_parse_rejects(text, n):
    with pytest.raises(PauliError):
        parse_label(text, n)


@given(st.text(alphabet="IXYZ", min_size=1, max_size=8))
def test_label_round_trip(label):
    p = parse_label(label, len(label))
    assert parse_label(p.label, p.n) == p
    assert 0 <= p.weight <= p.n


def test_to_matrix_examples():
    np.testing.assert_array_equal(to_matrix(PauliString("III")), np.eye(8))
    np.testing.assert_array_equal(to_matrix(PauliString("Z")), np.diag([1, -1]))
    np.testing.assert_array_equal(to_matrix(PauliString("XXX")), np.fliplr(np.eye(8)))


def test_to_matrix_cap():
    with pytest.raises(PauliError):
        to_matrix(PauliString("I" * 13))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_matrix_properties(n):
    for p in enumerate_paulis(n):
        m = to_matrix(p)
        assert abs(np.trace(m)) < 1e-14
        np.testing.assert_allclose(m @ m, np.eye(2 ** n), atol=1e-14)
        np.testing.assert_allclose(m, m.conj().T, atol=0)


def test_enumerate_sizes_and_order():
    assert [p.label for p in enumerate_paulis(1)] == ["X", "Y", "Z"]
    assert len(enumerate_paulis(3)) == 63
    assert len(enumerate_paulis(5)) == 1023
    full = enumerate_paulis(2, include_identity=True)
    assert len(full) == 16 and full[0].label == "II"
    labels = [p.label for p in enumerate_paulis(4)]
    assert labels == sorted(labels)
    assert len(set(labels)) == 4 ** 4 - 1


def test_ghz_expectations():
    assert expectation(ghz(3), PauliString("XXX")) == pytest.approx(1.0, abs=1e-14)
    # dense oracle: <GHZ_3| Y^3 |GHZ_3> and <GHZ_4| Y^4 |GHZ_4>
    g3 = ghz(3).matrix
    g4 = ghz(4).matrix
    assert np.trace(g3 @ dense_kron(SY, SY, SY)).real == pytest.approx(0.0)
    assert np.trace(g4 @ dense_kron(SY, SY, SY, SY)).real == pytest.approx(1.0)
    assert expectation(ghz(3), PauliString("YYY")) == pytest.approx(0.0, abs=1e-14)
    assert expectation(ghz(4), PauliString("YYYY")) == pytest.approx(1.0, abs=1e-14)
    for n in (2, 3, 5):
        for i in range(n):
            label = "I" * i + "Z" + "I" * (n - i - 1)
            assert expectation(ghz(n), PauliString(label)) == pytest.approx(0.0, abs=1e-14)


def test_expectation_errors(rng):
    with pytest.raises(PauliError):
        expectation(ghz(3), PauliString("XX"))
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    with pytest.raises(PauliError):
        expectation(a, PauliString("XY"))


def test_fast_path_matches_dense_trace(rng):
    for trial in range(100):
        n = 1 + trial % 4
        rho = random_density(n, rng)
        paulis = enumerate_paulis(n, include_identity=True)
        fast = expectations(rho, paulis)
        dense = np.array([np.trace(rho @ to_matrix(p)).real for p in paulis])
        np.testing.assert_allclose(fast, dense, atol=1e-12)


def test_pauli_completeness(rng):
    for n in (1, 2, 3):
        rho = random_density(n, rng)
        paulis = enumerate_paulis(n, include_identity=True)
        recon = sum(expectation(rho, p) * to_matrix(p) for p in paulis) / 2 ** n
        np.testing.assert_allclose(recon, rho, atol=1e-10)


def test_to_pauli_vector_keys():
    vec = to_pauli_vector(ghz(3))
    assert len(vec) == 63
    # GHZ_3 stabilizer group: 7 non-identity elements with |<P>| = 1
    assert sum(abs(v) > 0.5 for v in vec.values()) == 7
