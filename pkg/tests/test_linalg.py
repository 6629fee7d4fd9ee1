# Complex-matrix kernel: hand-checkable identities plus random-matrix
# properties (group law of the exponential, kron bilinearity).

import numpy as np
import pytest

from geomgate import linalg
from geomgate.linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, expm, kron, matmul

I2 = np.eye(2, dtype=complex)


def random_hermitian(rng, dim=2, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (a + a.conj().T)


def test_matmul_identity_and_involution():
    assert np.array_equal(matmul(I2, SIGMA_X), SIGMA_X)
    assert np.allclose(matmul(SIGMA_X, SIGMA_X), I2, atol=0)
    assert np.allclose(matmul(1j * SIGMA_Z, 1j * SIGMA_Z), -I2, atol=0)


def test_matmul_dimension_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        matmul(I2, np.eye(4, dtype=complex))


def test_kron_basis_ordering():
    assert np.allclose(kron(SIGMA_Z, I2), np.diag([1, 1, -1, -1]), atol=0)
    assert np.allclose(kron(I2, SIGMA_Z), np.diag([1, -1, 1, -1]), atol=0)
    rr = np.diag([0.0, 1.0]).astype(complex)  # |r><r|
    assert np.allclose(kron(rr, rr), np.diag([0, 0, 0, 1]), atol=0)


def test_kron_associative_and_bilinear():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
        assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-14)
        assert np.allclose(kron(a + b, c), kron(a, c) + kron(b, c), atol=1e-14)
        assert np.allclose(kron(a, b + c), kron(a, b) + kron(a, c), atol=1e-14)
        s = complex(rng.normal(), rng.normal())
        assert np.allclose(kron(s * a, b), s * kron(a, b), atol=1e-14)


def test_expm_pauli_closed_forms():
    assert np.allclose(expm(SIGMA_X, 1j * np.pi / 2), 1j * SIGMA_X, atol=1e-15)
    for gamma in (0.3, -1.2, 2.9):
        want = np.diag([np.exp(1j * gamma), np.exp(-1j * gamma)])
        assert np.allclose(expm(SIGMA_Z, 1j * gamma), want, atol=1e-15)


def test_expm_zero_scale_is_identity():
    rng = np.random.default_rng(1)
    h4 = random_hermitian(rng, dim=4)
    assert np.allclose(expm(h4, 0.0), np.eye(4), atol=1e-15)


@pytest.mark.parametrize("dim", [2, 4])
def test_expm_group_law_and_unitarity(dim):
    rng = np.random.default_rng(dim)
    for _ in range(20):
        h = random_hermitian(rng, dim=dim)
        t, s = rng.uniform(-10, 10, size=2)
        lhs = expm(h, 1j * t) @ expm(h, 1j * s)
        rhs = expm(h, 1j * (t + s))
        assert np.linalg.norm(lhs - rhs, ord="fro") <= 1e-12
        u = expm(h, 1j * t)
        assert linalg.is_unitary(u, tol=1e-12)


def test_expm_commutes_with_generator():
    rng = np.random.default_rng(3)
    for _ in range(20):
        h = random_hermitian(rng, dim=4, scale=2.0)
        t = rng.uniform(-10, 10)
        u = expm(h, 1j * t)
        assert np.linalg.norm(u @ h - h @ u, ord="fro") <= 1e-11


def test_expm_rejects_non_hermitian():
    bad = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(ValueError, match="Hermitian"):
        expm(bad, 1j)


def test_frobenius_and_checks():
    assert linalg.frobenius(I2) == pytest.approx(np.sqrt(2))
    assert linalg.is_hermitian(SIGMA_Y)
    assert not linalg.is_hermitian(1j * SIGMA_X)
    with pytest.raises(ValueError, match="unitary"):
        linalg.assert_unitary(2.0 * I2)
