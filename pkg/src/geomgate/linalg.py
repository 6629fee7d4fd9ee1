"""Small dense complex-matrix kernel.

All operators in this package are dense square ``numpy`` arrays of
``complex128`` (dims 2 or 4 in practice, generic in principle).  Matrices are
treated as immutable: every function returns a fresh array and never mutates
its inputs.

Basis ordering is fixed globally: one qubit {|g>, |r>} with |g> at index 0;
two qubits {|gg>, |gr>, |rg>, |rr>} with the first atom as the slow index.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-12

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, ord="fro"))


def _as_square(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with an explicit dimension check."""
    a = _as_square(a)
    b = _as_square(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a @ b


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, first factor as the slow index.

    ``kron(A, B)`` acts with A on atom 1 and B on atom 2, matching the basis
    order |gg>, |gr>, |rg>, |rr>.
    """
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    h = np.asarray(h)
    return bool(np.linalg.norm(h - h.conj().T, ord="fro") <= tol * max(1.0, np.linalg.norm(h, ord="fro")))


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = _as_square(u)
    return frobenius(u.conj().T @ u - identity(u.shape[0])) <= tol


def expm(h: np.ndarray, scale: complex) -> np.ndarray:
    """exp(scale * h) for Hermitian h.

    2x2 inputs use the exact Pauli closed form; larger inputs go through an
    eigendecomposition.  For purely imaginary ``scale`` the result is unitary
    to 1e-12.

    Raises
    ------
    ValueError
        If ``h`` is not Hermitian (relative Frobenius check at 1e-12).
    """
    h = _as_square(h)
    if not is_hermitian(h):
        raise ValueError("expm requires a Hermitian generator")
    if h.shape[0] == 2:
        return _expm2(h, complex(scale))
    w, v = np.linalg.eigh(h)
    return (v * np.exp(complex(scale) * w)) @ v.conj().T


def _expm2(h: np.ndarray, s: complex) -> np.ndarray:
    # h = c0*I + v.sigma; exp(s h) = e^{s c0} (cosh(s|v|) I + sinh(s|v|) vhat.sigma)
    c0 = (h[0, 0] + h[1, 1]).real / 2.0
    vx = h[0, 1].real
    vy = -h[0, 1].imag
    vz = (h[0, 0] - h[1, 1]).real / 2.0
    r = np.sqrt(vx * vx + vy * vy + vz * vz)
    if r == 0.0:
        return np.exp(s * c0) * identity(2)
    vs = (vx * SIGMA_X + vy * SIGMA_Y + vz * SIGMA_Z) / r
    return np.exp(s * c0) * (np.cosh(s * r) * identity(2) + np.sinh(s * r) * vs)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return matmul(a, b) - matmul(b, a)


def assert_unitary(u: np.ndarray, tol: float = UNITARY_TOL, what: str = "matrix") -> np.ndarray:
    if not is_unitary(u, tol):
        raise ValueError(f"{what} is not unitary to {tol:g}")
    return u
