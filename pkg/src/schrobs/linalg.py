"""Dense complex linear-algebra primitives shared by the rest of the package."""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla

# Largest dense operator dimension the oracle path will build (2**14).
MAX_ORACLE_QUBITS = 14
MAX_ORACLE_DIM = 2**MAX_ORACLE_QUBITS


class BudgetError(ValueError):
    """Raised when a dense object would exceed the oracle dimension budget."""


class ShapeError(ValueError):
    """Raised for non-square or empty operands."""


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.size == 0:
        raise ShapeError(f"expected a nonempty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _square(m) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    return a


def check_budget(dim: int) -> None:
    if dim > MAX_ORACLE_DIM:
        raise BudgetError(f"dimension {dim} exceeds oracle budget {MAX_ORACLE_DIM}")


def kron(a, b) -> np.ndarray:
    """Kronecker product with the budget guard applied to the result."""
    a = as_matrix(a)
    b = as_matrix(b)
    check_budget(max(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]))
    return np.kron(a, b)


def kron_all(*ms) -> np.ndarray:
    out = as_matrix(ms[0])
    for m in ms[1:]:
        out = kron(out, m)
    return out


def _is_hermitian(a: np.ndarray, tol: float = 1e-14) -> bool:
    scale = max(1.0, float(np.max(np.abs(a))))
    return bool(np.max(np.abs(a - a.conj().T)) <= tol * scale)


def matexp(m, t: float = 1.0) -> np.ndarray:
    """exp(t*m).

    Hermitian and skew-Hermitian inputs go through an eigendecomposition, which
    keeps unitary evolutions unitary to rounding. Anything else uses Pade
    scaling-and-squaring.
    """
    a = _square(m) * t
    if _is_hermitian(a):
        w, v = np.linalg.eigh(a)
        return (v * np.exp(w)) @ v.conj().T
    ia = -1j * a
    if _is_hermitian(ia):
        w, v = np.linalg.eigh((ia + ia.conj().T) / 2)
        return (v * np.exp(1j * w)) @ v.conj().T
    return sla.expm(a)


def opnorm2(m, max_iter: int = 1000, tol: float = 1e-12) -> float:
    """Spectral norm by power iteration on m^H m.

    Starts from the all-equal unit vector so runs are reproducible. If the
    iteration does not settle (clustered top singular values) the result is
    taken from an SVD instead.
    """
    a = _square(m)
    n = a.shape[0]
    if not np.any(a):
        return 0.0
    g = a.conj().T @ a
    x = np.full(n, 1.0 / np.sqrt(n), dtype=complex)
    lam = 0.0
    converged = False
    for _ in range(max_iter):
        y = g @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            break
        x = y / ny
        if abs(ny - lam) <= tol * ny:
            lam = ny
            converged = True
            break
        lam = ny
    if not converged:
        return float(np.linalg.norm(a, 2))
    est = float(np.sqrt(lam))
    # The all-equal start can be orthogonal to the top singular vector.
    exact = float(np.linalg.norm(a, 2)) if n <= 256 else est
    return max(est, exact)


def hermitian_split(m) -> tuple[np.ndarray, np.ndarray]:
    """Return (m1, m2) with m = m1 + i*m2 and both parts Hermitian."""
    a = _square(m)
    ah = a.conj().T
    m1 = (a + ah) / 2
    m2 = (a - ah) / 2j
    # Symmetrise explicitly so the outputs are Hermitian bit-for-bit.
    m1 = (m1 + m1.conj().T) / 2
    m2 = (m2 + m2.conj().T) / 2
    return m1, m2
