"""Grids, shift/difference operators and semi-discrete Black-Scholes systems.

Grid index j of the x-register is written in binary with qubit 1 as the least
significant bit, so the local shift pieces are
``s_j^- = I^(n-j) (x) sigma01 (x) sigma10^(j-1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .linalg import MAX_ORACLE_QUBITS, BudgetError, check_budget, kron_all

SIGMA01 = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA10 = np.array([[0, 0], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)

BOUNDARIES = ("dirichlet", "mixed")


@dataclass(frozen=True)
class SpatialGrid:
    left: float
    right: float
    n_x: int

    def __post_init__(self):
        if not self.left < self.right:
            raise ValueError("grid needs left < right")
        if self.n_x < 1:
            raise ValueError("n_x must be at least 1")

    @property
    def interior_count(self) -> int:
        return 2**self.n_x

    @property
    def h(self) -> float:
        return (self.right - self.left) / (self.interior_count + 1)

    def nodes(self, boundary: str = "dirichlet") -> np.ndarray:
        """Unknown locations; the mixed case adds the right end point."""
        n = self.interior_count + (1 if boundary == "mixed" else 0)
        return self.left + self.h * np.arange(1, n + 1)


@dataclass(frozen=True)
class BsParams1D:
    r: float
    sigma: float
    strike: float
    maturity: float

    def __post_init__(self):
        if self.sigma <= 0 or self.strike <= 0 or self.maturity <= 0:
            raise ValueError("sigma, strike and maturity must be positive")


@dataclass(frozen=True)
class BsParamsD:
    dim: int
    r: float
    sigmas: tuple
    rho: np.ndarray
    strikes: tuple
    maturity: float = 1.0
    payoff: str = "cash-or-nothing"
    cash: float = 1.0

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "sigmas", tuple(float(s) for s in self.sigmas))
        object.__setattr__(self, "strikes", tuple(float(k) for k in self.strikes))
        d = self.dim
        if d < 1 or len(self.sigmas) != d or len(self.strikes) != d or rho.shape != (d, d):
            raise ValueError("dimension mismatch in BsParamsD")
        if not np.allclose(rho, rho.T) or not np.allclose(np.diag(rho), 1.0):
            raise ValueError("rho must be symmetric with unit diagonal")
        if np.any(np.abs(rho) > 1):
            raise ValueError("rho entries must lie in [-1, 1]")
        if any(s <= 0 for s in self.sigmas):
            raise ValueError("sigmas must be positive")
        if self.payoff not in ("call", "cash-or-nothing"):
            raise ValueError(f"unknown payoff {self.payoff!r}")

    @property
    def diagonal(self) -> bool:
        return bool(np.all(self.rho[~np.eye(self.dim, dtype=bool)] == 0))


@dataclass
class OdeSystem:
    """du/dtau = A u + b(tau) with b(tau) = exp(-decay*tau) * b."""

    a: object  # dense ndarray or scipy sparse matrix
    b: np.ndarray
    u0: np.ndarray
    grid: SpatialGrid
    boundary: str
    dim: int = 1
    decay: float = 0.0
    params: object = None
    nodes: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.a.shape[0]

    @property
    def homogeneous(self) -> bool:
        return not np.any(self.b)

    def dense_a(self) -> np.ndarray:
        if sp.issparse(self.a):
            check_budget(self.a.shape[0])
            return self.a.toarray().astype(complex)
        return np.asarray(self.a, dtype=complex)


def _check_nx(n_x: int) -> None:
    if n_x < 1:
        raise ValueError("n_x must be at least 1")
    if n_x > MAX_ORACLE_QUBITS:
        raise BudgetError(f"n_x={n_x} exceeds oracle budget {MAX_ORACLE_QUBITS}")


def shift_term(j: int, n_x: int, plus: bool = False) -> np.ndarray:
    """Local piece s_j^- (or s_j^+) of the shift MPO."""
    if not 1 <= j <= n_x:
        raise IndexError(f"j={j} outside 1..{n_x}")
    a, b = (SIGMA10, SIGMA01) if plus else (SIGMA01, SIGMA10)
    factors = [I2] * (n_x - j) + [a] + [b] * (j - 1)
    return kron_all(*factors)


def shift_terms(n_x: int, plus: bool = False) -> list[np.ndarray]:
    _check_nx(n_x)
    return [shift_term(j, n_x, plus) for j in range(1, n_x + 1)]


def shift_minus(n_x: int) -> np.ndarray:
    """S^- = sum_j |j-1><j|, the superdiagonal of ones."""
    _check_nx(n_x)
    n = 2**n_x
    return np.eye(n, k=1, dtype=complex)


def shift_plus(n_x: int) -> np.ndarray:
    return shift_minus(n_x).conj().T


def diff_op(kind: str, grid: SpatialGrid) -> np.ndarray:
    """Dirichlet difference operators on the 2**n_x interior nodes."""
    sm = shift_minus(grid.n_x)
    spl = sm.conj().T
    eye = np.eye(sm.shape[0], dtype=complex)
    h = grid.h
    if kind == "forward":
        return (sm - eye) / h
    if kind == "backward":
        return (eye - spl) / h
    if kind == "central":
        return (sm - spl) / (2 * h)
    if kind == "laplacian":
        return (sm + spl - 2 * eye) / h**2
    raise ValueError(f"unknown difference kind {kind!r}")


def _axis_ops(n: int, h: float, boundary: str):
    """Sparse central and Laplacian operators on one axis.

    For the mixed case the last unknown sits on the right end, where the ghost
    value u_{N+1} = u_{N-1} is eliminated: the central difference vanishes and
    the Laplacian row becomes (2u_{N-1} - 2u_N)/h^2.
    """
    ones = np.ones(n - 1)
    dc = sp.diags([ones, -ones], [1, -1], shape=(n, n), format="lil") / (2 * h)
    dl = sp.diags([ones, -2 * np.ones(n), ones], [1, 0, -1], shape=(n, n), format="lil") / h**2
    if boundary == "mixed":
        dc[n - 1, :] = 0
        dl[n - 1, n - 2] = 2 / h**2
    return dc.tocsr(), dl.tocsr()


def call_initial(x: np.ndarray, strike: float) -> np.ndarray:
    """Initial data of the shifted call problem, max(e^x-K,0) - e^x."""
    ex = np.exp(x)
    return np.maximum(ex - strike, 0.0) - ex


def assemble_bs_1d(
    params: BsParams1D,
    grid: SpatialGrid,
    boundary: str = "dirichlet",
    neglect_left_boundary: bool = True,
) -> OdeSystem:
    """Central-difference system for the call in log-price, tau = T - t.

    The unknown is w - S, which is -K e^{-r tau} at the right end and -S_min
    (taken as 0 when neglect_left_boundary) at the left end.
    """
    if boundary not in BOUNDARIES:
        raise ValueError(f"invalid boundary {boundary!r}; expected one of {BOUNDARIES}")
    _check_nx(grid.n_x)
    r, s2, h = params.r, params.sigma**2, grid.h
    mu = r - s2 / 2
    x = grid.nodes(boundary)
    n = x.size
    dc, dl = _axis_ops(n, h, boundary)
    a = (mu * dc + (s2 / 2) * dl - r * sp.identity(n)).toarray().astype(complex)
    b = np.zeros(n, dtype=complex)
    if boundary == "dirichlet":
        up = mu / (2 * h) + s2 / (2 * h**2)
        lo = -mu / (2 * h) + s2 / (2 * h**2)
        b[-1] = up * (-params.strike)
        if not neglect_left_boundary:
            b[0] = lo * (-np.exp(grid.left))
    u0 = call_initial(x, params.strike).astype(complex)
    return OdeSystem(a=a, b=b, u0=u0, grid=grid, boundary=boundary, dim=1,
                     decay=r, params=params, nodes=[x])


def _embed(op, axis: int, dim: int, n: int):
    eye = sp.identity(n, format="csr")
    out = None
    for m in range(dim):
        f = op if m == axis else eye
        out = f if out is None else sp.kron(out, f, format="csr")
    return out


def assemble_bs_ddim(
    params: BsParamsD,
    grid: SpatialGrid,
    diagonal_only: bool = False,
    boundary: str = "mixed",
    dense: bool | None = None,
) -> OdeSystem:
    """Homogeneous d-dimensional system on a tensor grid (axis 1 outermost).

    ``boundary="mixed"`` keeps 2**n_x + 1 unknowns per axis with a zero
    derivative at the right end; ``"dirichlet"`` keeps 2**n_x interior unknowns,
    which is the layout the circuit builders act on. The matrix is sparse unless
    ``dense`` is requested (default: dense when within the oracle budget).
    """
    if boundary not in BOUNDARIES:
        raise ValueError(f"invalid boundary {boundary!r}")
    d = params.dim
    if not diagonal_only and not params.diagonal and d > 2:
        raise NotImplementedError("cross terms are implemented for d <= 2 only")
    x = grid.nodes(boundary)
    n = x.size
    h, r = grid.h, params.r
    dc, dl = _axis_ops(n, h, boundary)
    total = n**d
    a = -r * sp.identity(total, format="csr")
    for m, s in enumerate(params.sigmas):
        a = a + _embed((r - s**2 / 2) * dc + (s**2 / 2) * dl, m, d, n)
    if not diagonal_only and d == 2 and params.rho[0, 1] != 0:
        # Both (m,n) and (n,m) terms of the double sum, each with weight 1/2.
        c = params.sigmas[0] * params.sigmas[1] * params.rho[0, 1]
        a = a + c * sp.kron(dc, dc, format="csr")
    a = a.tocsr()
    mesh = np.meshgrid(*([x] * d), indexing="ij")
    if params.payoff == "cash-or-nothing":
        mask = np.ones(mesh[0].shape, dtype=bool)
        for m in range(d):
            mask &= mesh[m] > np.log(params.strikes[m])
        u0 = params.cash * mask.astype(float)
    else:
        s = sum(np.exp(g) for g in mesh) / d
        u0 = np.maximum(s - np.mean(params.strikes), 0.0)
    if dense is None:
        dense = total <= 2**12
    if dense:
        check_budget(total)
        a = a.toarray().astype(complex)
    return OdeSystem(a=a, b=np.zeros(total, dtype=complex), u0=u0.ravel().astype(complex),
                     grid=grid, boundary=boundary, dim=d, decay=0.0, params=params,
                     nodes=[x] * d)
