"""Dense matrix forms of the circuit targets, used as verification oracles."""
from __future__ import annotations

import numpy as np

from ..fd import shift_terms
from ..linalg import check_budget, matexp
from ..schrodinger import DilatedSystem, HamiltonianBS, PGrid


def w_matrix(j: int, gamma_tau: float, lam: float, n_x: int) -> np.ndarray:
    sm = shift_terms(n_x)[j - 1]
    gen = np.exp(1j * lam) * sm + np.exp(-1j * lam) * sm.conj().T
    return matexp(1j * gamma_tau * gen)


def v1_matrix(tau: float, gamma1: float, n_x: int) -> np.ndarray:
    out = np.exp(-2j * gamma1 * tau) * np.eye(2**n_x, dtype=complex)
    for j in range(1, n_x + 1):
        out = out @ w_matrix(j, gamma1 * tau, 0.0, n_x)
    return out


def v2_matrix(tau: float, gamma2: float, n_x: int) -> np.ndarray:
    out = np.eye(2**n_x, dtype=complex)
    for j in range(1, n_x + 1):
        out = out @ w_matrix(j, gamma2 * tau, -np.pi / 2, n_x)
    return out


def _dil_ops(n_x: int):
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return p0, p1, np.eye(2**n_x, dtype=complex)


def tilde_v1_matrix(tau: float, dil: DilatedSystem, pgrid: PGrid) -> np.ndarray:
    p = dil.ode.params
    n_x = dil.ode.grid.n_x
    h = dil.ode.grid.h
    g1 = 1.0 / (h**2 * pgrid.l_p)
    ph = np.exp(-1j * tau * p.r / pgrid.l_p)
    v1 = v1_matrix(p.sigma**2 / 2 * tau, g1, n_x)
    if not dil.dilated:
        return ph * v1
    p0, p1, eye = _dil_ops(n_x)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    u11 = matexp(1j * tau / pgrid.l_p * np.kron(x, np.diag(dil.b_diag) / 2))
    return (np.kron(p0, ph * v1) + np.kron(p1, ph * eye)) @ u11


def tilde_v2_matrix(tau: float, dil: DilatedSystem, pgrid: PGrid) -> np.ndarray:
    p = dil.ode.params
    n_x = dil.ode.grid.n_x
    g2 = 1.0 / (2 * dil.ode.grid.h)
    v2 = v2_matrix((p.r - p.sigma**2 / 2) * tau, g2, n_x)
    if not dil.dilated:
        return v2
    p0, p1, eye = _dil_ops(n_x)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    u21 = matexp(1j * tau * np.kron(y, np.diag(dil.b_diag) / 2))
    return (np.kron(p0, v2) + np.kron(p1, eye)) @ u21


def _powers_blockdiag(tv1: np.ndarray, tv2: np.ndarray, n_p: int) -> np.ndarray:
    """sum_k tv2 tv1^{k-N/2} (x) |k><k| in the (sys, k) layout."""
    n = 2**n_p
    dim = tv1.shape[0]
    check_budget(dim * n)
    out = np.zeros((dim * n, dim * n), dtype=complex)
    inv = tv1.conj().T
    for k in range(n):
        e = k - n // 2
        blk = np.linalg.matrix_power(tv1 if e >= 0 else inv, abs(e))
        out[k::n, k::n] = tv2 @ blk
    return out


def vbs_matrix(tau: float, dil: DilatedSystem, pgrid: PGrid) -> np.ndarray:
    """Matrix form of V_BS(tau) built from the dense V~1, V~2."""
    return _powers_blockdiag(tilde_v1_matrix(tau, dil, pgrid),
                             tilde_v2_matrix(tau, dil, pgrid), pgrid.n_p)


def tilde_v1_ddim_matrix(tau: float, params, grid, pgrid: PGrid) -> np.ndarray:
    n_x, g1 = grid.n_x, 1.0 / (grid.h**2 * pgrid.l_p)
    out = np.array([[np.exp(-1j * tau * params.r / pgrid.l_p)]])
    for m in range(params.dim):
        s = params.sigmas[m]
        out = np.kron(out, v1_matrix(s**2 * params.rho[m, m] / 2 * tau, g1, n_x))
    return out


def tilde_v2_ddim_matrix(tau: float, params, grid, pgrid: PGrid) -> np.ndarray:
    n_x, g2 = grid.n_x, 1.0 / (2 * grid.h)
    out = np.array([[1.0 + 0j]])
    for m in range(params.dim):
        s = params.sigmas[m]
        out = np.kron(out, v2_matrix((params.r - s**2 / 2) * tau, g2, n_x))
    return out


def vbs_ddim_matrix(tau: float, params, grid, pgrid: PGrid) -> np.ndarray:
    return _powers_blockdiag(tilde_v1_ddim_matrix(tau, params, grid, pgrid),
                             tilde_v2_ddim_matrix(tau, params, grid, pgrid), pgrid.n_p)


def ubs_matrix(hb: HamiltonianBS, tau: float) -> np.ndarray:
    """exp(i tau H_BS) in the (sys, k) layout."""
    return matexp(1j * tau * hb.full)


def trotter_bound(tau: float, n_x: int, n_p: int, gamma1: float, gamma2: float, c: float) -> float:
    npn = 2**n_p
    return 0.25 * tau**2 * n_x * (npn * gamma1**2 + 2 * gamma2**2 + 2 * npn * gamma1 * gamma2) * c**2


def trotter_bound_ddim(tau: float, n_x: int, n_p: int, gamma1: float, gamma2: float, cs) -> float:
    return sum(trotter_bound(tau, n_x, n_p, gamma1, gamma2, c) for c in cs)
