"""Analytic prices and the classical matrix-exponential reference."""
from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import ndtr

from .fd import BsParams1D, BsParamsD, OdeSystem
from .linalg import check_budget, matexp


def norm_cdf(y):
    """Standard normal CDF through the complementary error function."""
    return ndtr(y)


def bs_call_analytic(x, t: float, p: BsParams1D):
    """European call e^x N(d1) - K e^{-rt} N(d2) in log-price x."""
    x = np.asarray(x, dtype=float)
    k = p.strike
    if t <= 0:
        return np.maximum(np.exp(x) - k, 0.0)
    sq = p.sigma * math.sqrt(t)
    d1 = (x - math.log(k) + (p.r + p.sigma**2 / 2) * t) / sq
    d2 = d1 - sq
    return np.exp(x) * norm_cdf(d1) - k * math.exp(-p.r * t) * norm_cdf(d2)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def bivariate_cdf(a, b, rho: float):
    """P(X <= a, Y <= b) for standard normals with correlation rho.

    Uses B = N(a)N(b) + (1/2pi) int_0^{asin rho} exp(-(a^2 - 2ab sin t + b^2)
    / (2 cos^2 t)) dt, integrated with 64-point Gauss-Legendre.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    base = norm_cdf(a) * norm_cdf(b)
    if rho == 0:
        return base
    if abs(rho) >= 1:
        if rho > 0:
            return norm_cdf(np.minimum(a, b))
        return np.maximum(norm_cdf(a) - norm_cdf(-b), 0.0)
    top = math.asin(rho)
    t = 0.5 * top * (_GL_NODES + 1.0)
    w = 0.5 * top * _GL_WEIGHTS
    s = np.sin(t)
    c2 = np.cos(t) ** 2
    aa = a[..., None]
    bb = b[..., None]
    with np.errstate(over="ignore", invalid="ignore"):
        f = np.exp(-(aa**2 - 2 * aa * bb * s + bb**2) / (2 * c2))
    f = np.nan_to_num(f)
    return base + (f @ w) / (2 * math.pi)


def bivariate_cdf_series(a: float, b: float, rho: float, terms: int = 60) -> float:
    """Tetrachoric series in rho; for cross-checks at moderate |rho|."""
    from numpy.polynomial.hermite_e import hermeval

    phi_a = math.exp(-a * a / 2) / math.sqrt(2 * math.pi)
    phi_b = math.exp(-b * b / 2) / math.sqrt(2 * math.pi)
    total = float(norm_cdf(a) * norm_cdf(b))
    fact = 1.0
    for k in range(1, terms + 1):
        fact *= k
        coef = np.zeros(k)
        coef[k - 1] = 1.0
        he_a = hermeval(a, coef)
        he_b = hermeval(b, coef)
        total += rho**k / fact * phi_a * phi_b * he_a * he_b
    return total


def cash_or_nothing_2d_analytic(x, y, tau: float, p: BsParamsD):
    """c e^{-r tau} B(d_x, d_y, rho) for the two-asset cash-or-nothing call."""
    if p.dim != 2:
        raise ValueError("two-asset formula needs dim == 2")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    k1, k2 = p.strikes
    s1, s2 = p.sigmas
    if tau <= 0:
        return p.cash * ((x > math.log(k1)) & (y > math.log(k2))).astype(float)
    dx = (x - math.log(k1) + (p.r - s1**2 / 2) * tau) / (s1 * math.sqrt(tau))
    dy = (y - math.log(k2) + (p.r - s2**2 / 2) * tau) / (s2 * math.sqrt(tau))
    return p.cash * math.exp(-p.r * tau) * bivariate_cdf(dx, dy, float(p.rho[0, 1]))


def classical_reference(sys: OdeSystem, t: float) -> np.ndarray:
    """u-block of exp(C T) ubar(0), C the dilated autonomous generator."""
    if sys.homogeneous:
        if sp.issparse(sys.a):
            return spla.expm_multiply(sys.a.astype(complex) * t, sys.u0.astype(complex))
        check_budget(sys.size)
        return matexp(sys.dense_a(), t) @ sys.u0
    n = sys.size
    check_budget(2 * n)
    a = sys.dense_a()
    c = np.block([[a, np.diag(sys.b)], [np.zeros((n, n)), -sys.decay * np.eye(n)]])
    ubar = np.concatenate([sys.u0, np.ones(n)]).astype(complex)
    return (matexp(c, t) @ ubar)[:n]


def call_price_from_u(x, u) -> np.ndarray:
    """The solvers work with w - S; add the asset price back."""
    return np.real(u) + np.exp(np.asarray(x))
