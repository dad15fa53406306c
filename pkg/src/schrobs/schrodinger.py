"""Schrodingerisation of du/dtau = A u + b: dilation, warped phase, p-grid.

State layout: a full vector is indexed by ``sys * N_p + k`` where ``sys`` runs
over the (dilation, x) basis with the dilation flag as the most significant
bit and ``k`` runs over the p-grid. Coefficients in eta-space use the same
layout with ``k`` indexing eta_k.

Fourier convention: samples are synthesised as
``v(p_j) = sum_k vhat_k exp(-i eta_k p_j)`` with the unitary 1/sqrt(N_p)
normalisation, so that d/dtau vhat_k = i (eta_k C1 + C2) vhat_k.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fd import OdeSystem, shift_terms
from .linalg import BudgetError, check_budget, hermitian_split


class RecoveryThresholdError(ValueError):
    """Raised when the recovery node lies below the admissible threshold."""

    def __init__(self, p_star: float, threshold: float, lam_t: float):
        self.p_star = p_star
        self.threshold = threshold
        self.lam_t = lam_t
        super().__init__(
            f"p*={p_star:.6g} is below the recovery threshold {threshold:.6g} "
            f"(lambda_max(C1)*T = {lam_t:.6g})"
        )


class UnsupportedSourceError(ValueError):
    """Raised when the source term cannot be written as B times all-ones."""


@dataclass(frozen=True)
class PGrid:
    l_p: float
    n_p: int

    def __post_init__(self):
        if self.l_p <= 0:
            raise ValueError("L_p must be positive")
        if self.n_p < 1:
            raise ValueError("n_p must be at least 1")

    @property
    def n(self) -> int:
        return 2**self.n_p

    @property
    def half_width(self) -> float:
        return np.pi * self.l_p

    @property
    def dp(self) -> float:
        return 2 * np.pi * self.l_p / self.n

    @property
    def nodes(self) -> np.ndarray:
        return -np.pi * self.l_p + self.dp * np.arange(self.n)

    @property
    def etas(self) -> np.ndarray:
        return (np.arange(self.n) - self.n / 2) / self.l_p


def build_pgrid(l_p: float, n_p: int) -> PGrid:
    return PGrid(float(l_p), int(n_p))


@dataclass
class DilatedSystem:
    c: object
    c1: object
    c2: object
    b_diag: np.ndarray  # diagonal of B (length base_dim); zeros when undilated
    base_dim: int
    dilated: bool
    ubar0: np.ndarray
    r: float
    source_scale: float
    ode: OdeSystem

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @property
    def beta(self) -> float:
        """The single nonzero entry of B (0 when undilated)."""
        return float(self.b_diag[-1].real) if self.dilated else 0.0

    def lam_max_c1(self) -> float:
        if not hasattr(self, "_lam"):
            if sp.issparse(self.c1):
                val = spla.eigsh(self.c1, k=1, which="LA", return_eigenvectors=False)[0]
            else:
                val = np.linalg.eigvalsh(self.c1)[-1]
            self._lam = float(np.real(val))
        return self._lam

    def lam_min_c1(self) -> float:
        if not hasattr(self, "_lam_lo"):
            if sp.issparse(self.c1):
                val = spla.eigsh(self.c1, k=1, which="SA", return_eigenvectors=False)[0]
            else:
                val = np.linalg.eigvalsh(self.c1)[0]
            self._lam_lo = float(np.real(val))
        return self._lam_lo


def _sparse_split(c):
    ch = c.conj().T
    return ((c + ch) / 2).tocsr(), ((c - ch) / 2j).tocsr()


def dilate(sys: OdeSystem, source_scale: float | str = 1.0) -> DilatedSystem:
    """Embed du/dtau = A u + exp(-r tau) b into a homogeneous system.

    With R(0) = s * ones and B = diag(b)/s the source is unchanged for any
    scale s > 0. ``source_scale="auto"`` picks s so that the coupling block
    |beta|/2 of C1 equals r/2, which keeps lambda_max(C1) <= 0 on fine grids.
    """
    a = sys.a
    if sys.homogeneous:
        if sp.issparse(a):
            c = a.astype(complex).tocsr()
            c1, c2 = _sparse_split(c)
        else:
            c = np.asarray(a, dtype=complex)
            c1, c2 = hermitian_split(c)
        return DilatedSystem(c=c, c1=c1, c2=c2, b_diag=np.zeros(sys.size, dtype=complex),
                             base_dim=sys.size, dilated=False, ubar0=sys.u0.astype(complex),
                             r=sys.decay, source_scale=1.0, ode=sys)
    b = np.asarray(sys.b, dtype=complex)
    if np.any(b[:-1]) or abs(b[-1].imag) > 0:
        raise UnsupportedSourceError(
            "only a single real source entry at the last node is supported; "
            "drop the left boundary term (neglect_left_boundary=True)"
        )
    r = sys.decay
    if source_scale == "auto":
        target = r if r > 0 else 1e-3
        s = max(1.0, abs(b[-1].real) / target)
    else:
        s = float(source_scale)
        if s <= 0:
            raise ValueError("source_scale must be positive")
    n = sys.size
    check_budget(2 * n)
    a = sys.dense_a()
    bmat = np.diag(b / s)
    c = np.block([[a, bmat], [np.zeros((n, n)), -r * np.eye(n)]]).astype(complex)
    c1, c2 = hermitian_split(c)
    ubar0 = np.concatenate([sys.u0.astype(complex), s * np.ones(n, dtype=complex)])
    return DilatedSystem(c=c, c1=c1, c2=c2, b_diag=b / s, base_dim=n, dilated=True,
                         ubar0=ubar0, r=r, source_scale=s, ode=sys)


def smooth_profile(p) -> np.ndarray:
    """C^1 profile: a cubic patch on (-1, 0), exp(-|p|) elsewhere."""
    p = np.asarray(p, dtype=float)
    out = np.exp(-np.abs(p))
    m = (p > -1) & (p < 0)
    q = p[m]
    e1 = np.exp(-1.0)
    out[m] = (-3 + 3 * e1) * q**3 + (-5 + 4 * e1) * q**2 - q + 1
    return out


def p_profile(g: PGrid, profile: str) -> np.ndarray:
    if profile in ("exponential", "exp"):
        return np.exp(-np.abs(g.nodes))
    if profile == "smooth":
        return smooth_profile(g.nodes)
    raise ValueError(f"unknown profile {profile!r}")


@dataclass(frozen=True)
class WarpedState:
    amplitudes: np.ndarray  # unit-norm, flattened (sys, k)
    norm_factor: float
    representation: str  # "p" or "eta"
    n_p: int

    @property
    def vector(self) -> np.ndarray:
        return self.norm_factor * self.amplitudes

    def blocks(self) -> np.ndarray:
        """Amplitudes reshaped to (sys_dim, N_p)."""
        return self.amplitudes.reshape(-1, 2**self.n_p)

    @classmethod
    def from_vector(cls, vec: np.ndarray, representation: str, n_p: int) -> "WarpedState":
        vec = np.asarray(vec, dtype=complex).ravel()
        nrm = float(np.linalg.norm(vec))
        if nrm == 0:
            raise ValueError("zero state")
        return cls(vec / nrm, nrm, representation, n_p)


def initial_v(d: DilatedSystem, g: PGrid, profile: str = "exponential") -> WarpedState:
    vec = np.kron(d.ubar0, p_profile(g, profile))
    return WarpedState.from_vector(vec, "p", g.n_p)


def dft_matrix(n_p: int) -> np.ndarray:
    """Centered synthesis matrix F[j,k] = exp(-i eta_k p_j)/sqrt(N_p).

    Independent of L_p since eta_k p_j = (k - N/2)(2 pi j/N - pi).
    """
    n = 2**n_p
    j = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    return np.exp(-1j * (k - n / 2) * (2 * np.pi * j / n - np.pi)) / np.sqrt(n)


def _signs(n: int) -> np.ndarray:
    return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)


def p_to_eta_array(blocks: np.ndarray) -> np.ndarray:
    """Apply F^H along the last axis (samples on p_j -> coefficients on eta_k)."""
    n = blocks.shape[-1]
    s = _signs(n)
    half = (-1.0) ** (n // 2)
    return half * s * np.fft.ifft(blocks * s, axis=-1, norm="ortho")


def eta_to_p_array(blocks: np.ndarray) -> np.ndarray:
    n = blocks.shape[-1]
    s = _signs(n)
    half = (-1.0) ** (n // 2)
    return half * s * np.fft.fft(blocks * s, axis=-1, norm="ortho")


def p_to_eta(s: WarpedState) -> WarpedState:
    if s.representation != "p":
        raise ValueError("state is not in p representation")
    amp = p_to_eta_array(s.blocks()).ravel()
    return replace(s, amplitudes=amp, representation="eta")


def eta_to_p(s: WarpedState) -> WarpedState:
    if s.representation != "eta":
        raise ValueError("state is not in eta representation")
    amp = eta_to_p_array(s.blocks()).ravel()
    return replace(s, amplitudes=amp, representation="p")


@dataclass
class HamiltonianBS:
    dil: DilatedSystem
    pgrid: PGrid
    gamma1: float
    gamma2: float
    h1: np.ndarray | None
    h2: np.ndarray | None

    def block(self, k: int):
        """eta_k C1 + C2, the k-th diagonal block of H_BS."""
        return self.pgrid.etas[k] * self.dil.c1 + self.dil.c2

    @property
    def full(self) -> np.ndarray:
        """Dense H_BS = C1 (x) D_eta + C2 (x) I; only within the oracle budget."""
        dim = self.dil.dim * self.pgrid.n
        check_budget(dim)
        c1, c2 = self.dil.c1, self.dil.c2
        if sp.issparse(c1):
            c1, c2 = c1.toarray(), c2.toarray()
        return np.kron(c1, np.diag(self.pgrid.etas)) + np.kron(c2, np.eye(self.pgrid.n))


def x_hamiltonians(n_x: int, h: float, l_p: float):
    """(H1, H2, gamma1, gamma2) on one x-register, built from the shift MPO."""
    g1 = 1.0 / (h**2 * l_p)
    g2 = 1.0 / (2 * h)
    sm = shift_terms(n_x)
    spl = shift_terms(n_x, plus=True)
    eye = np.eye(2**n_x, dtype=complex)
    h1 = g1 * (sum(a + b for a, b in zip(sm, spl)) - 2 * eye)
    h2 = -1j * g2 * sum(a - b for a, b in zip(sm, spl))
    return h1, h2, g1, g2


def assemble_hbs(d: DilatedSystem, g: PGrid) -> HamiltonianBS:
    grid = d.ode.grid
    h = grid.h
    h1 = h2 = None
    if d.ode.boundary == "dirichlet" and grid.n_x <= 10:
        h1, h2, _, _ = x_hamiltonians(grid.n_x, h, g.l_p)
    return HamiltonianBS(dil=d, pgrid=g, gamma1=1.0 / (h**2 * g.l_p), gamma2=1.0 / (2 * h),
                         h1=h1, h2=h2)


def evolve_exact(hb: HamiltonianBS, v0: WarpedState, t: float) -> WarpedState:
    """exp(i T H_BS) v0, applied block by block over eta_k.

    H_BS is block diagonal in k, so this equals the dense exponential of the
    full operator while only ever forming blocks of the system dimension.
    """
    if v0.representation != "eta":
        raise ValueError("evolve_exact expects an eta-space state")
    blocks = v0.blocks().copy()
    npn = hb.pgrid.n
    sparse = sp.issparse(hb.dil.c1)
    if not sparse and hb.dil.dim > 2**14:
        raise BudgetError("block dimension exceeds oracle budget")
    for k in range(npn):
        col = blocks[:, k]
        if not np.any(col):
            continue
        hk = hb.block(k)
        if sparse:
            blocks[:, k] = spla.expm_multiply((1j * t) * hk.tocsc(), col)
        else:
            w, vecs = np.linalg.eigh(hk)
            blocks[:, k] = vecs @ (np.exp(1j * t * w) * (vecs.conj().T @ col))
    return replace(v0, amplitudes=blocks.ravel())


def recovery_threshold(d: DilatedSystem, g: PGrid, t: float) -> tuple[float, float]:
    """(lower bound for p*, lambda_max(C1)*T); the bound includes a one-cell margin."""
    lam_t = d.lam_max_c1() * t
    return max(lam_t, 0.0) + g.dp, lam_t


def recovery_window(d: DilatedSystem, g: PGrid, t: float) -> tuple[float, float]:
    """Admissible recovery nodes [lo, hi].

    The p-grid is periodic, so the left tail of the profile re-enters at the
    right end. Content reaching p* has travelled at most
    Lambda = max(0, -lambda_min(C1)) T, and after the exp(p*) rescaling the
    wrapped tail weighs about exp(2 p* + Lambda - 2 pi L_p). Keeping that
    below exp(-pi L_p) gives hi = (pi L_p - Lambda)/2.
    """
    lo, _ = recovery_threshold(d, g, t)
    spread = max(0.0, -d.lam_min_c1()) * t
    hi = (np.pi * g.l_p - spread) / 2
    return lo, hi


def valid_nodes(d: DilatedSystem, g: PGrid, t: float, window: bool = True) -> np.ndarray:
    lo, hi = recovery_window(d, g, t)
    p = g.nodes
    mask = p >= lo - 1e-12
    if window:
        mask &= p <= hi + 1e-12
    return np.nonzero(mask)[0]


def choose_pstar(d: DilatedSystem, g: PGrid, t: float) -> float:
    """Smallest node at or above the threshold (one-cell margin included)."""
    idx = valid_nodes(d, g, t, window=False)
    if idx.size == 0:
        lo, lam_t = recovery_threshold(d, g, t)
        raise RecoveryThresholdError(float(g.nodes[-1]), lo, lam_t)
    return float(g.nodes[idx[0]])


def node_index(g: PGrid, p_star: float) -> int:
    k = int(round((p_star + np.pi * g.l_p) / g.dp))
    if not 0 <= k < g.n or abs(g.nodes[k] - p_star) > 1e-9 * max(1.0, abs(p_star)):
        raise ValueError(f"p*={p_star} is not a node of the p-grid")
    return k


def recover_u(s: WarpedState, g: PGrid, p_star: float, d: DilatedSystem, t: float) -> np.ndarray:
    """u(T) = exp(p*) v(T, p*) restricted to the dilation-0 block."""
    if s.representation != "p":
        raise ValueError("recover_u expects a p-space state")
    k = node_index(g, p_star)
    lo, lam_t = recovery_threshold(d, g, t)
    if p_star < lo - 1e-12:
        raise RecoveryThresholdError(p_star, lo, lam_t)
    col = s.blocks()[: d.base_dim, k]
    return np.exp(p_star) * s.norm_factor * col
