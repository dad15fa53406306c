"""Explicit circuits for the Schrodingerised Black-Scholes evolution.

Local layouts: an x-register circuit uses qubit j-1 for grid qubit j (j=1 is
the least significant). The dilated single-asset circuits append the
dilation qubit at index n_x. Full V_BS circuits place the p-register at
0..n_p-1, then the x-register(s), then the dilation qubit on top; for d assets
axis 1 is the most significant block.
"""
from __future__ import annotations

import numpy as np

from ..schrodinger import DilatedSystem, PGrid
from .ir import Circuit, Gate


def _x_regs(n_x: int) -> dict:
    return {"x": (0, n_x - 1)}


def _check_j(j: int, n_x: int) -> None:
    if not 1 <= j <= n_x:
        raise IndexError(f"qubit index j={j} outside 1..{n_x}")


def _cnot_fan(j: int) -> list[Gate]:
    return [Gate("CNOT", q, controls=((j - 1, 1),)) for q in range(j - 1)]


def bell_basis(j: int, lam: float, n_x: int) -> Circuit:
    """B_j(lambda) = CNOT fan . P_j(-lambda) . H_j (H applied first)."""
    _check_j(j, n_x)
    c = Circuit(n_x, _x_regs(n_x))
    c.add(Gate("H", j - 1))
    c.add(Gate("P", j - 1, -lam))
    c.extend(_cnot_fan(j))
    return c


def w_gate(j: int, gamma_tau: float, lam: float, n_x: int) -> Circuit:
    """exp(i gamma tau (e^{i lam} s_j^- + e^{-i lam} s_j^+)).

    Conjugates a multi-controlled RZ(-2 gamma tau) = exp(i gamma tau Z) by the
    Bell-basis change B_j.
    """
    b = bell_basis(j, lam, n_x)
    c = Circuit(n_x, _x_regs(n_x))
    c.compose(b.dagger())
    c.add(Gate("RZ", j - 1, -2.0 * gamma_tau, tuple((q, 1) for q in range(j - 1))))
    c.compose(b)
    return c


def _product_w(gamma_tau: float, lam: float, n_x: int) -> Circuit:
    # Matrix product W_1 W_2 ... W_n: W_n acts first.
    c = Circuit(n_x, _x_regs(n_x))
    for j in range(n_x, 0, -1):
        c.compose(w_gate(j, gamma_tau, lam, n_x))
    return c


def build_v1(tau: float, gamma1: float, n_x: int) -> Circuit:
    """Ph(-2 gamma1 tau) prod_j W_j(gamma1 tau, 0) ~ exp(i tau H1)."""
    c = Circuit(n_x, _x_regs(n_x))
    c.add(Gate("GPHASE", 0, -2.0 * gamma1 * tau))
    return c.compose(_product_w(gamma1 * tau, 0.0, n_x))


def build_v2(tau: float, gamma2: float, n_x: int) -> Circuit:
    """prod_j W_j(gamma2 tau, -pi/2) ~ exp(i tau H2)."""
    return _product_w(gamma2 * tau, -np.pi / 2, n_x)


def gammas(dil: DilatedSystem, pgrid: PGrid) -> tuple[float, float]:
    h = dil.ode.grid.h
    return 1.0 / (h**2 * pgrid.l_p), 1.0 / (2 * h)


def _require_circuit_layout(dil: DilatedSystem) -> None:
    if dil.ode.boundary != "dirichlet":
        raise ValueError("circuit builders need the Dirichlet (2**n_x per axis) layout")


def _on_dilation_zero(sub: Circuit, n_x: int) -> Circuit:
    """|0><0| (x) sub + |1><1| (x) I with the X-conjugated dilation control."""
    width = n_x + 1
    c = Circuit(width, {"x": (0, n_x - 1), "dilation": (n_x, n_x)})
    c.add(Gate("X", n_x))
    for g in sub.gates:
        c.add(g.with_controls(((n_x, 1),)))
    c.add(Gate("X", n_x))
    return c


def build_tilde_v1(tau: float, dil: DilatedSystem, pgrid: PGrid) -> Circuit:
    """Single-asset V~1(tau) on (x, dilation), or on x alone when undilated.

    Emission order: multi-controlled RX(-tau beta/L_p) on the dilation qubit
    (controlled by x = all ones), the dilation-0 controlled V1(sigma^2 tau/2),
    then the global phase exp(-i tau r/L_p).
    """
    _require_circuit_layout(dil)
    p = dil.ode.params
    n_x = dil.ode.grid.n_x
    g1, _ = gammas(dil, pgrid)
    v1 = build_v1(p.sigma**2 / 2 * tau, g1, n_x)
    if not dil.dilated:
        c = Circuit(n_x, _x_regs(n_x))
        c.compose(v1)
        c.add(Gate("GPHASE", 0, -tau * p.r / pgrid.l_p))
        return c
    c = Circuit(n_x + 1, {"x": (0, n_x - 1), "dilation": (n_x, n_x)})
    c.add(Gate("RX", n_x, -tau * dil.beta / pgrid.l_p, tuple((q, 1) for q in range(n_x))))
    c.compose(_on_dilation_zero(v1, n_x))
    c.add(Gate("GPHASE", n_x, -tau * p.r / pgrid.l_p))
    return c


def build_tilde_v2(tau: float, dil: DilatedSystem, pgrid: PGrid) -> Circuit:
    """Single-asset V~2(tau): multi-controlled RY(-tau beta), then dilation-0 V2."""
    _require_circuit_layout(dil)
    p = dil.ode.params
    n_x = dil.ode.grid.n_x
    _, g2 = gammas(dil, pgrid)
    v2 = build_v2((p.r - p.sigma**2 / 2) * tau, g2, n_x)
    if not dil.dilated:
        return v2
    c = Circuit(n_x + 1, {"x": (0, n_x - 1), "dilation": (n_x, n_x)})
    c.add(Gate("RY", n_x, -tau * dil.beta, tuple((q, 1) for q in range(n_x))))
    c.compose(_on_dilation_zero(v2, n_x))
    return c


def _assemble_vbs(tv1: Circuit, tv2: Circuit, n_p: int, registers: dict) -> Circuit:
    """V~2 V~1^{-N_p/2} prod_m (V~1^{2^m} controlled on p bit m)."""
    m = tv1.width
    width = n_p + m
    mapping = [n_p + q for q in range(m)]
    t1 = tv1.remap(mapping, width)
    t2 = tv2.remap(mapping, width)
    c = Circuit(width, registers)
    for bit in range(n_p):
        ctl = t1.controlled(((bit, 1),))
        for _ in range(2**bit):
            c.compose(ctl)
    inv = t1.dagger()
    for _ in range(2 ** (n_p - 1)):
        c.compose(inv)
    c.compose(t2)
    return c


def vbs_registers(n_x: int, n_p: int, dim: int = 1, dilated: bool = True) -> dict:
    regs = {"p": (0, n_p - 1)}
    if dim == 1:
        regs["x"] = (n_p, n_p + n_x - 1)
    else:
        for m in range(1, dim + 1):
            lo = n_p + (dim - m) * n_x
            regs[f"x{m}"] = (lo, lo + n_x - 1)
    if dilated:
        top = n_p + dim * n_x
        regs["dilation"] = (top, top)
    return regs


def build_vbs(tau: float, dil: DilatedSystem, pgrid: PGrid) -> Circuit:
    n_x = dil.ode.grid.n_x
    tv1 = build_tilde_v1(tau, dil, pgrid)
    tv2 = build_tilde_v2(tau, dil, pgrid)
    return _assemble_vbs(tv1, tv2, pgrid.n_p, vbs_registers(n_x, pgrid.n_p, 1, dil.dilated))


def _axis_map(m: int, d: int, n_x: int) -> list[int]:
    lo = (d - m) * n_x
    return [lo + q for q in range(n_x)]


def build_tilde_v1_ddim(tau: float, params, grid, pgrid: PGrid) -> Circuit:
    """prod_m V1(sigma_m^2 rho_mm tau/2) on axis m, times exp(-i tau r/L_p)."""
    d, n_x = params.dim, grid.n_x
    g1 = 1.0 / (grid.h**2 * pgrid.l_p)
    c = Circuit(d * n_x)
    for m in range(1, d + 1):
        s = params.sigmas[m - 1]
        v = build_v1(s**2 * params.rho[m - 1, m - 1] / 2 * tau, g1, n_x)
        c.compose(v.remap(_axis_map(m, d, n_x), d * n_x))
    c.add(Gate("GPHASE", 0, -tau * params.r / pgrid.l_p))
    return c


def build_tilde_v2_ddim(tau: float, params, grid, pgrid: PGrid) -> Circuit:
    d, n_x = params.dim, grid.n_x
    g2 = 1.0 / (2 * grid.h)
    c = Circuit(d * n_x)
    for m in range(1, d + 1):
        s = params.sigmas[m - 1]
        v = build_v2((params.r - s**2 / 2) * tau, g2, n_x)
        c.compose(v.remap(_axis_map(m, d, n_x), d * n_x))
    return c


class UnsupportedOnCircuitPath(ValueError):
    pass


def build_vbs_ddim(tau: float, params, grid, pgrid: PGrid) -> Circuit:
    """d-asset V_BS for a diagonal correlation matrix; no dilation qubit."""
    if not params.diagonal:
        raise UnsupportedOnCircuitPath(
            "off-diagonal correlations are only supported on the dense path")
    tv1 = build_tilde_v1_ddim(tau, params, grid, pgrid)
    tv2 = build_tilde_v2_ddim(tau, params, grid, pgrid)
    regs = vbs_registers(grid.n_x, pgrid.n_p, params.dim, dilated=False)
    return _assemble_vbs(tv1, tv2, pgrid.n_p, regs)


def _qft_std(n: int) -> Circuit:
    """|j> -> N^{-1/2} sum_k e^{+2 pi i jk/N}|k>, qubit n-1 most significant."""
    c = Circuit(n, {"p": (0, n - 1)})
    for i in range(n - 1, -1, -1):
        c.add(Gate("H", i))
        for q in range(i - 1, -1, -1):
            c.add(Gate("P", i, np.pi / 2 ** (i - q), ((q, 1),)))
    for i in range(n // 2):
        a, b = i, n - 1 - i
        c.add(Gate("CNOT", b, controls=((a, 1),)))
        c.add(Gate("CNOT", a, controls=((b, 1),)))
        c.add(Gate("CNOT", b, controls=((a, 1),)))
    return c


def build_qft(n_p: int) -> Circuit:
    """Centered transform from p-samples to eta-coefficients.

    Equals (-1)^{N/2} Z_0 QFT Z_0, i.e. the adjoint of the synthesis matrix
    F[j,k] = exp(-i eta_k p_j)/sqrt(N).
    """
    if n_p < 1:
        raise ValueError("n_p must be at least 1")
    c = Circuit(n_p, {"p": (0, n_p - 1)})
    c.add(Gate("P", 0, np.pi))
    c.compose(_qft_std(n_p))
    c.add(Gate("P", 0, np.pi))
    if n_p == 1:
        c.add(Gate("GPHASE", 0, np.pi))
    return c


def build_iqft(n_p: int) -> Circuit:
    return build_qft(n_p).dagger()
