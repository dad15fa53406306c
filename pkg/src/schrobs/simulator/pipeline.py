"""End-to-end Schrodingerisation run: prepare, transform, evolve, recover."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuits.builders import build_iqft, build_qft, build_vbs, build_vbs_ddim
from ..circuits.ir import Circuit
from ..fd import OdeSystem
from ..schrodinger import (
    DilatedSystem,
    PGrid,
    WarpedState,
    assemble_hbs,
    choose_pstar,
    dilate,
    eta_to_p,
    evolve_exact,
    initial_v,
    p_to_eta,
    recover_u,
)
from .state import StateVector, compile_circuit, run_program

ENGINES = ("circuit", "dense")


@dataclass
class PipelineResult:
    u: np.ndarray
    state: WarpedState  # final p-space state
    dil: DilatedSystem
    p_star: float
    tau: float


def _register_circuit(c: Circuit, lo: int, width: int) -> Circuit:
    return c.remap([lo + q for q in range(c.width)], width)


def evolve_circuit(dil: DilatedSystem, pgrid: PGrid, v0: WarpedState, t: float, n_steps: int,
                   backend: str | None = None) -> WarpedState:
    """QFT on p, V_BS(tau) applied n_steps times, inverse QFT. Input/output in p-space."""
    if v0.representation != "p":
        raise ValueError("circuit evolution starts from a p-space state")
    tau = t / n_steps
    ode = dil.ode
    if ode.dim == 1:
        vbs = build_vbs(tau, dil, pgrid)
    else:
        vbs = build_vbs_ddim(tau, ode.params, ode.grid, pgrid)
    width = vbs.width
    if 2**width != v0.amplitudes.size:
        raise ValueError("state size does not match the circuit register layout")
    qft = _register_circuit(build_qft(pgrid.n_p), 0, width)
    iqft = _register_circuit(build_iqft(pgrid.n_p), 0, width)
    sv = StateVector(width, v0.amplitudes, v0.norm_factor)
    psi = sv.amplitudes
    run_program(psi, compile_circuit(qft), 1, backend)
    run_program(psi, compile_circuit(vbs), n_steps, backend)
    run_program(psi, compile_circuit(iqft), 1, backend)
    sv.renormalise()
    return WarpedState(sv.amplitudes, sv.norm_factor, "p", pgrid.n_p)


def evolve_dense(dil: DilatedSystem, pgrid: PGrid, v0: WarpedState, t: float) -> WarpedState:
    hb = assemble_hbs(dil, pgrid)
    return eta_to_p(evolve_exact(hb, p_to_eta(v0), t))


def run_pipeline_full(
    sys: OdeSystem,
    pgrid: PGrid,
    t: float,
    n_steps: int = 1,
    profile: str = "exponential",
    p_star: float | str = "auto",
    engine: str = "circuit",
    source_scale: float | str = "auto",
    backend: str | None = None,
) -> PipelineResult:
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}")
    dil = dilate(sys, source_scale)
    v0 = initial_v(dil, pgrid, profile)
    if engine == "dense":
        vt = evolve_dense(dil, pgrid, v0, t)
    else:
        vt = evolve_circuit(dil, pgrid, v0, t, n_steps, backend)
    ps = choose_pstar(dil, pgrid, t) if p_star == "auto" else float(p_star)
    u = recover_u(vt, pgrid, ps, dil, t)
    return PipelineResult(u=u, state=vt, dil=dil, p_star=ps, tau=t / n_steps)


def run_pipeline(sys: OdeSystem, pgrid: PGrid, t: float, n_steps: int = 1,
                 profile: str = "exponential", p_star: float | str = "auto",
                 **kw) -> np.ndarray:
    """Recovered u(T) on the spatial grid."""
    return run_pipeline_full(sys, pgrid, t, n_steps, profile, p_star, **kw).u
