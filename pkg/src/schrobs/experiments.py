"""Experiment drivers shared by the CLI and the acceptance suite."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, fields

import numpy as np

from .circuits.audit import (
    count_gates,
    predicted_q_cv1,
    predicted_q_single,
    predicted_q_v1,
)
from .circuits.builders import build_tilde_v1, build_vbs
from .fd import BsParams1D, BsParamsD, SpatialGrid, assemble_bs_1d, assemble_bs_ddim
from .pricing import (
    bs_call_analytic,
    cash_or_nothing_2d_analytic,
    classical_reference,
)
from .schrodinger import build_pgrid, dilate
from .simulator.pipeline import run_pipeline_full

PROBLEMS = ("bs1d", "bs2d")
PROFILES = ("exponential", "smooth")
ENGINES = ("circuit", "dense")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    problem: str = "bs1d"
    n_x: int | None = None
    n_p: int | None = None
    l_p: float | None = None
    T: float | None = None
    dt: float | None = None
    r: float | None = None
    sigma: float | None = None
    strike: float | None = None
    rho: float | None = None
    cash: float | None = None
    s_min: float | None = None
    s_max: float | None = None
    profile: str = "exponential"
    pstar: str = "auto"
    engine: str | None = None
    source_scale: str = "auto"
    out: str | None = None

    def resolved(self) -> "RunConfig":
        """Fill unset fields with the problem defaults and validate."""
        if self.problem not in PROBLEMS:
            raise ConfigError(f"problem must be one of {PROBLEMS}, got {self.problem!r}")
        base = DEFAULTS[self.problem]
        vals = {f.name: getattr(self, f.name) for f in fields(self)}
        for k, v in base.items():
            if vals.get(k) is None:
                vals[k] = v
        cfg = RunConfig(**vals)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.profile not in PROFILES:
            raise ConfigError(f"profile must be one of {PROFILES}, got {self.profile!r}")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.n_x < 1 or self.n_p < 1:
            raise ConfigError("n_x and n_p must be at least 1")
        for name in ("l_p", "T", "dt", "sigma", "strike", "s_min", "s_max"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.s_min >= self.s_max:
            raise ConfigError("s_min must be smaller than s_max")
        if not -1 <= self.rho <= 1:
            raise ConfigError("rho must lie in [-1, 1]")
        steps = self.T / self.dt
        if abs(steps - round(steps)) > 1e-12 * max(1.0, steps):
            raise ConfigError(f"dt={self.dt} does not divide T={self.T}")
        if self.pstar != "auto":
            try:
                float(self.pstar)
            except ValueError as exc:
                raise ConfigError("pstar must be 'auto' or a number") from exc
        if self.source_scale != "auto":
            try:
                if float(self.source_scale) <= 0:
                    raise ValueError
            except ValueError as exc:
                raise ConfigError("source_scale must be 'auto' or a positive number") from exc
        if self.problem == "bs2d" and self.engine == "circuit" and self.rho != 0:
            raise ConfigError("the circuit engine supports rho = 0 only for bs2d; "
                              "use --engine dense")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))

    def pstar_value(self):
        return "auto" if self.pstar == "auto" else float(self.pstar)

    def scale_value(self):
        return "auto" if self.source_scale == "auto" else float(self.source_scale)


DEFAULTS = {
    "bs1d": dict(n_x=6, n_p=6, l_p=4.0, T=1.0, dt=1e-3, r=0.02, sigma=0.3, strike=30.0,
                 rho=0.0, cash=1.0, s_min=1e-4, s_max=300.0, engine="circuit"),
    "bs2d": dict(n_x=8, n_p=7, l_p=15.0, T=1.0, dt=1e-3, r=0.03, sigma=0.3, strike=50.0,
                 rho=0.6, cash=1.0, s_min=1e-6, s_max=200.0, engine="dense"),
}


def weighted_l2(e: np.ndarray, h: float, dim: int = 1) -> float:
    return float(math.sqrt(h**dim) * np.linalg.norm(e))


@dataclass
class PriceResult:
    columns: list
    rows: list
    summary: dict


def price_1d(cfg: RunConfig) -> PriceResult:
    p = BsParams1D(cfg.r, cfg.sigma, cfg.strike, cfg.T)
    grid = SpatialGrid(math.log(cfg.s_min), math.log(cfg.s_max), cfg.n_x)
    sys = assemble_bs_1d(p, grid)
    pg = build_pgrid(cfg.l_p, cfg.n_p)
    t0 = time.perf_counter()
    res = run_pipeline_full(sys, pg, cfg.T, cfg.n_steps, cfg.profile, cfg.pstar_value(),
                            engine=cfg.engine, source_scale=cfg.scale_value())
    elapsed = time.perf_counter() - t0
    x = grid.nodes()
    s = np.exp(x)
    ref = classical_reference(sys, cfg.T).real + s
    schro = res.u.real + s
    exact = bs_call_analytic(x, cfg.T, p)
    keep = s <= 2 * cfg.strike
    rows = [(s[i], exact[i], ref[i], schro[i], abs(ref[i] - exact[i]), abs(schro[i] - exact[i]))
            for i in np.nonzero(keep)[0]]
    u_ref = ref - s
    summary = {
        "p_star": res.p_star,
        "rel_err_vs_classical": float(np.linalg.norm(res.u.real - u_ref) / np.linalg.norm(u_ref)),
        "dp": pg.dp,
        "seconds": elapsed,
    }
    cols = ["S", "u_exact", "u_classical", "u_schro", "err_classical", "err_schro"]
    return PriceResult(cols, rows, summary)


def bs2d_system(cfg: RunConfig, boundary: str = "mixed"):
    rho = np.array([[1.0, cfg.rho], [cfg.rho, 1.0]])
    p = BsParamsD(2, cfg.r, (cfg.sigma, cfg.sigma), rho, (cfg.strike, cfg.strike),
                  maturity=cfg.T, payoff="cash-or-nothing", cash=cfg.cash)
    grid = SpatialGrid(math.log(cfg.s_min), math.log(cfg.s_max), cfg.n_x)
    return p, grid, assemble_bs_ddim(p, grid, boundary=boundary)


def price_2d(cfg: RunConfig) -> PriceResult:
    boundary = "mixed" if cfg.engine == "dense" else "dirichlet"
    p, grid, sys = bs2d_system(cfg, boundary)
    pg = build_pgrid(cfg.l_p, cfg.n_p)
    t0 = time.perf_counter()
    res = run_pipeline_full(sys, pg, cfg.T, cfg.n_steps, cfg.profile, cfg.pstar_value(),
                            engine=cfg.engine)
    elapsed = time.perf_counter() - t0
    x = grid.nodes(boundary)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    exact = cash_or_nothing_2d_analytic(xx, yy, cfg.T, p).ravel()
    ref = classical_reference(sys, cfg.T).real
    schro = res.u.real
    s1, s2 = np.exp(xx).ravel(), np.exp(yy).ravel()
    keep = (s1 <= 2 * cfg.strike) & (s2 <= 2 * cfg.strike)
    rows = [(s1[i], s2[i], exact[i], ref[i], schro[i], abs(ref[i] - exact[i]),
             abs(schro[i] - exact[i])) for i in np.nonzero(keep)[0]]
    h = grid.h
    summary = {
        "p_star": res.p_star,
        "err_classical": weighted_l2(ref - exact, h, 2),
        "err_schro": weighted_l2(schro - exact, h, 2),
        "seconds": elapsed,
    }
    cols = ["S1", "S2", "u_exact", "u_classical", "u_schro", "err_classical", "err_schro"]
    return PriceResult(cols, rows, summary)


def price(cfg: RunConfig) -> PriceResult:
    cfg = cfg.resolved()
    return price_1d(cfg) if cfg.problem == "bs1d" else price_2d(cfg)


def convergence_table(levels, cfg: RunConfig | None = None, t: float = 0.1,
                      dt: float = 1e-3) -> tuple[list, list]:
    """Errors against the analytic call for paired (n_x, n_p) refinements.

    Runs on the dense engine unless ``cfg.engine`` asks for the circuit.
    """
    cfg = (cfg or RunConfig(engine="dense")).resolved()
    p = BsParams1D(cfg.r, cfg.sigma, cfg.strike, t)
    rows = []
    prev = {}
    for n_x, n_p in levels:
        grid = SpatialGrid(math.log(cfg.s_min), math.log(cfg.s_max), n_x)
        sys = assemble_bs_1d(p, grid)
        pg = build_pgrid(cfg.l_p, n_p)
        x = grid.nodes()
        exact = bs_call_analytic(x, t, p) - np.exp(x)
        row = {"n_x": n_x, "n_p": n_p, "dx": grid.h, "dp": pg.dp,
               "err_classical": weighted_l2(classical_reference(sys, t).real - exact, grid.h)}
        for prof, key in (("exponential", "err_exp"), ("smooth", "err_smooth")):
            res = run_pipeline_full(sys, pg, t, int(round(t / dt)), prof, "auto",
                                    engine=cfg.engine, source_scale=cfg.scale_value())
            row[key] = weighted_l2(res.u.real - exact, grid.h)
        for key in ("err_classical", "err_exp", "err_smooth"):
            okey = key.replace("err", "order")
            row[okey] = math.log2(prev[key] / row[key]) if key in prev else float("nan")
        prev = row
        rows.append(row)
    cols = ["n_x", "n_p", "dx", "dp", "err_classical", "order_classical", "err_exp",
            "order_exp", "err_smooth", "order_smooth"]
    return cols, [[r[c] for c in cols] for r in rows]


def gatecount_table(nx_values, np_values, cfg: RunConfig | None = None):
    """Audited cnot-basis counts against the closed forms; returns (cols, rows, ok)."""
    cfg = (cfg or RunConfig()).resolved()
    p = BsParams1D(cfg.r, cfg.sigma, cfg.strike, cfg.T)
    rows = []
    ok = True
    for n_x in nx_values:
        grid = SpatialGrid(math.log(cfg.s_min), math.log(cfg.s_max), n_x)
        dil = dilate(assemble_bs_1d(p, grid), cfg.scale_value())
        pg0 = build_pgrid(cfg.l_p, 1)
        tv1 = build_tilde_v1(cfg.dt, dil, pg0)
        q_v1 = count_gates(tv1, "cnot-basis").cnot
        ctl = tv1.remap(list(range(tv1.width)), tv1.width + 1).controlled(((tv1.width, 1),))
        q_cv1 = count_gates(ctl, "cnot-basis").cnot
        for n_p in np_values:
            vbs = build_vbs(cfg.dt, dil, build_pgrid(cfg.l_p, n_p))
            q_single = count_gates(vbs, "cnot-basis").single_qubit
            row = [n_x, n_p, q_v1, predicted_q_v1(n_x), q_cv1, predicted_q_cv1(n_x),
                   q_single, predicted_q_single(n_x, n_p)]
            match = row[2] == row[3] and row[4] == row[5] and row[6] == row[7]
            ok &= match
            rows.append(row + [int(match)])
    cols = ["n_x", "n_p", "q_v1", "q_v1_formula", "q_cv1", "q_cv1_formula",
            "q_single", "q_single_formula", "match"]
    return cols, rows, ok
