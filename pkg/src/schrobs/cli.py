"""Command-line front end: price, convergence, gatecount, dump-circuit.

Settings come from flags and an optional ``--config`` file of ``key=value``
lines (``#`` starts a comment). Flags override the file.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import fields

from .circuits import builders
from .circuits.ir import dump, parse
from .experiments import (
    ConfigError,
    RunConfig,
    convergence_table,
    gatecount_table,
    price,
)
from .fd import BsParams1D, BsParamsD, SpatialGrid, assemble_bs_1d
from .schrodinger import build_pgrid, dilate

_FLOAT_KEYS = {"l_p", "T", "dt", "r", "sigma", "strike", "rho", "cash", "s_min", "s_max"}
_INT_KEYS = {"n_x", "n_p"}
_ALIASES = {"nx": "n_x", "np": "n_p", "lp": "l_p"}


def read_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, val = (t.strip() for t in line.split("=", 1))
            key = key.replace("-", "_")
            key = _ALIASES.get(key, key)
            out[key] = val
    return out


def _coerce(key: str, val):
    if val is None:
        return None
    try:
        if key in _FLOAT_KEYS:
            return float(val)
        if key in _INT_KEYS:
            return int(val)
    except ValueError as exc:
        raise ConfigError(f"invalid value for {key}: {val!r}") from exc
    return str(val)


def build_config(args: argparse.Namespace) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    merged = {}
    if getattr(args, "config", None):
        for k, v in read_config(args.config).items():
            if k not in known:
                raise ConfigError(f"unknown config key {k!r}; known keys: {sorted(known)}")
            merged[k] = v
    for k in known:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    return RunConfig(**{k: _coerce(k, v) for k, v in merged.items()})


def fmt(v) -> str:
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        f = float(v)
        if math.isnan(f):
            return "nan"
        return f"{f:.17g}"
    return str(v)


def write_csv(columns, rows, out: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--problem", choices=("bs1d", "bs2d"))
    p.add_argument("--nx", dest="n_x", type=int)
    p.add_argument("--np", dest="n_p", type=int)
    p.add_argument("--lp", dest="l_p", type=float, help="p-domain is [-pi L_p, pi L_p]")
    p.add_argument("--T", dest="T", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--strike", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--cash", type=float)
    p.add_argument("--s-min", dest="s_min", type=float)
    p.add_argument("--s-max", dest="s_max", type=float)
    p.add_argument("--profile", choices=("exponential", "smooth"))
    p.add_argument("--pstar", help="'auto' or a p-grid node")
    p.add_argument("--engine", choices=("circuit", "dense"))
    p.add_argument("--source-scale", dest="source_scale", help="'auto' or a positive number")
    p.add_argument("--out", help="output file (default: stdout)")


def _range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",")]


def _levels(text: str) -> list[tuple[int, int]]:
    out = []
    for tok in text.split(","):
        a, b = tok.split(":")
        out.append((int(a), int(b)))
    return out


def cmd_price(args) -> int:
    cfg = build_config(args)
    res = price(cfg)
    write_csv(res.columns, res.rows, cfg.out)
    summary = " ".join(f"{k}={fmt(v)}" for k, v in res.summary.items())
    print(summary, file=sys.stderr)
    return 0


def cmd_convergence(args) -> int:
    cfg = build_config(args)
    cfg.problem = "bs1d"
    if cfg.engine is None:
        cfg.engine = "dense"
    levels = _levels(args.levels)
    if len(levels) < 3:
        raise ConfigError("convergence needs at least 3 grid levels")
    cols, rows = convergence_table(levels, cfg, t=args.maturity, dt=cfg.dt or 1e-3)
    write_csv(cols, rows, cfg.out)
    return 0


def cmd_gatecount(args) -> int:
    cfg = build_config(args)
    cfg.problem = "bs1d"
    nx = _range(args.nx_range)
    if min(nx) < 3:
        raise ConfigError("cnot-basis audit needs n_x >= 3")
    cols, rows, ok = gatecount_table(nx, _range(args.np_range), cfg)
    write_csv(cols, rows, cfg.out)
    if not ok:
        print("gate-count audit: mismatch against closed-form predictions", file=sys.stderr)
    return 0 if ok else 1


def make_circuit(kind: str, cfg: RunConfig, tau: float):
    cfg = cfg.resolved()
    pg = build_pgrid(cfg.l_p, cfg.n_p)
    if kind == "qft":
        return builders.build_qft(cfg.n_p)
    if kind == "iqft":
        return builders.build_iqft(cfg.n_p)
    grid = SpatialGrid(math.log(cfg.s_min), math.log(cfg.s_max), cfg.n_x)
    if kind == "vbs-2d":
        pd = BsParamsD(2, cfg.r, (cfg.sigma, cfg.sigma), [[1, 0], [0, 1]],
                       (cfg.strike, cfg.strike))
        return builders.build_vbs_ddim(tau, pd, grid, pg)
    dil = dilate(assemble_bs_1d(BsParams1D(cfg.r, cfg.sigma, cfg.strike, cfg.T), grid),
                 cfg.scale_value())
    g1, g2 = builders.gammas(dil, pg)
    table = {
        "v1": lambda: builders.build_v1(cfg.sigma**2 / 2 * tau, g1, cfg.n_x),
        "v2": lambda: builders.build_v2((cfg.r - cfg.sigma**2 / 2) * tau, g2, cfg.n_x),
        "tilde-v1": lambda: builders.build_tilde_v1(tau, dil, pg),
        "tilde-v2": lambda: builders.build_tilde_v2(tau, dil, pg),
        "vbs": lambda: builders.build_vbs(tau, dil, pg),
    }
    if kind not in table:
        raise ConfigError(f"unknown circuit {kind!r}")
    return table[kind]()


CIRCUITS = ("v1", "v2", "tilde-v1", "tilde-v2", "vbs", "vbs-2d", "qft", "iqft")


def cmd_dump_circuit(args) -> int:
    cfg = build_config(args)
    cfg.problem = "bs1d"
    tau = args.tau if args.tau is not None else (cfg.dt or 1e-3)
    c = make_circuit(args.circuit, cfg, tau)
    text = dump(c)
    if parse(text) != c:
        print("dump does not round-trip", file=sys.stderr)
        return 1
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schrobs", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="price curve: analytic, classical and Schrodingerised")
    _add_run_flags(p)
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("convergence", help="L2 errors and orders under paired refinement")
    _add_run_flags(p)
    p.add_argument("--levels", default="6:7,7:8,8:9", help="n_x:n_p pairs, comma separated")
    p.add_argument("--maturity", type=float, default=0.1)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("gatecount", help="audit CNOT/single-qubit counts against closed forms")
    _add_run_flags(p)
    p.add_argument("--nx-range", default="3..8")
    p.add_argument("--np-range", default="1..4")
    p.set_defaults(func=cmd_gatecount)

    p = sub.add_parser("dump-circuit", help="write a circuit in the line-oriented dump format")
    _add_run_flags(p)
    p.add_argument("--circuit", choices=CIRCUITS, default="vbs")
    p.add_argument("--tau", type=float)
    p.set_defaults(func=cmd_dump_circuit)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
