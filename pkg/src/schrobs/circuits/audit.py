"""Gate-count auditing against closed-form predictions.

Two modes. ``raw`` counts IR gates as written. ``cnot-basis`` prices every
gate by its kind and number of controls k:

* uncontrolled gates are single-qubit gates (global phases are free);
* k = 1: X and H/P cost one CNOT, rotations two;
* k >= 2: a gate with k controls costs 16(k+1) - 40 CNOTs, the bound for a
  multi-controlled rotation with k controls (Toffoli: 8, C3X: 24);
* a global phase with k controls is a phase gate with k-1 controls.

The single-qubit tally counts the H, P and X gates that appear with at most
one control (the X, H and phase gates of the Bell-basis changes and dilation
conjugations), which is the quantity the closed-form single-qubit formula
tracks. Global phases never enter it.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .ir import Circuit, Gate

ROTATIONS = ("RZ", "RX", "RY")


class UnsupportedGateError(ValueError):
    pass


@dataclass
class GateCountReport:
    single_qubit: int = 0
    cnot: int = 0
    by_kind: Counter = field(default_factory=Counter)


def multi_control_cnots(k: int) -> int:
    """CNOT cost of a gate with k >= 2 controls."""
    return 16 * (k + 1) - 40


def _cnot_cost(kind: str, k: int) -> int:
    if kind == "GPHASE":
        return 0 if k <= 1 else _cnot_cost("P", k - 1)
    if k == 0:
        return 0
    if k == 1:
        if kind in ("X", "H", "P"):
            return 1
        if kind in ROTATIONS:
            return 2
        raise UnsupportedGateError(kind)
    return multi_control_cnots(k)


def _is_single(g: Gate) -> bool:
    k = len(g.controls)
    if g.kind == "GPHASE":
        return False
    if g.base == "X":
        return k == 0
    if g.base in ("H", "P"):
        return k <= 1
    return False


def count_gates(c: Circuit, decomposition: str = "raw") -> GateCountReport:
    rep = GateCountReport()
    for g in c.gates:
        k = len(g.controls)
        label = g.kind if k == 0 else f"{g.base}[{k}c]"
        rep.by_kind[label] += 1
        if decomposition == "raw":
            if g.kind == "GPHASE":
                continue
            if g.kind == "CNOT" or (g.base == "X" and k == 1):
                rep.cnot += 1
            elif k == 0:
                rep.single_qubit += 1
        elif decomposition == "cnot-basis":
            rep.cnot += _cnot_cost(g.base, k)
            if _is_single(g):
                rep.single_qubit += 1
        else:
            raise ValueError(f"unknown decomposition mode {decomposition!r}")
    return rep


def predicted_q_v1(n_x: int) -> int:
    return 16 * n_x**2 - 4 * n_x - 14


def predicted_q_cv1(n_x: int) -> int:
    return 32 * n_x**2 - 12 * n_x - 66


def predicted_q_single(n_x: int, n_p: int) -> int:
    return 2 ** (n_p - 1) * (4 * n_x + 2) + (4 * n_x + 2)


def predicted_q_bs(n_x: int, n_p: int) -> int:
    q1 = predicted_q_v1(n_x)
    return q1 + 2 ** (n_p - 1) * q1 + (2**n_p - 1) * predicted_q_cv1(n_x)
