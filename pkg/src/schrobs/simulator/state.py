"""Statevector engine.

Circuits are compiled once into flat arrays and executed by the compiled
kernel when it is available, otherwise by the numpy fallback. Set
``SCHROBS_BACKEND=python`` to force the fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..circuits.ir import Circuit, Gate
from . import _kernels_py

GENERAL, DIAGONAL, SUBSPACE_PHASE, FLIP = 0, 1, 2, 3

_compiled = None
if os.environ.get("SCHROBS_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on the build
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
MAX_SIM_QUBITS = 28


def backend_module(name: str | None = None):
    name = name or BACKEND
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    if name == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {name!r}")


@dataclass
class Program:
    nq: int
    gtype: np.ndarray
    target: np.ndarray
    cval: np.ndarray
    pos_off: np.ndarray
    pos: np.ndarray
    mats: np.ndarray

    def __len__(self) -> int:
        return len(self.gtype)


def _classify(g: Gate):
    ctrl_pos = [q for q, _ in g.controls]
    cval = sum(1 << q for q, p in g.controls if p)
    m = g.matrix()
    if g.kind == "GPHASE":
        return SUBSPACE_PHASE, ctrl_pos, cval, m
    if g.base == "X":
        return FLIP, ctrl_pos + [g.target], cval, m
    if m[0, 1] == 0 and m[1, 0] == 0:
        return DIAGONAL, ctrl_pos + [g.target], cval, m
    return GENERAL, ctrl_pos + [g.target], cval, m


def compile_circuit(c: Circuit) -> Program:
    """Flatten a circuit; uncontrolled global phases are folded into one factor."""
    gtype, target, cval, offs, pos, mats = [], [], [], [0], [], []
    phase = 1.0 + 0j
    for g in c.gates:
        if g.kind == "GPHASE" and not g.controls:
            phase *= np.exp(1j * g.angle)
            continue
        t, fixed, cv, m = _classify(g)
        gtype.append(t)
        target.append(g.target)
        cval.append(cv)
        pos.extend(sorted(fixed))
        offs.append(len(pos))
        mats.append(m.ravel())
    if phase != 1.0:
        gtype.append(SUBSPACE_PHASE)
        target.append(0)
        cval.append(0)
        offs.append(len(pos))
        mats.append(np.array([phase, 0, 0, phase]))
    return Program(
        nq=c.width,
        gtype=np.asarray(gtype, dtype=np.int32),
        target=np.asarray(target, dtype=np.int32),
        cval=np.asarray(cval, dtype=np.int64),
        pos_off=np.asarray(offs, dtype=np.int64),
        pos=np.asarray(pos, dtype=np.int32),
        mats=np.ascontiguousarray(np.asarray(mats, dtype=complex).reshape(-1, 4)),
    )


def run_program(psi: np.ndarray, prog: Program, repeats: int = 1, backend: str | None = None):
    """Apply ``prog`` to ``psi`` in place, ``repeats`` times."""
    if len(prog) == 0 or repeats <= 0:
        return psi
    mod = backend_module(backend)
    if mod is _kernels_py or psi.ndim != 1:
        _kernels_py.run_program(psi, prog.nq, prog.gtype, prog.target, prog.cval,
                                prog.pos_off, prog.pos, prog.mats, repeats)
    else:
        mod.run_program(psi, prog.nq, prog.gtype, prog.target, prog.cval,
                        prog.pos_off, prog.pos, prog.mats, repeats)
    return psi


class StateVector:
    """Unit-norm amplitudes plus a scalar norm factor."""

    def __init__(self, width: int, amplitudes=None, norm_factor: float = 1.0):
        if width < 1 or width > MAX_SIM_QUBITS:
            raise ValueError(f"width must be in 1..{MAX_SIM_QUBITS}")
        self.width = width
        if amplitudes is None:
            amp = np.zeros(2**width, dtype=complex)
            amp[0] = 1.0
        else:
            amp = np.array(amplitudes, dtype=complex).ravel()
            if amp.size != 2**width:
                raise ValueError("amplitude count does not match width")
            nrm = np.linalg.norm(amp)
            if nrm == 0:
                raise ValueError("zero state")
            amp = amp / nrm
            norm_factor = norm_factor * nrm
        self.amplitudes = np.ascontiguousarray(amp)
        self.norm_factor = float(norm_factor)

    @classmethod
    def from_vector(cls, vec) -> "StateVector":
        vec = np.asarray(vec, dtype=complex).ravel()
        width = int(round(np.log2(vec.size)))
        if 2**width != vec.size:
            raise ValueError("vector length is not a power of two")
        return cls(width, vec)

    @property
    def vector(self) -> np.ndarray:
        return self.norm_factor * self.amplitudes

    def copy(self) -> "StateVector":
        s = StateVector.__new__(StateVector)
        s.width = self.width
        s.amplitudes = self.amplitudes.copy()
        s.norm_factor = self.norm_factor
        return s

    def renormalise(self) -> None:
        nrm = float(np.linalg.norm(self.amplitudes))
        self.amplitudes /= nrm
        self.norm_factor *= nrm


def _check_gate(width: int, g: Gate) -> None:
    if max(g.qubits) >= width or min(g.qubits) < 0:
        raise IndexError(f"gate {g} acts outside width {width}")


def apply_gate(s: StateVector, g: Gate, backend: str | None = None) -> StateVector:
    """Return a new state with ``g`` applied."""
    _check_gate(s.width, g)
    out = s.copy()
    c = Circuit(s.width, gates=[g])
    run_program(out.amplitudes, compile_circuit(c), 1, backend)
    return out


def run_circuit(s: StateVector, c: Circuit, repeats: int = 1, backend: str | None = None,
                inplace: bool = False) -> StateVector:
    if c.width != s.width:
        raise ValueError("circuit and state widths differ")
    out = s if inplace else s.copy()
    run_program(out.amplitudes, compile_circuit(c), repeats, backend)
    return out
