"""Gate-level circuit IR and its text dump format.

Qubit q is bit q of the basis-state index (qubit 0 is least significant).
Angle conventions: RZ(t) = exp(-i t Z/2), RX(t) = exp(-i t X/2),
RY(t) = exp(-i t Y/2), P(l) = diag(1, e^{il}), GPHASE(t) = e^{it} I.
A GPHASE gate with controls multiplies the control-satisfying subspace by
e^{it}; its ``target`` is then just one of the qubits it is anchored to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

KINDS = ("X", "H", "P", "RZ", "RX", "RY", "CNOT", "GPHASE")
ANGLED = ("P", "RZ", "RX", "RY", "GPHASE")


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    angle: float = 0.0
    controls: tuple = ()  # ((qubit, polarity), ...)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if not math.isfinite(self.angle):
            raise ValueError("gate angle must be finite")
        ctrl = tuple((int(q), int(p)) for q, p in self.controls)
        object.__setattr__(self, "controls", ctrl)
        qs = [q for q, _ in ctrl]
        if self.target in qs or len(set(qs)) != len(qs):
            raise ValueError("target and controls must be distinct qubits")
        if any(p not in (0, 1) for _, p in ctrl):
            raise ValueError("control polarity must be 0 or 1")
        if self.kind == "CNOT" and not ctrl:
            raise ValueError("CNOT needs a control")

    @property
    def base(self) -> str:
        """Kind with the CNOT alias resolved to a controlled X."""
        return "X" if self.kind == "CNOT" else self.kind

    @property
    def qubits(self) -> tuple:
        return (self.target,) + tuple(q for q, _ in self.controls)

    def with_controls(self, extra) -> "Gate":
        return Gate(self.kind, self.target, self.angle, self.controls + tuple(extra))

    def dagger(self) -> "Gate":
        if self.kind in ANGLED:
            return Gate(self.kind, self.target, -self.angle, self.controls)
        return self

    def matrix(self) -> np.ndarray:
        """2x2 matrix of the base gate (the phase factor for GPHASE)."""
        t = self.angle
        k = self.base
        if k == "X":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if k == "H":
            return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        if k == "P":
            return np.array([[1, 0], [0, np.exp(1j * t)]])
        if k == "RZ":
            return np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]])
        if k == "RX":
            c, s = np.cos(t / 2), np.sin(t / 2)
            return np.array([[c, -1j * s], [-1j * s, c]])
        if k == "RY":
            c, s = np.cos(t / 2), np.sin(t / 2)
            return np.array([[c, -s], [s, c]], dtype=complex)
        if k == "GPHASE":
            return np.exp(1j * t) * np.eye(2, dtype=complex)
        raise AssertionError(k)


@dataclass
class Circuit:
    width: int
    registers: dict = field(default_factory=dict)  # name -> (lo, hi) inclusive
    gates: list = field(default_factory=list)

    def add(self, g: Gate) -> "Circuit":
        if max(g.qubits) >= self.width or min(g.qubits) < 0:
            raise IndexError(f"gate {g} outside circuit width {self.width}")
        self.gates.append(g)
        return self

    def extend(self, gates) -> "Circuit":
        for g in gates:
            self.add(g)
        return self

    def compose(self, other: "Circuit") -> "Circuit":
        return self.extend(other.gates)

    def dagger(self) -> "Circuit":
        return Circuit(self.width, dict(self.registers), [g.dagger() for g in reversed(self.gates)])

    def controlled(self, controls) -> "Circuit":
        """Every gate conditioned additionally on ``controls``."""
        controls = tuple(controls)
        return Circuit(self.width, dict(self.registers),
                       [g.with_controls(controls) for g in self.gates])

    def remap(self, mapping, width: int, registers: dict | None = None) -> "Circuit":
        """Relabel qubits through ``mapping`` (a sequence or dict)."""
        out = Circuit(width, dict(registers or {}))
        for g in self.gates:
            out.add(Gate(g.kind, mapping[g.target], g.angle,
                         tuple((mapping[q], p) for q, p in g.controls)))
        return out

    def __len__(self) -> int:
        return len(self.gates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (self.width == other.width and self.registers == other.registers
                and self.gates == other.gates)


def _fmt_angle(a: float) -> str:
    return f"{a:.17g}"


def dump(c: Circuit) -> str:
    lines = [f"QUBITS {c.width}"]
    for name, (lo, hi) in sorted(c.registers.items(), key=lambda kv: (kv[1][0], kv[0])):
        lines.append(f"REG {name} {lo}..{hi}")
    for g in c.gates:
        parts = ["GATE", g.kind, f"target={g.target}"]
        if g.controls:
            parts.append("controls=" + ",".join(f"{q}:{p}" for q, p in g.controls))
        if g.kind in ANGLED:
            parts.append("angle=" + _fmt_angle(g.angle))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


class DumpParseError(ValueError):
    pass


def parse(text: str) -> Circuit:
    c = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        try:
            if tok[0] == "QUBITS":
                c = Circuit(int(tok[1]))
            elif tok[0] == "REG":
                lo, hi = tok[2].split("..")
                c.registers[tok[1]] = (int(lo), int(hi))
            elif tok[0] == "GATE":
                kind = tok[1]
                fields = dict(t.split("=", 1) for t in tok[2:])
                controls = ()
                if "controls" in fields:
                    controls = tuple(tuple(int(v) for v in cp.split(":"))
                                     for cp in fields["controls"].split(","))
                c.add(Gate(kind, int(fields["target"]), float(fields.get("angle", 0.0)), controls))
            else:
                raise DumpParseError(f"line {lineno}: unknown record {tok[0]!r}")
        except DumpParseError:
            raise
        except (AttributeError, IndexError, KeyError, ValueError) as exc:
            raise DumpParseError(f"line {lineno}: {exc}") from exc
    if c is None:
        raise DumpParseError("missing QUBITS header")
    return c
