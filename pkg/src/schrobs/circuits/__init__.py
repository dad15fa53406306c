"""Circuit IR, builders, dense-unitary oracle and gate-count audit."""
from .ir import Circuit, DumpParseError, Gate, dump, parse
from .builders import (
    UnsupportedOnCircuitPath,
    bell_basis,
    build_iqft,
    build_qft,
    build_tilde_v1,
    build_tilde_v1_ddim,
    build_tilde_v2,
    build_tilde_v2_ddim,
    build_v1,
    build_v2,
    build_vbs,
    build_vbs_ddim,
    w_gate,
)
from .audit import GateCountReport, count_gates
from .unitary import circuit_to_unitary

__all__ = [
    "Circuit", "Gate", "dump", "parse", "DumpParseError", "bell_basis", "w_gate",
    "build_v1", "build_v2", "build_tilde_v1", "build_tilde_v2", "build_tilde_v1_ddim",
    "build_tilde_v2_ddim", "build_vbs", "build_vbs_ddim", "build_qft", "build_iqft",
    "UnsupportedOnCircuitPath", "GateCountReport", "count_gates", "circuit_to_unitary",
]
