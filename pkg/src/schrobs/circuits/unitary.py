"""Dense unitary of a circuit (verification oracle)."""
from __future__ import annotations

import numpy as np

from ..linalg import MAX_ORACLE_QUBITS, BudgetError
from .ir import Circuit


def circuit_to_unitary(c: Circuit) -> np.ndarray:
    """Apply every gate to all basis columns at once."""
    if c.width > MAX_ORACLE_QUBITS:
        raise BudgetError(f"width {c.width} exceeds oracle budget {MAX_ORACLE_QUBITS}")
    from ..simulator.state import compile_circuit, run_program

    u = np.eye(2**c.width, dtype=complex)
    run_program(u, compile_circuit(c), backend="python")
    return u
