import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schrobs.circuits import Circuit, Gate, build_vbs
from schrobs.fd import BsParams1D, BsParamsD, SpatialGrid, assemble_bs_1d, assemble_bs_ddim
from schrobs.schrodinger import build_pgrid
from schrobs.simulator import state as st_mod
from schrobs.simulator.pipeline import run_pipeline, run_pipeline_full
from schrobs.simulator.state import (
    BACKEND,
    StateVector,
    apply_gate,
    backend_module,
    compile_circuit,
    run_circuit,
    run_program,
)

from conftest import K, R, SIGMA, XMAX, XMIN

KINDS = ["X", "H", "P", "RZ", "RX", "RY", "CNOT", "GPHASE"]
HAVE_COMPILED = BACKEND == "compiled"


def gate_matrix_oracle(g: Gate, width: int) -> np.ndarray:
    """Full matrix built entry by entry from the 2x2 base matrix."""
    n = 2**width
    u = np.zeros((n, n), dtype=complex)
    m = g.matrix()
    t = g.target
    for col in range(n):
        if not all(((col >> q) & 1) == p for q, p in g.controls):
            u[col, col] = 1.0
            continue
        if g.kind == "GPHASE":
            u[col, col] = m[0, 0]
            continue
        b = (col >> t) & 1
        for nb in (0, 1):
            row = (col & ~(1 << t)) | (nb << t)
            u[row, col] += m[nb, b]
    return u


def random_gate(rng, width, max_ctl=3):
    kinds = KINDS if width > 1 else [k for k in KINDS if k != "CNOT"]
    kind = kinds[rng.integers(len(kinds))]
    qs = rng.permutation(width)
    t = int(qs[0])
    k = int(rng.integers(1 if kind == "CNOT" else 0, min(max_ctl, width - 1) + 1))
    ctl = tuple((int(q), int(rng.integers(2))) for q in qs[1:1 + k])
    return Gate(kind, t, float(rng.uniform(-4, 4)), ctl)


def random_state(rng, width):
    v = rng.normal(size=2**width) + 1j * rng.normal(size=2**width)
    return v / np.linalg.norm(v)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_apply_gate_matches_oracle(seed, width):
    rng = np.random.default_rng(seed)
    g = random_gate(rng, width)
    v = random_state(rng, width)
    out = apply_gate(StateVector.from_vector(v), g)
    assert np.max(np.abs(out.vector - gate_matrix_oracle(g, width) @ v)) < 1e-13


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernels not built")
@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 9), st.integers(1, 3))
def test_backend_parity(seed, width, repeats):
    rng = np.random.default_rng(seed)
    c = Circuit(width, gates=[random_gate(rng, width, 4) for _ in range(30)])
    v = random_state(rng, width)
    a = run_circuit(StateVector.from_vector(v), c, repeats, backend="compiled")
    b = run_circuit(StateVector.from_vector(v), c, repeats, backend="python")
    assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-13


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 7))
def test_norm_preserved(seed, width):
    rng = np.random.default_rng(seed)
    c = Circuit(width, gates=[random_gate(rng, width) for _ in range(40)])
    out = run_circuit(StateVector.from_vector(3.0 * random_state(rng, width)), c)
    assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-12
    assert out.norm_factor == pytest.approx(3.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_control_subspace_untouched(seed, width):
    rng = np.random.default_rng(seed)
    g = random_gate(rng, width)
    if not g.controls:
        g = g.with_controls(((next(q for q in range(width) if q != g.target), 1),))
    s0 = StateVector.from_vector(random_state(rng, width))
    v = s0.amplitudes
    out = apply_gate(s0, g).amplitudes
    for i in range(2**width):
        if not all(((i >> q) & 1) == p for q, p in g.controls):
            assert out[i] == v[i]


def test_repeats_equal_repeated_application(rng):
    c = Circuit(4, gates=[random_gate(rng, 4) for _ in range(12)])
    v = random_state(rng, 4)
    once = StateVector.from_vector(v)
    for _ in range(5):
        once = run_circuit(once, c)
    many = run_circuit(StateVector.from_vector(v), c, repeats=5)
    assert np.max(np.abs(once.amplitudes - many.amplitudes)) < 1e-13


def test_global_phase_folding():
    c = Circuit(2, gates=[Gate("GPHASE", 0, 0.2), Gate("H", 1), Gate("GPHASE", 1, 0.5)])
    prog = compile_circuit(c)
    assert len(prog) == 2
    out = run_circuit(StateVector(2), c)
    assert out.amplitudes[0] == pytest.approx(np.exp(0.7j) / np.sqrt(2))


def test_run_program_on_matrix_columns(rng):
    c = Circuit(3, gates=[random_gate(rng, 3) for _ in range(10)])
    u = np.eye(8, dtype=complex)
    run_program(u, compile_circuit(c), backend="python")
    v = random_state(rng, 3)
    assert np.allclose(u @ v, run_circuit(StateVector.from_vector(v), c).amplitudes)


def test_state_validation():
    with pytest.raises(ValueError):
        StateVector(0)
    with pytest.raises(ValueError):
        StateVector(2, np.ones(3))
    with pytest.raises(ValueError):
        StateVector(2, np.zeros(4))
    with pytest.raises(ValueError):
        StateVector.from_vector(np.ones(6))
    with pytest.raises(IndexError):
        apply_gate(StateVector(2), Gate("X", 2))
    with pytest.raises(ValueError):
        run_circuit(StateVector(2), Circuit(3))
    with pytest.raises(ValueError):
        backend_module("fortran")


def test_forced_python_backend_subprocess():
    import subprocess, sys
    out = subprocess.run(
        [sys.executable, "-c", "from schrobs.simulator.state import BACKEND; print(BACKEND)"],
        env={**__import__("os").environ, "SCHROBS_BACKEND": "python"},
        capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_pipeline_circuit_matches_dense_at_small_tau():
    sys = assemble_bs_1d(BsParams1D(R, SIGMA, K, 0.1), SpatialGrid(XMIN, XMAX, 3))
    g = build_pgrid(4, 4)
    ud = run_pipeline(sys, g, 0.1, engine="dense")
    errs = []
    for n in (50, 100):
        uc = run_pipeline(sys, g, 0.1, n, engine="circuit")
        errs.append(np.linalg.norm(uc - ud) / np.linalg.norm(ud))
    assert errs[1] < errs[0]
    assert errs[1] < 1e-3


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernels not built")
def test_pipeline_backends_agree():
    sys = assemble_bs_1d(BsParams1D(R, SIGMA, K, 0.1), SpatialGrid(XMIN, XMAX, 3))
    g = build_pgrid(4, 3)
    a = run_pipeline(sys, g, 0.1, 20, backend="compiled")
    b = run_pipeline(sys, g, 0.1, 20, backend="python")
    assert np.max(np.abs(a - b)) < 1e-10 * np.max(np.abs(a))


def test_pipeline_2d_circuit_path():
    p = BsParamsD(2, 0.03, (0.3, 0.3), np.eye(2), (5.0, 5.0))
    grid = SpatialGrid(np.log(1e-2), np.log(200), 2)
    sys = assemble_bs_ddim(p, grid, boundary="dirichlet")
    g = build_pgrid(4, 3)
    ud = run_pipeline(sys, g, 0.1, engine="dense")
    uc = run_pipeline(sys, g, 0.1, 100, engine="circuit")
    assert np.linalg.norm(uc - ud) <= 1e-2 * np.linalg.norm(ud)


def test_pipeline_argument_checks():
    sys = assemble_bs_1d(BsParams1D(R, SIGMA, K, 0.1), SpatialGrid(XMIN, XMAX, 2))
    g = build_pgrid(4, 2)
    with pytest.raises(ValueError):
        run_pipeline(sys, g, 0.1, 0)
    with pytest.raises(ValueError):
        run_pipeline(sys, g, 0.1, engine="analog")
    res = run_pipeline_full(sys, g, 0.1, engine="dense")
    assert res.state.representation == "p"
    assert res.tau == pytest.approx(0.1)
