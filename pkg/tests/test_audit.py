import numpy as np
import pytest

from schrobs.circuits import Circuit, Gate, build_tilde_v1, build_vbs, count_gates
from schrobs.circuits.audit import (
    multi_control_cnots,
    predicted_q_bs,
    predicted_q_cv1,
    predicted_q_single,
    predicted_q_v1,
)
from schrobs.fd import BsParams1D, SpatialGrid, assemble_bs_1d
from schrobs.schrodinger import build_pgrid, dilate

from conftest import K, R, SIGMA, XMAX, XMIN


def dil1d(n_x):
    sys = assemble_bs_1d(BsParams1D(R, SIGMA, K, 1.0), SpatialGrid(XMIN, XMAX, n_x))
    return dilate(sys, "auto")


def test_multi_control_costs():
    assert multi_control_cnots(2) == 8
    assert multi_control_cnots(3) == 24


def test_cnot_basis_pricing_per_gate():
    cases = [
        (Gate("H", 0), 0, 1),
        (Gate("X", 0), 0, 1),
        (Gate("RZ", 0, 0.1), 0, 0),
        (Gate("CNOT", 0, controls=((1, 1),)), 1, 0),
        (Gate("P", 0, 0.1, ((1, 1),)), 1, 1),
        (Gate("H", 0, controls=((1, 1),)), 1, 1),
        (Gate("RX", 0, 0.1, ((1, 1),)), 2, 0),
        (Gate("RZ", 0, 0.1, ((1, 1), (2, 1))), 8, 0),
        (Gate("X", 0, controls=((1, 1), (2, 1), (3, 0))), 24, 0),
        (Gate("GPHASE", 0, 0.1), 0, 0),
        (Gate("GPHASE", 0, 0.1, ((1, 1),)), 0, 0),
        (Gate("GPHASE", 0, 0.1, ((1, 1), (2, 1))), 1, 0),
        (Gate("GPHASE", 0, 0.1, ((1, 1), (2, 1), (3, 1))), 8, 0),
    ]
    for g, cnots, singles in cases:
        rep = count_gates(Circuit(4, gates=[g]), "cnot-basis")
        assert (rep.cnot, rep.single_qubit) == (cnots, singles), g


def test_raw_mode():
    c = Circuit(3, gates=[Gate("H", 0), Gate("CNOT", 1, controls=((0, 1),)),
                          Gate("X", 2, controls=((0, 1),)), Gate("GPHASE", 0, 1.0),
                          Gate("RZ", 1, 0.2, ((0, 1), (2, 1)))])
    rep = count_gates(c)
    assert rep.cnot == 2
    assert rep.single_qubit == 1
    assert rep.by_kind["H"] == 1 and rep.by_kind["RZ[2c]"] == 1
    with pytest.raises(ValueError):
        count_gates(c, "clifford+t")


@pytest.mark.parametrize("n_x", range(3, 9))
def test_tilde_v1_cnots_match_closed_form(n_x):
    tv1 = build_tilde_v1(1e-3, dil1d(n_x), build_pgrid(4, 1))
    assert count_gates(tv1, "cnot-basis").cnot == predicted_q_v1(n_x)


@pytest.mark.parametrize("n_x", [3, 4, 5])
@pytest.mark.parametrize("n_p", [1, 2, 3, 4])
def test_vbs_single_qubit_tally(n_x, n_p):
    vbs = build_vbs(1e-3, dil1d(n_x), build_pgrid(4, n_p))
    assert count_gates(vbs, "cnot-basis").single_qubit == predicted_q_single(n_x, n_p)


@pytest.mark.parametrize("n_x,expected", [(3, 355), (4, 603), (5, 915), (6, 1291),
                                          (7, 1731), (8, 2235)])
def test_controlled_tilde_v1_audit_values(n_x, expected):
    # Audited count of the circuit as built: 32 n^2 + 24 n - 5.
    tv1 = build_tilde_v1(1e-3, dil1d(n_x), build_pgrid(4, 1))
    ctl = tv1.remap(list(range(tv1.width)), tv1.width + 1).controlled(((tv1.width, 1),))
    got = count_gates(ctl, "cnot-basis").cnot
    assert got == expected == 32 * n_x**2 + 24 * n_x - 5
    assert got != predicted_q_cv1(n_x)


def test_closed_forms():
    assert predicted_q_v1(3) == 118
    assert predicted_q_cv1(3) == 186
    assert predicted_q_single(3, 2) == 2 * 14 + 14
    assert predicted_q_bs(3, 2) == 118 + 2 * 118 + 3 * 186
