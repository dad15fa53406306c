import csv
import io
import subprocess
import sys

import pytest

from schrobs.circuits import parse
from schrobs.cli import main, read_config
from schrobs.experiments import ConfigError, RunConfig


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.reader(io.StringIO(text)))


SMALL = ["--nx", "3", "--np", "4", "--T", "0.1", "--dt", "0.01"]


def test_price_csv(capsys, tmp_path):
    out_file = tmp_path / "p.csv"
    code, _, err = run(["price", *SMALL, "--engine", "dense", "--out", str(out_file)], capsys)
    assert code == 0
    raw = out_file.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    rows = rows_of(raw.decode())
    assert rows[0] == ["S", "u_exact", "u_classical", "u_schro", "err_classical", "err_schro"]
    assert len(rows) > 1
    # Floats written with 17 significant digits.
    assert any(len(v.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) >= 15
               for v in rows[1])
    assert "p_star=" in err and "rel_err_vs_classical=" in err


def test_price_circuit_engine_stdout(capsys):
    code, out, _ = run(["price", *SMALL], capsys)
    assert code == 0
    assert out.startswith("S,u_exact")


def test_price_2d_dense(capsys):
    code, out, err = run(["price", "--problem", "bs2d", "--nx", "3", "--np", "4", "--T", "0.1",
                          "--dt", "0.01"], capsys)
    assert code == 0
    assert rows_of(out)[0][:2] == ["S1", "S2"]
    assert "err_schro=" in err


def test_price_2d_circuit_rejects_correlation(capsys):
    code, _, err = run(["price", "--problem", "bs2d", "--engine", "circuit", *SMALL], capsys)
    assert code == 2 and "rho" in err


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment line\nnx = 3\nnp=4  # trailing comment\nT=0.1\ndt=0.05\n"
                   "engine=dense\n")
    code, out, _ = run(["price", "--config", str(cfg)], capsys)
    assert code == 0
    n_rows_nx3 = len(rows_of(out))
    code, out, _ = run(["price", "--config", str(cfg), "--nx", "4"], capsys)
    assert code == 0
    assert len(rows_of(out)) > n_rows_nx3


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour=blue\n")
    code, _, err = run(["price", "--config", str(bad)], capsys)
    assert code == 2 and "unknown config key" in err
    bad.write_text("just words\n")
    code, _, err = run(["price", "--config", str(bad)], capsys)
    assert code == 2 and "key=value" in err
    bad.write_text("nx=three\n")
    code, _, _ = run(["price", "--config", str(bad)], capsys)
    assert code == 2


def test_read_config_aliases(tmp_path):
    f = tmp_path / "c.cfg"
    f.write_text("lp=3\ns-min = 0.01\n\n")
    assert read_config(str(f)) == {"l_p": "3", "s_min": "0.01"}


def test_dt_must_divide_T(capsys):
    code, _, err = run(["price", "--T", "1", "--dt", "0.3"], capsys)
    assert code == 2 and "divide" in err


def test_runconfig_validation():
    with pytest.raises(ConfigError):
        RunConfig(problem="heat").resolved()
    with pytest.raises(ConfigError):
        RunConfig(profile="box").resolved()
    with pytest.raises(ConfigError):
        RunConfig(s_min=5.0, s_max=1.0).resolved()
    with pytest.raises(ConfigError):
        RunConfig(pstar="high").resolved()
    with pytest.raises(ConfigError):
        RunConfig(source_scale="-1").resolved()
    cfg = RunConfig().resolved()
    assert cfg.n_steps == 1000 and cfg.engine == "circuit"


def test_convergence(capsys):
    code, out, _ = run(["convergence", "--levels", "3:4,4:5,5:6", "--maturity", "0.1",
                        "--dt", "0.01"], capsys)
    assert code == 0
    rows = rows_of(out)
    assert rows[0][:4] == ["n_x", "n_p", "dx", "dp"]
    assert len(rows) == 4
    assert rows[1][5] == "nan"
    import math
    for i in (2, 3):
        for col in (4, 6, 8):
            expected = math.log2(float(rows[i - 1][col]) / float(rows[i][col]))
            assert float(rows[i][col + 1]) == pytest.approx(expected, rel=1e-12)


def test_convergence_needs_three_levels(capsys):
    code, _, _ = run(["convergence", "--levels", "3:4,4:5"], capsys)
    assert code == 2


def test_gatecount_reports_mismatch(capsys):
    code, out, err = run(["gatecount", "--nx-range", "3..4", "--np-range", "1..2"], capsys)
    rows = rows_of(out)
    assert rows[0][-1] == "match"
    assert len(rows) == 5
    first = dict(zip(rows[0], rows[1]))
    assert first["q_v1"] == first["q_v1_formula"] == "118"
    assert first["q_single"] == first["q_single_formula"]
    assert first["q_cv1"] == "355" and first["q_cv1_formula"] == "186"
    assert code == 1 and "mismatch" in err


def test_gatecount_rejects_small_nx(capsys):
    code, _, _ = run(["gatecount", "--nx-range", "2..3"], capsys)
    assert code == 2


@pytest.mark.parametrize("circuit", ["v1", "v2", "tilde-v1", "tilde-v2", "vbs", "vbs-2d",
                                     "qft", "iqft"])
def test_dump_circuit_roundtrip(capsys, circuit):
    code, out, _ = run(["dump-circuit", "--circuit", circuit, "--nx", "3", "--np", "2",
                        "--tau", "0.001"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("QUBITS ")
    c = parse(out)
    assert c.width == int(lines[0].split()[1])
    assert all(l.startswith(("QUBITS", "REG", "GATE")) for l in lines)


def test_dump_vbs_registers(capsys):
    _, out, _ = run(["dump-circuit", "--nx", "3", "--np", "2"], capsys)
    regs = [l for l in out.splitlines() if l.startswith("REG")]
    assert regs == ["REG p 0..1", "REG x 2..4", "REG dilation 5..5"]


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "schrobs.cli", "dump-circuit", "--circuit",
                          "qft", "--np", "2"], capture_output=True, text=True, check=True)
    assert out.stdout.startswith("QUBITS 2\n")
