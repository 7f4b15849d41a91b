import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from effenv.cli import main, trajectory_csv
from effenv.correlation import CorrelationKernel
from effenv.effective_env import ChannelSpec, bloch_to_density
from effenv.superop import SuperOperator, superop_from_map
from effenv.tcl import gamma_matrix, integrate_tcl

KERNEL = '{"kind": "exponential", "kappa": 1, "tau_r": 1}'


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def run(args, tmp_path, name="out"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out


def test_decay_curve_rows(tmp_path):
    code, out = run(["decay-curve", "--kernel", '{"kind":"exponential","kappa":1,"tau_r":10}',
                     "--tau-max", "1", "--points", "11"], tmp_path)
    assert code == 0
    header, data = read_csv(out)
    assert header == ["tau", "decay"]
    assert data[0, 1] == 1.0
    assert data[-1, 0] == 1.0
    assert data[-1, 1] == pytest.approx(0.9527772098505712, rel=1e-15)


def test_decay_curve_near_markovian(tmp_path):
    code, out = run(["decay-curve", "--kernel", '{"kind":"exponential","kappa":1,"tau_r":1e-9}',
                     "--tau-max", "1", "--points", "2"], tmp_path)
    _, data = read_csv(out)
    assert data[1, 1] == pytest.approx(math.exp(-1), abs=1e-8)


def test_seventeen_significant_digits(tmp_path):
    _, out = run(["decay-curve", "--kernel", KERNEL, "--tau-max", "1", "--points", "3"], tmp_path)
    lines = out.read_text().splitlines()
    value = lines[3].split(",")[1]
    assert float(value) == pytest.approx(math.exp(-math.exp(-1)), rel=1e-15)
    assert len(value.replace("0.", "").lstrip("0")) == 17


def test_json_format(tmp_path):
    _, out = run(["decay-curve", "--kernel", KERNEL, "--points", "5", "--format", "json"], tmp_path)
    data = json.loads(out.read_text())
    assert set(data) == {"tau", "decay"} and len(data["tau"]) == 5


def test_determinism(tmp_path):
    args = ["simulate", "--kernel", KERNEL, "--channel", '{"kind":"depolarizing"}',
            "--bloch", "0.6,0,0.8", "--points", "21"]
    _, a = run(args, tmp_path, "a.csv")
    _, b = run(args, tmp_path, "b.csv")
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("channel", ['{"kind":"dephasing"}', '{"kind":"depolarizing"}',
                                     '{"kind":"amplitude_damping","r":[0,0,-0.5]}'])
def test_simulate_dilation_vs_closed_form(tmp_path, channel):
    base = ["simulate", "--kernel", KERNEL, "--channel", channel, "--bloch", "0.3,-0.5,0.6",
            "--tau-max", "4", "--points", "41"]
    _, a = run(base, tmp_path, "a.csv")
    _, b = run(base + ["--closed-form"], tmp_path, "b.csv")
    ha, da = read_csv(a)
    hb, db = read_csv(b)
    assert ha == hb == ["tau", "sx", "sy", "sz"]
    assert np.max(np.abs(da - db)) <= 1e-12
    np.testing.assert_allclose(da[0, 1:], [0.3, -0.5, 0.6], atol=1e-15)


def test_simulate_rejects_unphysical_bloch(tmp_path, capsys):
    code, _ = run(["simulate", "--kernel", KERNEL, "--channel", '{"kind":"dephasing"}',
                   "--bloch", "1,1,0"], tmp_path)
    assert code == 2
    assert "norm" in capsys.readouterr().err


@pytest.mark.parametrize("bad", ['{"kind": "exponential"', '{"kind":"exponential","kappa":1}',
                                 "no_such_file.json"])
def test_malformed_kernel_exit_2(tmp_path, bad):
    code, _ = run(["decay-curve", "--kernel", bad], tmp_path)
    assert code == 2


def test_bad_channel_exit_2(tmp_path):
    code, _ = run(["simulate", "--kernel", KERNEL, "--channel", '{"kind":"dephasing","r":[0,0,1]}'],
                  tmp_path)
    assert code == 2


def test_argparse_usage_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["decay-curve"])
    assert info.value.code == 2


def test_check_cp_channel(tmp_path):
    code, out = run(["check-cp", "--kernel", KERNEL, "--channel", '{"kind":"dephasing"}',
                     "--tau", "1"], tmp_path)
    assert code == 0
    report = json.loads(out.read_text())
    assert report["is_cp"] is True
    assert set(report) == {"choi_eigenvalues", "min_eigenvalue", "hermitian_preserving", "is_cp",
                           "tolerance_used"}


def test_check_cp_transpose_file(tmp_path):
    path = tmp_path / "transpose.json"
    path.write_text(json.dumps(superop_from_map(lambda x: x.T, 2).to_json()))
    code, out = run(["check-cp", "--superop", str(path)], tmp_path)
    assert code == 3
    report = json.loads(out.read_text())
    assert report["is_cp"] is False
    assert report["min_eigenvalue"] == pytest.approx(-1, abs=1e-12)


def test_check_cp_identity_file(tmp_path):
    path = tmp_path / "identity.json"
    path.write_text(json.dumps(SuperOperator(2, np.eye(4)).to_json()))
    code, out = run(["check-cp", "--superop", str(path)], tmp_path)
    assert code == 0
    assert json.loads(out.read_text())["choi_eigenvalues"] == [0, 0, 0, 2]


def test_check_cp_malformed_superop(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 2, "mat": [[1, 0]]}')
    code, _ = run(["check-cp", "--superop", str(path)], tmp_path)
    assert code == 2
    code, _ = run(["check-cp"], tmp_path)
    assert code == 2


def test_kraus_identity(tmp_path):
    path = tmp_path / "identity.json"
    path.write_text(json.dumps(SuperOperator(2, np.eye(4)).to_json()))
    code, out = run(["kraus", "--superop", str(path)], tmp_path)
    assert code == 0
    data = json.loads(out.read_text())
    assert len(data["ops"]) == 1
    assert data["residual"] <= 1e-12


def test_kraus_dephasing_weights(tmp_path):
    # Markovian dephasing with decay c = 0.5 at tau = ln 2
    code, out = run(["kraus", "--kernel", '{"kind":"exponential","kappa":1,"tau_r":0}',
                     "--channel", '{"kind":"dephasing"}', "--tau", repr(math.log(2))], tmp_path)
    assert code == 0
    ops = [np.array([complex(*z) for z in op]) for op in json.loads(out.read_text())["ops"]]
    weights = sorted((np.vdot(op, op).real / 2 for op in ops), reverse=True)
    np.testing.assert_allclose(weights, [0.75, 0.25], atol=1e-12)


def test_kraus_depolarizing_four_ops(tmp_path):
    code, out = run(["kraus", "--kernel", KERNEL, "--channel", '{"kind":"depolarizing"}',
                     "--tau", "1"], tmp_path)
    assert code == 0
    assert len(json.loads(out.read_text())["ops"]) == 4


def test_kraus_non_cp_exit_3(tmp_path, capsys):
    path = tmp_path / "transpose.json"
    path.write_text(json.dumps(superop_from_map(lambda x: x.T, 2).to_json()))
    code, out = run(["kraus", "--superop", str(path)], tmp_path)
    assert code == 3
    assert not out.exists()
    assert json.loads(capsys.readouterr().err)["is_cp"] is False


def test_compare_tcl_dephasing(tmp_path):
    code, out = run(["compare-tcl", "--kernel", KERNEL, "--channel", '{"kind":"dephasing"}',
                     "--tau-max", "5", "--points", "51"], tmp_path)
    assert code == 0
    header, data = read_csv(out)
    assert header == ["tau", "deviation"]
    assert data[0, 1] == 0
    assert data[:, 1].max() <= 1e-6


def test_compare_tcl_depolarizing_short_time(tmp_path):
    code, out = run(["compare-tcl", "--kernel", KERNEL, "--channel", '{"kind":"depolarizing"}',
                     "--bloch", "0.6,0,0.8", "--tau-max", "1e-3", "--points", "2"], tmp_path)
    _, data = read_csv(out)
    assert data[-1, 1] <= 1e-8


def test_quad_tol_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("EFFENV_QUAD_TOL", "not-a-number")
    code, _ = run(["decay-curve", "--kernel", KERNEL], tmp_path)
    assert code == 2
    monkeypatch.setenv("EFFENV_QUAD_TOL", "1e-8")
    code, _ = run(["decay-curve", "--kernel", KERNEL], tmp_path)
    assert code == 0


def test_trajectory_csv_header():
    k = CorrelationKernel.exponential(1, 1)
    traj = integrate_tcl(gamma_matrix(ChannelSpec("dephasing"), k), bloch_to_density([1, 0, 0]), 1.0, 4)
    text = trajectory_csv(traj)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["tau", "sx", "sy", "sz", "trace_drift"]
    assert len(rows) == 6


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "effenv", "decay-curve", "--kernel", KERNEL,
                           "--points", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "tau,decay"
