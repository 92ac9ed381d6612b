import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from nonlocality.cli import default_g_grid, main


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_fig2_single_row(capsys):
    code, out, _ = _run(["fig2", "--j", "1/2", "--n", "2", "--t-mode", "ent"], capsys)
    assert code == 0
    rows = _csv(out)
    assert len(rows) == 1
    assert rows[0]["N"] == "2" and rows[0]["T"] == "2" and rows[0]["mode"] == "ent"
    assert float(rows[0]["ratio"]) == pytest.approx(4.0, rel=1e-9)
    assert set(rows[0]) >= {"lhs", "rhs", "r0", "r1"}


def test_fig2_all_modes_spin_one(capsys):
    code, out, _ = _run(["fig2", "--n", "4"], capsys)
    assert code == 0
    rows = _csv(out)
    assert [r["mode"] for r in rows] == ["bell"] * 3 + ["steer"] * 3 + ["ent"] * 3
    assert "r2" in rows[0]


def test_fig4_json(tmp_path, capsys):
    path = tmp_path / "fig4.json"
    code, out, _ = _run(["fig4", "--n", "40", "--grid", "6", "--format", "json", "--out", str(path)], capsys)
    assert code == 0 and out == ""
    payload = json.loads(path.read_text())
    assert payload["meta"]["command"] == "fig4"
    rows = payload["rows"]
    assert len(rows) == 6
    assert rows[0]["Ng_over_kappa"] == 0 and rows[0]["xi"] == pytest.approx(1.0, abs=1e-9)
    xis = [r["xi"] for r in rows]
    assert all(a > b for a, b in zip(xis, xis[1:]))


def test_fig6_columns(capsys):
    code, out, _ = _run(["fig6", "--n-list", "10", "20", "--grid", "4"], capsys)
    assert code == 0
    rows = _csv(out)
    assert list(rows[0]) == ["N", "Ng_over_kappa", "mean_x_over_J", "var_z_over_J", "n0"]
    assert len(rows) == 8
    assert rows[0]["n0"] == "1"
    assert all(int(r["n0"]) == int(r["N"]) for r in rows if float(r["Ng_over_kappa"]) > 0)


def test_bounds_table_and_curves(tmp_path, capsys):
    curves = tmp_path / "curves.csv"
    code, out, _ = _run(["bounds", "--j", "3/2", "--samples", "21", "--curves-out", str(curves)], capsys)
    assert code == 0
    rows = _csv(out)
    assert [(r["j"], r["convention"]) for r in rows] == [
        ("1/2", "standard"), ("1/2", "pauli"), ("1", "standard"), ("3/2", "standard")]
    assert float(rows[0]["C_J"]) == pytest.approx(0.25, abs=1e-9)
    assert float(rows[1]["C_J"]) == pytest.approx(1.0, abs=1e-9)
    assert float(rows[2]["C_J"]) == pytest.approx(7 / 16, abs=1e-7)
    crow = _csv(curves.read_text())
    assert len(crow) == 21
    for r in crow:
        x = float(r["x"])
        assert float(r["F_1/2"]) == pytest.approx(x * x / 2, abs=1e-9)
        assert float(r["F_1"]) <= float(r["F_1/2"]) + 1e-12
        assert float(r["F_3/2"]) <= float(r["F_1"]) + 1e-12


def test_mabk_command(capsys):
    code, out, _ = _run(["mabk", "--n", "3", "--form", "single", "--format", "json"], capsys)
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["ratio"] == pytest.approx(2.0, rel=1e-9)
    assert row["verdict"] == "BellNonlocality"
    code, out, _ = _run(["mabk", "--n", "3", "--genuine", "svetlichny_sum", "--format", "json"], capsys)
    assert json.loads(out)["rows"][0]["ratio"] == pytest.approx(math.sqrt(2), rel=1e-9)


def test_cfrd_command(capsys):
    code, out, _ = _run(["cfrd", "--n", "2", "--j", "1/2", "--r", "1", "1", "--t", "0"], capsys)
    assert code == 0
    assert float(_csv(out)[0]["ratio"]) == pytest.approx(1.0, rel=1e-12)


def test_deterministic_output(capsys):
    argv = ["fig2", "--n", "3", "--seed", "5", "--format", "json"]
    _, first, _ = _run(argv, capsys)
    _, second, _ = _run(argv, capsys)
    assert first == second


@pytest.mark.parametrize("argv", [
    ["fig2", "--j", "3/2"],
    ["fig2", "--n", "21"],
    ["fig2", "--j", "abc"],
    ["mabk", "--n", "4", "--form", "single"],
    ["cfrd", "--n", "2", "--r", "1", "1"],
    ["verify", "--n", "9"],
    ["nonsense"],
])
def test_usage_errors_exit_one(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_verify_passes_and_fails(capsys):
    code, out, _ = _run(["verify", "--n", "2"], capsys)
    assert code == 0
    rows = json.loads(out)["rows"]
    assert any(r["inequality_id"] == "chsh" for r in rows)
    assert all(r["agrees"] for r in rows)
    code, _, err = _run(["verify", "--n", "2", "--inject-error"], capsys)
    assert code == 2 and "verification failed" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nonlocality", "verify", "--n", "3", "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("inequality_id,n,t,oracle_max,analytic_bound,agrees")


def test_default_g_grid():
    g = default_g_grid(200, 5)
    assert g[0] == 0 and g[-1] == pytest.approx(200) and g[1] == pytest.approx(0.1)
    assert np.all(np.diff(g) > 0)
    assert default_g_grid(200, 1).tolist() == [0.0]
