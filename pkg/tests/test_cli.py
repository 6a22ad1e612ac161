import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from curved_dirac import cli, figures


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, [list(map(float, r)) for r in reader]


def test_parse_list():
    assert cli.parse_list("-4:4:5") == [-4.0, -2.0, 0.0, 2.0, 4.0]
    assert cli.parse_list("0.5, 0.8,1") == [0.5, 0.8, 1.0]
    for bad in ("1:2", "1:2:0", "a,b"):
        with pytest.raises(Exception):
            cli.parse_list(bad)


def test_glue_negative_values():
    assert cli.glue_negative_values(["fig1a", "--eps", "-4:4:401", "--m", "1"]) == \
        ["fig1a", "--eps=-4:4:401", "--m", "1"]


def test_fig1a_bounds(capsys):
    code, out, _ = run(capsys, "fig1a", "--eta", "0.15,0.4,0.8,1.5", "--m", "1", "--eps", "-4:4:401")
    assert code == 0
    header, rows = rows_of(out)
    assert header == ["eta", "epsilon", "omega"]
    data = np.array(rows)
    assert sorted(set(data[:, 0])) == [0.15, 0.4, 0.8, 1.5]
    assert len(data) == 4 * 401
    eta, om = data[:, 0], data[:, 2]
    assert np.all(om >= eta) and np.all(om <= np.sqrt(1 + eta**2))


def test_fig1b_column(capsys):
    code, out, _ = run(capsys, "fig1b", "--eta", "0.4", "--eps", "0,1,2")
    header, rows = rows_of(out)
    assert code == 0 and header[-1] == "abs_wavenumber"
    assert rows[0][2] == 0.0


def test_fig2_edges_and_determinism(capsys, tmp_path):
    argv = ["fig2", "--R", "0.2", "--theta", "0.3", "--xi", "0.5", "--tau", "1.0", "--A", "1.2", "--B", "0.8",
            "--eps", "0.5,0.8,1.0,1.2", "--grid", "65"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header, rows = rows_of(a.read_text())
    assert header == ["epsilon", "x_over_X", "density"]
    data = np.array(rows)
    assert len(data) == 4 * 65
    edges = np.abs(data[:, 1]) == 1
    assert np.all(data[edges, 2] == 0) and np.all(data[:, 2] >= 0)


def test_fig3_normalize_peak(capsys):
    code, out, _ = run(capsys, "fig3", "--eps", "0.8", "--grid", "33", "--normalize-peak")
    _, rows = rows_of(out)
    assert code == 0 and max(r[2] for r in rows) == 1.0


def test_csv_format():
    text = figures.csv_text(("a", "b"), [(0.1, 1)])
    assert text == "a,b\r\n0.10000000000000001,1\r\n"


def test_config_file_overrides_flags(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"eta": [0.4], "eps": "-1:1:3"}))
    code, out, _ = run(capsys, "fig1a", "--eta", "0.15", "--config", str(cfg))
    _, rows = rows_of(out)
    assert code == 0 and [r[0] for r in rows] == [0.4] * 3


@pytest.mark.parametrize("doc", [{"bogus": 1}, [1, 2], "not json"])
def test_config_errors_exit_2(capsys, tmp_path, doc):
    cfg = tmp_path / "c.json"
    cfg.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    code, _, err = run(capsys, "fig1a", "--config", str(cfg))
    assert code == 2 and "configuration error" in err


def test_missing_config_exit_2(capsys, tmp_path):
    code, _, _ = run(capsys, "fig2", "--config", str(tmp_path / "nope.json"))
    assert code == 2


def test_invalid_physics_exit_2(capsys):
    assert run(capsys, "fig2", "--theta", "0")[0] == 2
    assert run(capsys, "solve-interacting", "--S0", "0.3", "--W0", "0.0")[0] == 2


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["fig1a", "--nope"])
    assert info.value.code == 2


def test_numerical_error_exit_3(capsys):
    # a background whose g00 never vanishes inside the scan window
    code, _, err = run(capsys, "profile", "--family", "InverseSquareCritical",
                       "--params", '{"a0": 1, "a1": 0.5, "b0": 0, "b1": 0}', "--no-strict")
    assert code == 3 and "numerical error" in err


def test_solve_free(capsys):
    for fam in ("linear", "hyperbolic", "trig"):
        code, out, _ = run(capsys, "solve-free", "--family", fam, "--grid", "9", "--form", "exact",
                           "--amplitude-power", "1")
        header, rows = rows_of(out)
        assert code == 0 and len(rows) == 9 and header[0] == "x"
        assert all(r[-1] >= 0 for r in rows)


def test_solve_interacting(capsys):
    for branch, sub in (("1", "positive"), ("-1", "negative")):
        code, out, _ = run(capsys, "solve-interacting", "--branch", branch, "--subspace", sub, "--grid", "8")
        header, rows = rows_of(out)
        assert code == 0 and header[:2] == ["x", "z"]
        assert all(0 < r[1] <= 1 for r in rows)


def test_solve_interacting_potential_file(capsys, tmp_path):
    eta = 0.3 * math.sqrt(0.2)
    pot = tmp_path / "p.json"
    pot.write_text(json.dumps({"S0": eta / 4, "W0": eta / 4, "A1_spec": [0.1]}))
    code, out, _ = run(capsys, "solve-interacting", "--potential", str(pot), "--grid", "4")
    assert code == 0 and len(rows_of(out)[1]) == 4
    pot.write_text(json.dumps({"S0": 0.1, "V0": 1}))
    assert run(capsys, "solve-interacting", "--potential", str(pot))[0] == 2


def test_profile_json(capsys, tmp_path):
    out = tmp_path / "p.json"
    code = cli.main(["profile", "--family", "HyperbolicConst", "--params",
                     '{"zeta": 0.7, "vartheta": 0.3, "a0": 0.5}', "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["family"] == "HyperbolicConst"
    assert doc["domain"][1] == pytest.approx(3.4310882318652957698, rel=1e-14)
    assert run(capsys, "profile", "--params", "{bad")[0] == 2
    assert run(capsys, "profile", "--params", '{"nope": 1}')[0] == 2


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--only", "1,5,10")
    assert code == 0
    assert "3/3 criteria passed" in out
    assert out.count("PASS  criterion") == 3
    assert run(capsys, "verify", "--only", "99")[0] == 2


def test_verify_reports_failure(capsys, monkeypatch):
    from curved_dirac import checks

    bad = lambda: [checks.CheckResult(1, "forced", 1.0, 0.0, False)]
    monkeypatch.setitem(checks.CHECKS, 1, ("forced failure", bad))
    code, out, _ = run(capsys, "verify", "--only", "1")
    assert code == 1 and "FAIL" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "curved_dirac", "fig1b", "--eta", "0.4", "--eps", "-1:1:3"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.startswith("eta,epsilon,abs_wavenumber")
