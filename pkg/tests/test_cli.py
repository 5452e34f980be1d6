import csv
import io
import json
import subprocess
import sys

import pytest

from shadowwave import cli
from shadowwave.errors import ConvergenceError


def scenario(tmp_path, name="s.json", **fields):
    base = {"model": {"kind": "pressureless"}, "left": {"rho": 1.0, "u": 1.0}, "right": {"rho": 1.0, "u": -1.0}}
    base.update(fields)
    p = tmp_path / name
    p.write_text(json.dumps(base, indent=2), encoding="utf-8")
    return str(p)


def call(*argv):
    return cli.main([str(a) for a in argv])


def out_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_riemann_symmetric_pressureless(tmp_path, capsys):
    assert call("riemann", "--scenario", scenario(tmp_path)) == 0
    res = out_json(capsys)
    (fan,) = res["fans"]
    (w,) = fan["waves"]
    assert w["type"] == "delta_shock" and w["speed"] == 0.0 and res["selected"] == 0


def test_riemann_generalized_overlap_lists_both_fans(tmp_path, capsys):
    p = scenario(
        tmp_path, model={"kind": "generalized_chaplygin", "alpha": 0.5},
        left={"rho": 0.25, "u": 0.75}, right={"rho": 2.0, "u": -2.5},
    )
    assert call("riemann", "--scenario", p) == 0
    res = out_json(capsys)
    labels = [f["label"] for f in res["fans"]]
    assert sorted(labels) == ["S1S2", "shadow"]
    best = min(range(2), key=lambda i: res["fans"][i]["D_total"])
    assert res["selected"] == best


def test_outputs_are_byte_identical(tmp_path):
    p = scenario(tmp_path, delta={"xi_delta": 1.0}, model={"kind": "chaplygin"})
    for cmd in ("riemann", "select", "track"):
        a, b = tmp_path / f"{cmd}a.json", tmp_path / f"{cmd}b.json"
        assert call(cmd, "--scenario", p, "--out", a) == 0
        assert call(cmd, "--scenario", p, "--out", b) == 0
        assert a.read_bytes() == b.read_bytes()


def test_floats_use_seventeen_digits():
    assert cli.dumps(0.1) == "0.10000000000000001"
    assert cli.dumps(-0.0) == "0"
    assert cli.dumps({"a": [1, 2.5]}) == '{\n  "a": [\n    1,\n    2.5\n  ]\n}'


@pytest.mark.parametrize(
    "text, line, needle",
    [
        ('{\n  "model": {"kind": "pressureless"},\n  "bogus": 1,\n  "left": {"rho": 1, "u": 0},\n'
         '  "right": {"rho": 1, "u": 0}\n}', 3, "unknown field 'bogus'"),
        ('{\n  "model": {"kind": "pressureless"},\n  "left": {"rho": 1, "u": 0},\n'
         '  "right": {"rho": -1, "u": 0}\n}', 4, "right"),
        ('{\n  "model": {"kind": "pressureless"},\n  "left": {"rho": 1, "u": 0},\n'
         '  "right": {"rho": 1, "u": NaN}\n}', 1, "non-finite"),
        ('{\n  "model": {"kind": "pressureless"},\n  "left": {"rho": 1, "u": 0},\n'
         '  "left": {"rho": 1, "u": 0}\n}', 1, "duplicate"),
        ('{\n  "model": {"kind": "pressureless"},\n  "left": {"rho": 1, "u": 0}\n  "right": 3\n}', 4, "Expecting"),
        ('{\n  "model": {"kind": "generalized_chaplygin", "alpha": 1.5},\n  "left": {"rho": 1, "u": 0},\n'
         '  "right": {"rho": 1, "u": 0}\n}', 2, "alpha"),
    ],
)
def test_validation_errors_exit_2_with_line(tmp_path, capsys, text, line, needle):
    p = tmp_path / "bad.json"
    p.write_text(text, encoding="utf-8")
    assert call("riemann", "--scenario", p) == 2
    err = capsys.readouterr().err
    assert f"bad.json:{line}:" in err and needle in err


def test_missing_delta_block_is_validation_error(tmp_path, capsys):
    assert call("select", "--scenario", scenario(tmp_path)) == 2
    assert "delta" in capsys.readouterr().err


def test_numerical_failure_exit_3(tmp_path, capsys, monkeypatch):
    def boom(*a, **k):
        raise ConvergenceError("no bracket")

    monkeypatch.setattr(cli, "solve", boom)
    assert call("riemann", "--scenario", scenario(tmp_path)) == 3
    assert "ConvergenceError" in capsys.readouterr().err


def test_generalized_tracking_exit_4(tmp_path, capsys):
    p = scenario(tmp_path, model={"kind": "generalized_chaplygin", "alpha": 0.5}, delta={"xi_delta": 1.0, "u_delta": 0})
    assert call("track", "--scenario", p) == 4
    assert "unsupported" in capsys.readouterr().err


def test_select_pressureless_closed_form(tmp_path, capsys):
    p = scenario(tmp_path, left={"rho": 1.0, "u": 2.0}, right={"rho": 4.0, "u": -1.0}, delta={"xi_delta": 1.0})
    assert call("select", "--scenario", p) == 0
    res = out_json(capsys)
    assert res["u_delta_star"] == pytest.approx((2.0 * 1 - 1.0 * 2) / 3, abs=1e-15)
    assert res["D_at_star"] == pytest.approx(-0.5 * 4 * 27 / 9)


def test_select_profile_csv(tmp_path, capsys):
    p = scenario(tmp_path, delta={"xi_delta": 1.0}, grid={"lo": -2.0, "hi": 2.0, "n": 5})
    prof = tmp_path / "prof.csv"
    assert call("select", "--scenario", p, "--profile", prof) == 0
    raw = prof.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    rows = list(csv.DictReader(io.StringIO(raw.decode())))
    assert [float(r["u_delta"]) for r in rows] == [-2.0, -1.0, 0.0, 1.0, 2.0]
    assert rows[2]["structure"] == "B2" and float(rows[2]["D"]) < 0


def test_select_symmetric_generalized_is_zero(tmp_path, capsys):
    p = scenario(tmp_path, model={"kind": "generalized_chaplygin", "alpha": 0.5}, delta={"xi_delta": 1.0})
    assert call("select", "--scenario", p) == 0
    out = capsys.readouterr().out
    assert json.loads(out)["u_delta_star"] == 0.0
    assert '"u_delta_star": 0,' in out


def test_track_examples(tmp_path, capsys):
    b2 = scenario(tmp_path, "b2.json", delta={"xi_delta": 1.0, "u_delta": 0.0}, mu=1e-3)
    assert call("track", "--scenario", b2) == 0
    res = out_json(capsys)
    assert [e["kind"] for e in res["events"]] == ["merge"]
    assert res["limit"]["label"] == "single-delta-shock" and res["mass_drift"] <= 1e-8

    a2 = scenario(tmp_path, "a2.json", left={"rho": 1.0, "u": -1.0}, right={"rho": 2.0, "u": 1.0},
                  delta={"xi_delta": 1.0, "u_delta": 0.2}, mu=1e-4)
    assert call("track", "--scenario", a2) == 0
    assert out_json(capsys)["events"] == []

    t0 = scenario(tmp_path, "t0.json", delta={"xi_delta": 1.0, "u_delta": 0.0}, t_end=0.0)
    assert call("track", "--scenario", t0) == 0
    assert out_json(capsys)["events"] == []


def test_track_selects_u_delta_and_writes_profile(tmp_path, capsys):
    p = scenario(tmp_path, delta={"xi_delta": 1.0}, mu=1e-3, times=[0.5, 1.0], grid={"lo": -1, "hi": 1, "n": 21})
    prof = tmp_path / "track.csv"
    assert call("track", "--scenario", p, "--profile", prof) == 0
    assert out_json(capsys)["u_delta"] == 0.0
    rows = list(csv.DictReader(io.StringIO(prof.read_text())))
    assert len(rows) == 42
    assert sum(float(r["singular_mass"]) for r in rows if r["t"] == "1") == pytest.approx(1.0 + 2.0, rel=1e-2)


def test_mu_override(tmp_path, capsys):
    p = scenario(tmp_path, delta={"xi_delta": 1.0, "u_delta": 0.0})
    assert call("track", "--scenario", p, "--mu", "0.01") == 0
    assert out_json(capsys)["mu"] == 0.01
    assert call("track", "--scenario", p, "--mu", "-1") == 2


def test_verify_reports_order(tmp_path, capsys):
    assert call("verify", "--scenario", scenario(tmp_path)) == 0
    (rep,) = out_json(capsys)["reports"]
    assert rep["order"] == pytest.approx(1.0, abs=0.2)


def sweep(tmp_path, body):
    p = tmp_path / "sweep.json"
    p.write_text(json.dumps(body), encoding="utf-8")
    return str(p)


def test_one_point_sweep_matches_select(tmp_path, capsys):
    pt = {"left": {"rho": 1.0, "u": 2.0}, "right": {"rho": 4.0, "u": -1.0}, "xi_delta": 1.0}
    assert call("sweep", "--scenario", sweep(tmp_path, {"table": "select", "points": [pt]})) == 0
    (row,) = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    p = scenario(tmp_path, left=pt["left"], right=pt["right"], delta={"xi_delta": 1.0})
    assert call("select", "--scenario", p) == 0
    res = out_json(capsys)
    assert float(row["u_delta_star"]) == res["u_delta_star"]
    assert float(row["D_at_star"]) == res["D_at_star"] and row["case"] == res["case_label"]


def test_random_sweep_depends_only_on_seed(tmp_path, capsys):
    p = sweep(tmp_path, {"table": "select", "samples": 5})
    outs = []
    for seed in (3, 3, 4):
        assert call("sweep", "--scenario", p, "--seed", seed) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1] != outs[2]
    assert len(outs[0].strip().split("\n")) == 6


def test_overlap_and_mu_scaling_sweeps(tmp_path, capsys):
    assert call("sweep", "--scenario", sweep(tmp_path, {"table": "overlap", "alphas": [0.5], "samples": 5})) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 5 and all(float(r["D_sdw_minus_D_cl"]) > 0 for r in rows)
    body = {
        "table": "mu_scaling",
        "datum": {"left": {"rho": 1, "u": 1}, "right": {"rho": 1, "u": -1}, "xi_delta": 1, "u_delta": 0},
        "mus": [1e-4, 1e-6],
    }
    assert call("sweep", "--scenario", sweep(tmp_path, body)) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    t = [float(r["T_first"]) for r in rows]
    assert t[0] / t[1] == pytest.approx(10.0, rel=0.02)


def test_unknown_sweep_table(tmp_path, capsys):
    assert call("sweep", "--scenario", sweep(tmp_path, {"table": "nope"})) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "shadowwave", "riemann", "--scenario", scenario(tmp_path)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["selected"] == 0

