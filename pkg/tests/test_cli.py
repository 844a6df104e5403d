import json

from morreylab.cli import main


def run(capsys, *argv):
    code = main(["--points", "256", "--half-width", "4", *argv])
    return code, capsys.readouterr()


def test_norm(capsys):
    code, out = run(capsys, "norm", "(chi -1 1)", "--space", "2,-0.5")
    assert code == 0 and abs(json.loads(out.out)["value"] - 2**0.5) < 0.02


def test_predual(capsys):
    code, out = run(capsys, "predual", "(bump 0 1)", "--space", "2,-0.75", "--atoms")
    d = json.loads(out.out)
    assert code == 0 and d["weak_duality_ok"] and d["atoms"]


def test_apply(capsys, tmp_path):
    code, out = run(capsys, "apply", '{"kind": "maximal"}', "(chi 0 1)", "--at", "2",
                    "--out", str(tmp_path / "m.csv"))
    d = json.loads(out.out)
    assert code == 0 and abs(d["values"]["2.0"] - 0.25) < 0.02
    assert (tmp_path / "m.csv").exists()


def test_bound_ratio(capsys):
    code, out = run(capsys, "bound-ratio", "--op", '{"kind": "hilbert"}', "--space", "2",
                    "--corpus", "(bump 0 1)", "(gauss 0.5)")
    assert code == 0 and json.loads(out.out)["max_ratio"] <= 1.02


def test_check_and_report(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"grid": {"points_per_axis": 256, "half_width": 4.0},
                               "corpus": ["(bump 0 1)"], "operators": [{"kind": "hilbert"}],
                               "checks": ["norm_collapse", "linearity"]}))
    report = tmp_path / "r.json"
    code = main(["check", str(cfg), "--output", str(report)])
    assert code == 0 and "0 failed" in capsys.readouterr().out
    assert main(["report", str(report), "--csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("check,") and len(lines) == 3
    assert main(["report", str(report)]) == 0
    assert "norm_collapse" in capsys.readouterr().out


def test_bad_input_returns_2(capsys):
    code, out = run(capsys, "apply", '{"kind": "nope"}', "(bump 0 1)")
    assert code == 2 and "error" in out.err
