import json
from dataclasses import replace

import pytest

from varjump.cli import main
from varjump.config import defaults_for
from varjump.experiments import ExperimentReport, Verdict, run_experiment
from varjump.report import csv_text, emit_report, svg_text


def _small(name, **kw):
    return replace(defaults_for(name), **kw)


def test_empty_report_is_header_only(tmp_path):
    rep = ExperimentReport("jump-sweep", {"seed": 0}, ("a", "b"), [], [], {"cases": 0})
    assert csv_text(rep) == "a,b\n"
    paths = emit_report(rep, tmp_path, ("csv", "json"))
    names = sorted(p.name for p in paths)
    assert names == ["jump-sweep.csv", "jump-sweep.rows.json", "jump-sweep.summary.json", "jump-sweep.timings.json"]
    s = json.loads((tmp_path / "jump-sweep.summary.json").read_text())
    assert s["summary"]["cases"] == 0 and s["passed"] is True


def test_summary_records_verdict_margin(tmp_path):
    rep = ExperimentReport("cz-check", {}, ("x",), [(1.5,)], [Verdict("v", False, 2.0, 1.0, 10)], {})
    emit_report(rep, tmp_path, ("csv",))
    s = json.loads((tmp_path / "cz-check.summary.json").read_text())
    assert s["passed"] is False and s["verdicts"][0]["margin"] == -1.0 and s["verdicts"][0]["criterion"] == 10


def test_unknown_format_rejected(tmp_path):
    rep = ExperimentReport("cz-check", {}, ("x",), [], [], {})
    with pytest.raises(ValueError):
        emit_report(rep, tmp_path, ("xml",))


def test_unwritable_out_dir(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    rep = ExperimentReport("cz-check", {}, ("x",), [], [], {})
    with pytest.raises(OSError, match="cannot write report"):
        emit_report(rep, blocker / "sub", ("csv",))


def test_svg_polylines():
    text = svg_text("t", [("data", [(1, 1), (10, 0.1)]), ("envelope", [(1, 2), (10, 0.2)])])
    assert text.count("<polyline") == 2 and 'data-label="envelope"' in text
    with pytest.raises(ValueError):
        svg_text("t", [("data", [(0, 1)])])


def test_decay_report_has_envelope_plot(tmp_path):
    rep = run_experiment(defaults_for("decay-fit"))
    paths = emit_report(rep, tmp_path, ("svg",))
    svgs = [p for p in paths if p.suffix == ".svg"]
    assert svgs
    texts = [p.read_text() for p in svgs]
    assert any('data-label="|nu_hat|"' in t and "envelope" in t for t in texts)


def test_reports_are_byte_identical(tmp_path):
    cfg = _small("jump-sweep", trials=20)
    a, b = tmp_path / "a", tmp_path / "b"
    emit_report(run_experiment(cfg), a, ("csv", "json"))
    emit_report(run_experiment(cfg), b, ("csv", "json"))
    for name in ("jump-sweep.csv", "jump-sweep.rows.json", "jump-sweep.summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_seed_changes_rows():
    cfg = _small("jump-sweep", trials=20)
    assert run_experiment(cfg).rows != run_experiment(cfg, seed=1).rows


def test_cli_pass(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[experiment]\nname = jump-sweep\ntrials = 10\n")
    assert main(["jump-sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    out = capsys.readouterr().out
    assert "PASS [2]" in out and out.rstrip().endswith("PASS")
    assert (tmp_path / "o" / "jump-sweep.csv").exists()


def test_cli_negative_control_fails(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    # the comparison ratio routinely exceeds 1/2, so this bound must fail
    cfg.write_text("[experiment]\nname = jsw-compare\ntrials = 200\n[params]\nbound = 0.5\n")
    assert main(["jsw-compare", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_cli_config_errors(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[experiment]\nname = cz-check\n[grid]\nN = 100\n")
    assert main(["cz-check", "--config", str(cfg)]) == 2
    assert "line 4" in capsys.readouterr().err
    assert main(["cz-check", "--config", str(tmp_path / "missing.ini")]) == 2
    assert main(["jump-sweep", "--config", str(cfg)]) == 2
    assert main(["cz-check", "--format", "xml"]) == 2


def test_cli_list(capsys):
    assert main(["list"]) == 0
    assert "vdc-check" in capsys.readouterr().out


def test_martingale_check_passes():
    rep = run_experiment(defaults_for("martingale-check"))
    assert rep.passed, [(v.name, v.measured, v.bound) for v in rep.verdicts if not v.passed]
    assert rep.summary["cases"] > 0
