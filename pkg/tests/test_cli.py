import json

import pytest

from scenery import cli


def write_config(tmp_path, **overrides):
    cfg = {
        "dimension": 3,
        "mode": "nondegenerate",
        "potential": {"family": "poisson",
                      "shape": {"kind": "tent", "dim": 3, "scale": 1.0,
                                "atoms": [{"weight": 1.0,
                                           "center": [0, 0, 0]}]}},
        "n_ladder": [64, 128],
        "replicas": 4,
        "master_seed": 321,
        "suites": ["cross_term", "moment_scaling"],
        "windows": [[0.0, 0.375], [0.625, 1.0]],
        "out_dir": str(tmp_path / "run"),
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def test_sigma_prints_both_routes_for_d3(tmp_path, capsys):
    path = write_config(tmp_path)
    assert cli.main(["sigma", "--config", str(path)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "d,mode,sigma,sigma_squared"
    assert out[1].startswith("3,nondegenerate,")
    assert "spectral route" in out[2]


def test_simulate_then_report_roundtrip(tmp_path, capsys):
    path = write_config(tmp_path)
    out_dir = tmp_path / "artifacts"
    code = cli.main(["simulate", "--config", str(path),
                     "--out", str(out_dir)])
    printed = capsys.readouterr().out
    assert "wrote artifacts" in printed
    assert (out_dir / "summary.md").exists()
    assert (out_dir / "reports.json").exists()

    report_code = cli.main(["report", "--in", str(out_dir)])
    summary = capsys.readouterr().out
    assert report_code == code
    assert "Suite verdicts" in summary


def test_test_command_judges_selected_suites(tmp_path, capsys):
    path = write_config(tmp_path)
    code = cli.main(["test", "--config", str(path),
                     "--suite", "moment_scaling"])
    out = capsys.readouterr().out
    assert "moment_scaling_test" in out
    assert "cross_term_test" not in out
    assert code in (0, 1)

    assert cli.main(["test", "--config", str(path),
                     "--suite", "variance"]) == 2
    assert "not in the config" in capsys.readouterr().err


def test_report_on_missing_directory_fails(tmp_path, capsys):
    assert cli.main(["report", "--in", str(tmp_path / "nope")]) == 2
    assert "error:" in capsys.readouterr().err


def test_config_without_out_dir_fails_test_command(tmp_path, capsys):
    path = write_config(tmp_path)
    cfg = json.loads(path.read_text())
    del cfg["out_dir"]
    path.write_text(json.dumps(cfg))
    assert cli.main(["test", "--config", str(path),
                     "--suite", "moment_scaling"]) == 2
    assert "output directory" in capsys.readouterr().err
