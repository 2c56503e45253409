import json
import subprocess
import sys

import numpy as np
import pytest

from qwshrink.cli import config_hash, main
from qwshrink.figures import FIGURES
from qwshrink.io import csv_to_columns
from qwshrink.policies import ShrinkagePolicy, multiplier_of


def write_cfg(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def test_fig5_hard_csv(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"figure": "fig5_hard", "seed": 0})
    assert main(["run", str(cfg), "--output-dir", str(tmp_path / "out")]) == 0
    cols = csv_to_columns((tmp_path / "out" / "shrink.csv").read_text())
    pol = ShrinkagePolicy("hard_gamma", lam=0.4)
    np.testing.assert_allclose(cols["original"], [0.2, 0.1, 0.9, 0, 0.3, -1.0, 0.2, 0.4])
    np.testing.assert_allclose(cols["shrunk"], multiplier_of(pol, cols["original"]) * cols["original"], atol=1e-12)
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["seed"] == 0
    assert report["config_sha256"] == config_hash({"figure": "fig5_hard", "seed": 0})


def test_malformed_json_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"figure": "fig5_hard",\n  "seed": }')
    assert main(["run", str(p), "--output-dir", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err
    assert not (tmp_path / "o").exists()


@pytest.mark.parametrize("doc,fragment", [
    ({"figure": "fig5_hard", "colour": 1}, "colour"),
    ({"seed": 1}, "'figure'"),
    ({"figure": "fig99"}, "fig99"),
    ({"figure": "fig5_hard", "mode": "magic"}, "magic"),
    ({"figure": "fig5_hard", "seed": -1}, "seed"),
    ({"figure": "fig5_hard", "shots": 0}, "shots"),
    ({"figure": "fig5_hard", "policy": {"kind": "cos4_gamma", "lam": 1}}, "lam"),
    ({"figure": "hw_idle"}, "T2"),
])
def test_config_errors_exit_2(tmp_path, capsys, doc, fragment):
    cfg = write_cfg(tmp_path, doc)
    assert main(["run", str(cfg), "--output-dir", str(tmp_path / "o")]) == 2
    assert fragment in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_missing_output_dir(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"figure": "fig5_hard"})
    assert main(["run", str(cfg)]) == 2
    assert "output_dir" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.json")]) == 2


def test_invariant_violation_exit_1(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"figure": "fig1_dwt", "filter": {"name": "bad", "h": [0.5, 0.5]}})
    assert main(["run", str(cfg), "--output-dir", str(tmp_path / "o")]) == 1
    assert "unit_energy" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_rerun_is_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path, {"figure": "fig9_smooth_ancilla", "seed": 4, "shots": 500})
    for out in ("a", "b"):
        assert main(["run", str(cfg), "--output-dir", str(tmp_path / out)]) == 0
    a = (tmp_path / "a" / "ancilla.csv").read_bytes()
    assert a == (tmp_path / "b" / "ancilla.csv").read_bytes()
    assert b"\r" not in a


def test_overrides_change_hash_and_output(tmp_path):
    cfg = write_cfg(tmp_path, {"figure": "fig9_smooth_ancilla", "seed": 4, "shots": 500})
    main(["run", str(cfg), "--output-dir", str(tmp_path / "a")])
    main(["run", str(cfg), "--output-dir", str(tmp_path / "b"), "--seed", "5", "--shots", "300"])
    ra = json.loads((tmp_path / "a" / "report.json").read_text())
    rb = json.loads((tmp_path / "b" / "report.json").read_text())
    assert rb["seed"] == 5 and rb["config"]["shots"] == 300
    assert ra["config_sha256"] != rb["config_sha256"]


@pytest.mark.parametrize("figure", [f for f in FIGURES if f != "fig3_doppler"])
def test_every_figure_runs(tmp_path, figure):
    doc = {"figure": figure, "seed": 1}
    if figure.startswith("hw_"):
        doc["hardware"] = {"T2": 50.0}
    cfg = write_cfg(tmp_path, doc)
    assert main(["run", str(cfg), "--output-dir", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    for name in report["artifacts"]:
        assert (tmp_path / "o" / name).read_text().endswith("\n")


def test_fig1_routes_agree(tmp_path):
    cfg = write_cfg(tmp_path, {"figure": "fig1_dwt", "filter": "daub4", "signal": "random", "N": 64, "levels": 3})
    assert main(["run", str(cfg), "--output-dir", str(tmp_path / "o")]) == 0
    diffs = json.loads((tmp_path / "o" / "report.json").read_text())["results"]["route_max_abs_diff"]
    assert max(diffs.values()) < 1e-12


def test_fig10_ratio(tmp_path):
    cfg = write_cfg(tmp_path, {"figure": "fig10_phase_encode", "gamma": 0.36})
    assert main(["run", str(cfg), "--output-dir", str(tmp_path / "o")]) == 0
    cols = csv_to_columns((tmp_path / "o" / "coherence.csv").read_text())
    np.testing.assert_allclose(cols["x_after"], 0.8 * cols["x_before"], atol=1e-12)
    np.testing.assert_allclose(cols["y_after"], 0.8 * cols["y_before"], atol=1e-12)


def test_fig4_post_is_retention_times_pre(tmp_path):
    cfg = write_cfg(tmp_path, {"figure": "fig4_diag", "signal": "doppler", "N": 256, "filter": "daub4", "levels": 4})
    assert main(["run", str(cfg), "--output-dir", str(tmp_path / "o")]) == 0
    cols = csv_to_columns((tmp_path / "o" / "diagonal.csv").read_text())
    assert np.all(cols["post"] <= cols["pre"] + 1e-18)
    assert cols["pre"].sum() == pytest.approx(1.0)


def test_verify_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "cptp_certificates" in out


def test_verify_injected_fault(capsys):
    assert main(["verify", "--inject-fault"]) == 1
    cap = capsys.readouterr()
    assert "kraus_completeness" in cap.out
    assert "cptp_certificates" in cap.err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qwshrink", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "verify" in proc.stdout
