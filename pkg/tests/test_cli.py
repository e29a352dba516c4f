import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from vesselrange import ranging
from vesselrange.cli import EXIT_GEOMETRY, EXIT_INPUT, EXIT_OK, EXIT_SELFTEST, main, parse_altitudes
from vesselrange.contours import LabelMask, save_label_mask
from vesselrange.errors import ConfigError


@pytest.fixture
def workdir(tmp_path, harbor_dir):
    for name in ("config.json", "hull.txt", "scene.json", "mask.pgm"):
        shutil.copy(harbor_dir / name, tmp_path / name)
    return tmp_path


def _write_config(path, **changes):
    doc = json.loads(path.read_text())
    for key, value in changes.items():
        if value is None:
            doc.pop(key, None)
        else:
            doc[key] = value
    path.write_text(json.dumps(doc))


def test_estimate_reproduces_golden(workdir, harbor_dir):
    out = workdir / "report.csv"
    annot = workdir / "annot.ppm"
    rc = main(["estimate", "--config", str(workdir / "config.json"), "--mask", str(workdir / "mask.pgm"),
               "--out-report", str(out), "--out-annot", str(annot)])
    assert rc == EXIT_OK
    assert out.read_bytes() == (harbor_dir / "report_golden.csv").read_bytes()
    assert annot.read_bytes() == (harbor_dir / "annotation.ppm").read_bytes()


def test_estimate_all_water(workdir, capsys):
    save_label_mask(workdir / "water.pgm", LabelMask(np.zeros((360, 640), np.uint8)))
    out = workdir / "report.csv"
    rc = main(["estimate", "--config", str(workdir / "config.json"), "--mask", str(workdir / "water.pgm"),
               "--out-report", str(out)])
    assert rc == EXIT_OK
    rows = out.read_text().splitlines()[1:]
    assert len(rows) == 22 and all(r.endswith(",??" * 7) for r in rows)
    assert "vessel-not-found" in capsys.readouterr().err


def test_estimate_truncated_mask(workdir, capsys):
    data = (workdir / "mask.pgm").read_bytes()
    (workdir / "mask.pgm").write_bytes(data[: len(data) // 2])
    rc = main(["estimate", "--config", str(workdir / "config.json"), "--mask", str(workdir / "mask.pgm"),
               "--out-report", str(workdir / "r.csv")])
    assert rc == EXIT_INPUT
    assert "truncated" in capsys.readouterr().err


def test_estimate_hull_out_of_view(workdir):
    _write_config(workdir / "config.json", uav_pose={"x": 900.0, "y": 0.0, "z": 50.0})
    rc = main(["estimate", "--config", str(workdir / "config.json"), "--mask", str(workdir / "mask.pgm"),
               "--out-report", str(workdir / "r.csv")])
    assert rc == EXIT_GEOMETRY


def test_unknown_config_key_is_rejected(workdir, capsys):
    _write_config(workdir / "config.json", colour="blue")
    rc = main(["simulate", "--scene", str(workdir / "scene.json"), "--config", str(workdir / "config.json"),
               "--altitude", "50", "--out-mask", str(workdir / "m.pgm")])
    assert rc == EXIT_INPUT
    assert "config.colour" in capsys.readouterr().err


def test_bad_intrinsics_names_field(workdir, capsys):
    doc = json.loads((workdir / "config.json").read_text())
    doc["intrinsics"]["focal_length"] = -1
    (workdir / "config.json").write_text(json.dumps(doc))
    rc = main(["simulate", "--scene", str(workdir / "scene.json"), "--config", str(workdir / "config.json"),
               "--altitude", "50", "--out-mask", str(workdir / "m.pgm")])
    assert rc == EXIT_INPUT
    assert "config.intrinsics.focal_length" in capsys.readouterr().err


@pytest.mark.parametrize("altitude", ["0", "-10"])
def test_simulate_rejects_bad_altitude(workdir, altitude, capsys):
    rc = main(["simulate", "--scene", str(workdir / "scene.json"), "--config", str(workdir / "config.json"),
               f"--altitude={altitude}", "--out-mask", str(workdir / "m.pgm")])
    assert rc == EXIT_INPUT
    assert "invalid-altitude" in capsys.readouterr().err


def test_simulate_reproduces_bundled_mask(workdir, harbor_dir):
    outs = []
    for k in range(2):
        rc = main(["simulate", "--scene", str(workdir / "scene.json"), "--config", str(workdir / "config.json"),
                   "--altitude", "50", "--out-mask", str(workdir / f"m{k}.pgm"),
                   "--out-truth", str(workdir / f"t{k}.csv")])
        assert rc == EXIT_OK
        outs.append(((workdir / f"m{k}.pgm").read_bytes(), (workdir / f"t{k}.csv").read_bytes()))
    assert outs[0] == outs[1]
    assert outs[0][0] == (harbor_dir / "mask.pgm").read_bytes()
    assert outs[0][1] == (harbor_dir / "truth.csv").read_bytes()


def test_sweep_is_deterministic(workdir):
    texts = []
    for k in range(2):
        out = workdir / f"sweep{k}"
        rc = main(["sweep", "--config", str(workdir / "config.json"), "--samples", "1", "--seed", "5",
                   "--noise", "0.02", "--out-dir", str(out)])
        assert rc == EXIT_OK
        texts.append(((out / "records.csv").read_bytes(), (out / "summary.csv").read_bytes()))
    assert texts[0] == texts[1]
    summary = texts[0][1].decode().splitlines()
    assert len(summary) == 1 + 13
    assert [row.split(",")[0] for row in summary[1:]] == [str(a) for a in range(30, 151, 10)]


def test_sweep_rejects_bad_arguments(workdir):
    base = ["sweep", "--config", str(workdir / "config.json"), "--out-dir", str(workdir / "s")]
    assert main(base + ["--samples", "0"]) == EXIT_INPUT
    assert main(base + ["--noise", "0.6"]) == EXIT_INPUT
    assert main(base + ["--altitudes", "50:10:10"]) == EXIT_INPUT


def test_parse_altitudes():
    assert parse_altitudes("30:150:10") == [float(a) for a in range(30, 151, 10)]
    assert parse_altitudes("30,45.5") == [30.0, 45.5]
    with pytest.raises(ConfigError):
        parse_altitudes("a,b")


def test_selftest_passes(capsys):
    assert main(["selftest"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("PASS") == 4


def test_selftest_detects_wrong_gsd_reduction(monkeypatch, capsys):
    monkeypatch.setattr(ranging, "_GSD_REDUCE", min)
    assert main(["selftest"]) == EXIT_SELFTEST
    assert "gsd" in capsys.readouterr().out


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "vesselrange", "selftest"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
