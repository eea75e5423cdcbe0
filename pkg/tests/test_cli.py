import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from stationary import wdf
from stationary.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("wdf")
    out = {}
    for key, argv in {
        "meeks": ["meeks", "--lambda", "0", "1", "--m", "1"],
        "meeks2": ["meeks", "--m", "2"],
        "eps01": ["epsilon", "--eps", "0.1"],
        "eps001": ["epsilon", "--eps", "0.01"],
        "section4": ["section4"],
        "essential": ["essential", "--p", "2"],
    }.items():
        path = d / f"{key}.wdf"
        assert main(["catalog", *argv, "-o", str(path)]) == EXIT_OK
        out[key] = path
    return out


# -- catalog ----------------------------------------------------------------


def test_catalog_meeks_matches_builder(files):
    from stationary.weierstrass import catalog

    d = wdf.load(files["meeks"])
    ref = catalog("meeks")
    assert d.phi.allclose(ref.phi) and d.h.allclose(ref.h)


def test_catalog_epsilon_a0(files):
    doc = json.loads(files["eps01"].read_text())
    den = doc["phi"]["den"]
    assert abs(den[0][0] / den[-1][0] - math.sqrt(0.21)) < 1e-15


def test_catalog_to_stdout(capsys):
    assert main(["catalog", "section4"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["metadata"].startswith("section4_candidate")


@pytest.mark.parametrize(
    "argv",
    [
        ["catalog", "meeks", "--eps", "0.1"],
        ["catalog", "meeks", "--lambda", "1", "0"],
        ["catalog", "epsilon", "--eps", "-1"],
        ["catalog", "nowhere"],
        ["validate", "/nonexistent/file.wdf"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE


def test_bad_version(tmp_path, files):
    doc = json.loads(files["meeks"].read_text())
    doc["version"] = 2
    p = tmp_path / "v2.wdf"
    p.write_text(json.dumps(doc))
    assert main(["validate", str(p)]) == EXIT_USAGE


# -- validate ---------------------------------------------------------------


def test_validate_meeks(files, capsys):
    assert main(["validate", str(files["meeks"]), "--grid", "256"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "quotient (non-orientable): 6π" in out
    assert "verdict: pass" in out


def test_validate_section4(files, capsys):
    assert main(["validate", str(files["section4"]), "--grid", "256"]) == EXIT_FAIL
    assert "singular point found at z =" in capsys.readouterr().out


def test_validate_m2_fixture(capsys):
    assert main(["validate", str(FIXTURES / "m2.wdf"), "--skip-scan"]) == EXIT_FAIL
    out = capsys.readouterr().out
    assert "vertical period condition" in out
    assert "Re∮φψdh = -6.28318530718" in out


def test_validate_essential(files):
    assert main(["validate", str(files["essential"]), "--grid", "128"]) == EXIT_OK


def test_validate_json(files, capsys):
    assert main(["--json", "validate", str(files["eps01"]), "--grid", "128"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] is True


def test_global_flags_after_verb(files, capsys):
    assert main(["validate", str(files["eps01"]), "--grid", "128", "--quiet"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == ""


# -- curvature --------------------------------------------------------------


def test_curvature_essential_quad(files, capsys):
    assert main(["curvature", str(files["essential"]), "--method", "quad"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "total curvature of the quotient: 6π" in out


def test_curvature_meeks2_index(files, capsys):
    assert main(["curvature", str(files["meeks2"]), "--method", "index"]) == EXIT_OK
    assert "quotient (non-orientable): 10π" in capsys.readouterr().out


def test_curvature_both_agreement(files, capsys):
    assert main(["curvature", str(files["eps01"]), "--method", "both"]) == EXIT_OK
    assert "agreement: yes" in capsys.readouterr().out


def test_curvature_index_on_callables(files, capsys):
    assert main(["curvature", str(files["essential"]), "--method", "index"]) == EXIT_USAGE
    assert "quad" in capsys.readouterr().err


# -- scan -------------------------------------------------------------------


def test_scan_eps001_empty(files, capsys):
    assert main(["scan", str(files["eps001"]), "--grid", "256"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "z_re,z_im,residual,m,n,kind"


def test_scan_meeks_empty(files, capsys):
    assert main(["scan", str(files["meeks"]), "--grid", "256"]) == EXIT_OK
    assert capsys.readouterr().out.strip().count("\n") == 0


def test_scan_section4(files, tmp_path):
    out = tmp_path / "s.csv"
    assert main(["scan", str(files["section4"]), "--grid", "256", "-o", str(out)]) == EXIT_OK
    rows = out.read_text().strip().splitlines()[1:]
    assert len(rows) >= 2
    assert len(rows) % 2 == 0  # antipodal pairs


# -- mesh -------------------------------------------------------------------


def test_mesh_meeks(files, tmp_path):
    obj = tmp_path / "m.obj"
    argv = ["mesh", str(files["meeks"]), str(obj), "--r-min", "0.5", "--r-max", "2",
            "--n-r", "64", "--n-theta", "128", "--grid", "128"]
    assert main(argv) == EXIT_OK
    verts = [l for l in obj.read_text().splitlines() if l.startswith("v ")]
    assert len(verts) == 8192


def test_mesh_section4_refused(files, tmp_path, capsys):
    obj = tmp_path / "s.obj"
    assert main(["mesh", str(files["section4"]), str(obj), "--grid", "128"]) == EXIT_FAIL
    assert "singular point" in capsys.readouterr().err
    assert not obj.exists()


def test_mesh_epsilon_csv(files, tmp_path):
    obj = tmp_path / "e.obj"
    argv = ["mesh", str(files["eps01"]), str(obj), "--n-r", "8", "--n-theta", "16",
            "--project", "stereographic_x4", "--grid", "128"]
    assert main(argv) == EXIT_OK
    lines = obj.with_suffix(".csv").read_text().strip().splitlines()
    assert len(lines[0].split(",")) == 7
    assert len(lines) == 1 + 8 * 16


# -- process-level ----------------------------------------------------------


def test_module_entry_point(files):
    r = subprocess.run(
        [sys.executable, "-m", "stationary", "scan", str(files["meeks"]), "--grid", "64"],
        capture_output=True,
        text=True,
    )
    assert r.returncode == EXIT_OK
    r = subprocess.run([sys.executable, "-m", "stationary"], capture_output=True, text=True)
    assert r.returncode == EXIT_USAGE


def test_deterministic(files, capsys):
    main(["scan", str(files["section4"]), "--grid", "128"])
    a = capsys.readouterr().out
    main(["scan", str(files["section4"]), "--grid", "128"])
    assert capsys.readouterr().out == a
