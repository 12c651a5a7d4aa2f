"""Command-line interface: formats, config merging, exit codes, determinism."""

import json

import numpy as np
import pytest

from rabipt.cli import main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


# ------------------------------------------------------------- qes-points


def test_qes_points_csv_first_row(capsys):
    code, out, err = run(capsys, "qes-points", "--n-max", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,branch,g,energy,rescaled_energy,constraint_residual"
    assert lines[1].startswith("1,plus,0.2,1.26,1.3,")
    # n=1..2: one + one + two + one minus = 4 points
    assert len(lines) == 1 + 4


def test_qes_points_json_structure(capsys):
    code, out, _ = run(capsys, "qes-points", "--n-max", "1", "--format", "json")
    assert code == 0
    pts = json.loads(out)
    assert len(pts) == 1
    assert pts[0]["n"] == 1 and pts[0]["branch"] == "plus"
    assert pts[0]["g"] == pytest.approx(0.2)


def test_qes_points_branch_filter(capsys):
    code, out, _ = run(capsys, "qes-points", "--n-max", "3",
                       "--branch", "minus")
    rows = out.strip().splitlines()[1:]
    assert all(r.split(",")[1] == "minus" for r in rows)
    assert len(rows) == 1 + 2


def test_qes_points_degenerate_notice(capsys):
    code, out, err = run(capsys, "qes-points", "--delta", "0", "--n-max", "2")
    assert code == 0
    assert out.strip().splitlines() == [
        "n,branch,g,energy,rescaled_energy,constraint_residual"]
    assert "notice:" in err and "delta = 0" in err


def test_output_is_deterministic(capsys, tmp_path):
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["qes-points", "--n-max", "4", "--output", str(f1)]) == 0
    assert main(["qes-points", "--n-max", "4", "--output", str(f2)]) == 0
    assert f1.read_bytes() == f2.read_bytes()


# --------------------------------------------------------------- spectrum


def test_spectrum_zero_coupling_golden(capsys):
    code, out, _ = run(capsys, "spectrum", "--g-min", "0", "--g-max", "0.1",
                       "--steps", "2", "--levels", "2", "--truncation", "60")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "g,level_0,level_1"
    assert lines[1].startswith("0,-1.23693168769,")
    assert len(lines) == 3


def test_spectrum_range_validation(capsys):
    code, _, err = run(capsys, "spectrum", "--g-min", "0.5", "--g-max", "0.5")
    assert code == 2
    assert "--g-min" in err


# ------------------------------------------------------------ pt-energies


def test_pt_energies_markers_sibling_file(capsys, tmp_path):
    out_file = tmp_path / "pte.csv"
    code = main(["pt-energies", "--g-min", "0.1", "--g-max", "0.3",
                 "--steps", "3", "--levels", "2", "--truncation", "60",
                 "--n-max", "1", "--output", str(out_file)])
    assert code == 0
    markers = tmp_path / "pte_markers.csv"
    assert markers.exists()
    lines = markers.read_text().strip().splitlines()
    assert lines[0] == "n,branch,g,calE"
    assert lines[1] == "1,plus,0.2,-1.52"
    head = out_file.read_text().splitlines()[0]
    assert head == "g,calE_plus_0,calE_plus_1,calE_minus_0,calE_minus_1"


# ------------------------------------------------------------------ bethe


def test_bethe_first_crossing_json(capsys):
    code, out, _ = run(capsys, "bethe", "--n", "1", "--branch", "plus")
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 1 and doc["branch"] == "plus"
    assert doc["g"] == pytest.approx(0.2)
    assert doc["energy"] == pytest.approx(1.26)
    (z,) = doc["roots"]
    assert z["re"] == pytest.approx(-3.8, abs=1e-10)
    assert z["im"] == 0.0
    ga = doc["gaudin"]
    assert ga["A"] == pytest.approx(-0.4)
    assert ga["B"] == pytest.approx(1.6)
    assert ga["C"] == pytest.approx(0.0)
    assert ga["calE"] == pytest.approx(-1.52)
    for key in ("bethe_max", "constraint", "gaudin_energy"):
        assert abs(doc["residuals"][key]) < 1e-8


def test_bethe_requires_point_flags(capsys):
    code, _, err = run(capsys, "bethe")
    assert code == 2
    assert "required" in err


def test_bethe_point_index_range(capsys):
    code, _, err = run(capsys, "bethe", "--n", "2", "--branch", "minus",
                       "--point-index", "5")
    assert code == 2
    assert "1 point(s)" in err


# -------------------------------------------------------------- potential


def test_potential_qes_and_full_agree_bytewise(capsys):
    _, out_qes, _ = run(capsys, "potential", "--kind", "qes", "--n", "1",
                        "--branch", "plus", "--point-index", "0",
                        "--x-min", "1", "--x-max", "1", "--samples", "1")
    _, out_full, _ = run(capsys, "potential", "--kind", "full", "--branch",
                         "plus", "--g", "0.2", "--energy", "1.26",
                         "--x-min", "1", "--x-max", "1", "--samples", "1")
    assert out_qes == out_full
    assert out_qes.strip().splitlines()[1] == "1,5.97764661476"


def test_potential_gaudin_kind(capsys):
    code, out, _ = run(capsys, "potential", "--kind", "gaudin",
                       "--gaudin-a", "-0.4", "--gaudin-b", "1.6",
                       "--gaudin-c", "0", "--gaudin-gamma", "0.4",
                       "--gaudin-v", "3.8",
                       "--x-min", "1", "--x-max", "1", "--samples", "1")
    assert code == 0
    val = float(out.strip().splitlines()[1].split(",")[1])
    assert val == pytest.approx(5.9776466147574405, abs=1e-10)


def test_potential_forms_match_on_a_grid(capsys):
    args = ["potential", "--kind", "qes", "--n", "2", "--branch", "minus",
            "--point-index", "0", "--x-min", "0.5", "--x-max", "4",
            "--samples", "8"]
    _, out_pf, _ = run(capsys, *args, "--form", "partial-fraction")
    _, out_h, _ = run(capsys, *args, "--form", "hyperbolic")
    for row_a, row_b in zip(out_pf.splitlines()[1:], out_h.splitlines()[1:]):
        va, vb = float(row_a.split(",")[1]), float(row_b.split(",")[1])
        assert va == pytest.approx(vb, rel=1e-10)


def test_potential_wavefunction_column(capsys):
    code, out, _ = run(capsys, "potential", "--kind", "qes", "--n", "1",
                       "--branch", "plus", "--point-index", "0",
                       "--x-min", "0.5", "--x-max", "2", "--samples", "4",
                       "--wavefunction")
    assert code == 0
    assert out.splitlines()[0] == "x,V,psi"
    psi = [float(r.split(",")[2]) for r in out.strip().splitlines()[1:]]
    assert all(np.isfinite(psi)) and psi[0] > psi[-1] > 0.0


def test_potential_rejects_singular_origin(capsys):
    code, _, err = run(capsys, "potential", "--kind", "qes", "--n", "1",
                       "--branch", "plus", "--point-index", "0",
                       "--x-min", "0", "--x-max", "2", "--samples", "5")
    assert code == 2
    assert "x" in err


# ----------------------------------------------------------------- config


def test_config_defaults_and_cli_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nn-max = 2\nbranch = minus\n")
    code, out, _ = run(capsys, "qes-points", "--config", str(cfg))
    rows = out.strip().splitlines()[1:]
    assert len(rows) == 1 and rows[0].startswith("2,minus,")
    # explicit flag beats the config value
    code, out, _ = run(capsys, "qes-points", "--config", str(cfg),
                       "--branch", "plus")
    rows = out.strip().splitlines()[1:]
    assert len(rows) == 3 and all(r.split(",")[1] == "plus" for r in rows)


def test_config_unknown_key_rejected(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n-max=2\nbogus_key=1\n")
    code, _, err = run(capsys, "qes-points", "--config", str(cfg))
    assert code == 2
    assert "bogus_key" in err


def test_config_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "qes-points", "--config",
                       str(tmp_path / "absent.cfg"))
    assert code == 2


# ----------------------------------------------------------------- verify


def test_verify_single_check_and_report(capsys, tmp_path):
    report = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify", "--checks", "qes_point_counts",
                       "--n-max", "2", "--report", str(report))
    assert code == 0
    assert "qes_point_counts" in out and "PASS" in out
    doc = json.loads(report.read_text())
    assert doc["all_passed"] is True
    assert [c["name"] for c in doc["checks"]] == ["qes_point_counts"]


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--checks", "juddian_consistency",
                       "--n-max", "1", "--tolerance-scale", "1e-12")
    assert code == 1
    assert "FAIL" in out


def test_verify_unknown_check(capsys):
    code, _, err = run(capsys, "verify", "--checks", "nonsense")
    assert code == 2
    assert "nonsense" in err
