from __future__ import annotations

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from dirac_lattice.cli import main
from dirac_lattice.report import from_json, reference_extent, to_json


def test_analyze_writes_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["analyze", "--theory", "maxwell1", "--n", "2", "--out", str(out)]) == 0
    text = out.read_text()
    data = json.loads(text)
    assert data["dof_exact"] == 17
    assert data["dof_bulk_density"] == "2/1"
    assert data["reducibility_total"] == 1
    assert "timing_seconds" not in data
    assert to_json(from_json(text)) == text
    assert "degrees of freedom" in capsys.readouterr().out


def test_timing_is_opt_in(tmp_path):
    out = tmp_path / "r.json"
    assert main(["analyze", "--theory", "maxwell1", "--n", "1", "--timing", "--out", str(out)]) == 0
    assert "analysis" in json.loads(out.read_text())["timing_seconds"]


def test_verify_eb_dirac_suite(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--n", "2", "--suite", "dirac", "--seed", "3", "--out", str(out)]) == 0
    report = from_json(out.read_text())
    assert report.passed
    assert report.dof_exact == 12 and report.dof_bulk_density == 0
    assert report.reducibility_bulk_density == 4 and report.reducibility_topological == 12
    assert set(report.verdicts) >= {"dof_oracle", "dirac_bracket_degeneracy", "family_tables"}
    assert report.verdicts["dirac_bracket_degeneracy"].residual == Fraction(0)


@pytest.mark.parametrize("argv", [
    ["analyze", "--n", "0"],
    ["analyze", "--n", "7"],
    ["analyze", "--theory", "missing.theory"],
    ["analyze", "--theory", "nosuch"],
    ["analyze", "--threads", "0"],
    ["verify", "--theory", "maxwell1", "--n", "1", "--suite", "gauge"],
])
def test_input_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_bad_theory_file(tmp_path, capsys):
    bad = tmp_path / "bad.theory"
    bad.write_text("theory x\n[fields]\nq i=1..1\n[hamiltonian]\n1 q[1] D9 q[1]\n")
    assert main(["analyze", "--theory", str(bad), "--n", "1"]) == 2
    assert "line 5" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["verify", "--suite", "everything"])
    assert info.value.code == 2


def test_reference_extent():
    assert [reference_extent(n) for n in (1, 2, 3, 4)] == [2, 3, 2, 3]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dirac_lattice", "analyze", "--theory", "maxwell1", "--n", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "first class / second class" in proc.stdout


def test_failed_verdict_exits_1(monkeypatch):
    from dirac_lattice import suites
    monkeypatch.setattr(suites, "check_algebra", lambda cc: suites.Check(False, 1, Fraction(1), "forced"))
    assert main(["analyze", "--theory", "maxwell1", "--n", "1"]) == 1


def test_inconsistency_exits_1(monkeypatch, capsys):
    from dirac_lattice import report
    from dirac_lattice.dirac import InconsistentSystem

    def boom(*args, **kwargs):
        raise InconsistentSystem("0 = 1")
    monkeypatch.setattr(report, "run_algorithm", boom)
    assert main(["analyze", "--theory", "maxwell1", "--n", "1"]) == 1
    assert "0 = 1" in capsys.readouterr().err


def test_eb_counts_from_command_line(tmp_path):
    out = tmp_path / "a.json"
    assert main(["analyze", "--theory", "paper_g0", "--n", "2", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["generation_counts"] == [320, 128]
    assert (d["total_constraints"], d["second_class"], d["first_class"]) == (448, 192, 256)
    assert main(["analyze", "--theory", "paper_g0", "--n", "1", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["dof_exact"] == 12 and d["topological_modes"] == "12/1"
