import json
import os

import pytest

import dihedral
from conftest import fixture_path
from dihedral import DihedralHomologyEngine, JobConfig, exit_status_for, main
from helper.errors import (MissingHuStructure, NonExactNode, NotADifferential, ParseError, StructureInvalid,
                           WindowExceeded)


def _report(out_dir):
    with open(os.path.join(out_dir, "report.json"), encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("DIHEDRAL_RING", "DIHEDRAL_RHO", "DIHEDRAL_NMAX", "DIHEDRAL_WORKERS", "DIHEDRAL_OUT_DIR",
                 "DIHEDRAL_TRUNCATION"):
        monkeypatch.delenv(name, raising=False)


@pytest.mark.parametrize("name", ["ground_field", "dual_numbers", "matrices_2x2", "ainf_three_generator"])
def test_validate_passes_on_fixtures(tmp_path, name):
    nmax = "3" if name == "matrices_2x2" else "4"
    status = main(["--input", fixture_path(name), "--out", str(tmp_path), "--nmax", nmax, "--tasks", "validate"])
    assert status == 0
    report = _report(tmp_path)
    assert report["success"] is True
    assert all(v["passed"] for v in report["validation"])


def test_dihedral_task_on_the_ground_field(tmp_path, capsys):
    status = main(["--input", fixture_path("ground_field"), "--out", str(tmp_path), "--nmax", "6",
                   "--tasks", "dihedral,cyclic", "--format", "structured"])
    assert status == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed == _report(tmp_path)
    hd = printed["homology"]["dihedral"]
    assert hd["window"] == [0, 5]
    assert [d["betti"] for d in hd["degrees"]] == [1, 0, 0, 0, 1, 0]
    assert printed["tasks"] == ["cyclic", "dihedral"]
    assert printed["rho"] == "+1"


def test_rho_flag_overrides_the_file(tmp_path):
    status = main(["--input", fixture_path("ground_field"), "--out", str(tmp_path), "--nmax", "6",
                   "--tasks", "dihedral", "--rho", "-1"])
    assert status == 0
    report = _report(tmp_path)
    assert report["rho"] == "-1"
    assert [d["betti"] for d in report["homology"]["dihedral"]["degrees"]] == [0, 0, 1, 0, 0, 0]


def test_ring_from_the_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DIHEDRAL_RING", "Fp:3")
    config = JobConfig.from_env(fixture_path("dual_numbers"), out_dir=str(tmp_path))
    assert config.ring.label == "Fp:3"
    assert DihedralHomologyEngine(config).algebra.ring.characteristic() == 3


def test_les_and_quotients(tmp_path):
    status = main(["--input", fixture_path("dual_numbers"), "--out", str(tmp_path), "--nmax", "4",
                   "--tasks", "validate,quotients,les"])
    assert status == 0
    report = _report(tmp_path)
    assert report["les"]["exact"] is True
    assert set(report["quotients"]) == {"L", "M", "N"}
    with open(os.path.join(tmp_path, "report.txt"), encoding="utf-8") as fh:
        assert "[les] exact: True" in fh.read()


def test_les_without_homotopy_units_is_an_input_error(tmp_path):
    source = tmp_path / "no_tau.alg"
    source.write_text("generators\nu 0\n\npi 0\nu u -> u\n\ninvolution\nu -> u\n", encoding="utf-8")
    status = main(["--input", str(source), "--out", str(tmp_path / "out"), "--tasks", "les"])
    assert status == 2
    assert "tau" in _report(tmp_path / "out")["error"]


def test_failed_validation_skips_homology(tmp_path):
    source = tmp_path / "bad.alg"
    source.write_text("generators\nu 0\nx 0\n\npi 0\nu u -> u\nu x -> x\nx u -> 2*x\n", encoding="utf-8")
    status = main(["--input", str(source), "--out", str(tmp_path / "out"), "--tasks", "validate,cyclic"])
    assert status == 1
    report = _report(tmp_path / "out")
    assert report["homology"] == {}
    assert report["success"] is False


def test_parse_error_exit_status(tmp_path, capsys):
    source = tmp_path / "broken.alg"
    source.write_text("generators\nu zero\n", encoding="utf-8")
    assert main(["--input", str(source), "--out", str(tmp_path)]) == 2
    assert "line 2" in capsys.readouterr().out


def test_missing_input_file(tmp_path):
    assert main(["--input", str(tmp_path / "absent.alg"), "--out", str(tmp_path)]) == 2


def test_unknown_task_is_rejected(tmp_path):
    assert main(["--input", fixture_path("ground_field"), "--out", str(tmp_path), "--tasks", "everything"]) == 2


def test_reports_are_deterministic(tmp_path):
    args = ["--input", fixture_path("dual_numbers"), "--nmax", "4", "--tasks", "validate,cyclic,dihedral,reflexive"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    first = (tmp_path / "a" / "report.json").read_text(encoding="utf-8")
    second = (tmp_path / "b" / "report.json").read_text(encoding="utf-8")
    assert first == second


def test_dump_complexes(tmp_path):
    status = main(["--input", fixture_path("ground_field"), "--out", str(tmp_path), "--nmax", "3",
                   "--tasks", "cyclic", "--dump-complexes"])
    assert status == 0
    dumps = _report(tmp_path)["dumps"]
    assert len(dumps) == 3
    assert all(os.path.exists(p) for p in dumps)


@pytest.mark.parametrize("error,status", [
    (NonExactNode("x"), dihedral.EXIT_VALIDATION),
    (ParseError("x", 1), dihedral.EXIT_INPUT),
    (MissingHuStructure("x"), dihedral.EXIT_INPUT),
    (WindowExceeded("x"), dihedral.EXIT_INPUT),
    (FileNotFoundError("x"), dihedral.EXIT_INPUT),
    (NotADifferential("x"), dihedral.EXIT_INTERNAL),
    (StructureInvalid("x"), dihedral.EXIT_INTERNAL),
    (RuntimeError("x"), dihedral.EXIT_INTERNAL),
])
def test_exit_status_mapping(error, status):
    assert exit_status_for(error) == status
