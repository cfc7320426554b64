import csv
import subprocess
import sys

import pytest

from helmopen.cli import main, parse_config
from helmopen.errors import ParseError, ValidationError

FAST = ["--h", "0.2", "--inner_h", "0.05"]


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_defaults():
    cfg = parse_config("solve", "")
    v = cfg.values
    assert (v["shape"], v["r_hat"], v["R"], v["j"], v["k"]) == ("annulus", 0.5, (2.0,), (0,), (1.0,))
    assert v["refraction"] == "constant:1" and v["weighted"] is False
    assert (v["epsilon"], v["max_iterations"], v["outer"], v["seed"]) == (1e-8, 500, "neumann", 42)


def test_flags_override_file():
    cfg = parse_config("study", "k = 2\n# comment\nR = 1,2\n", {"k": "0.5"})
    assert cfg["k"] == (0.5,) and cfg["R"] == (1.0, 2.0)


def test_variable_index_defaults_to_weighted():
    assert parse_config("solve", "refraction = angular:0.1")["weighted"] is True


@pytest.mark.parametrize(
    "text,error",
    [
        ("refraction = angular:2.5", ValidationError),
        ("r_hat = 3", ValidationError),
        ("shape = hexagon", ValidationError),
        ("k = -1", ValidationError),
        ("k = fast", ParseError),
        ("colour = red", ParseError),
        ("just words", ParseError),
    ],
)
def test_config_errors(text, error):
    with pytest.raises(error) as info:
        parse_config("solve", text)
    if error is ParseError and "=" in text and "colour" not in text:
        assert "--" in str(info.value) or ":1" in str(info.value)


def test_parse_error_names_the_line():
    with pytest.raises(ParseError, match=":3:"):
        parse_config("solve", "k = 1\n\nbroken line\n")


def test_scan_rejects_large_a():
    with pytest.raises(ValidationError):
        parse_config("scan", "a = 0, 2.0")


def test_exact_boundary_samples(tmp_path):
    assert main(["exact", "--out", str(tmp_path), "--n_r", "4", "--n_theta", "8"]) == 0
    rows = _rows(tmp_path / "exact.csv")
    hole = [r for r in rows if float(r["r"]) == 0.5]
    assert len(hole) == 8
    for r in hole:
        assert abs(complex(float(r["re"]), float(r["im"])) - 1) < 1e-12


def test_study_rows_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["study", "--R", "1,2,4", "--j", "0", "--k", "1"] + FAST
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    rows = _rows(a / "study.csv")
    assert len(rows) == 3
    errs = [float(r["unit_L2_rel"]) for r in rows]
    assert errs[0] > errs[1] > errs[2]
    assert (a / "study.csv").read_bytes() == (b / "study.csv").read_bytes()
    assert (a / "curves").is_dir() and (a / "timings.csv").exists()
    assert not list(a.rglob("*.partial"))


def test_solve_writes_fields_and_traces(tmp_path):
    args = ["solve", "--R", "1", "--j", "2", "--field_format", "both", "--trace", "--out", str(tmp_path)] + FAST
    assert main(args) == 0
    assert (tmp_path / "field_R1_j2_k1.csv").exists() and (tmp_path / "field_R1_j2_k1.vtk").exists()
    trace = (tmp_path / "trace_R1_j2_k1.csv").read_text().splitlines()
    assert trace[0] == "m,J,grad_norm,rho,gamma"
    assert _rows(tmp_path / "solve.csv")[0]["converged"] == "1"


def test_mesh_command(tmp_path):
    assert main(["mesh", "--shape", "square", "--R", "1", "--out", str(tmp_path)] + FAST) == 0
    assert (tmp_path / "mesh_square_R1.txt").read_text().startswith("helm-mesh v1")


def test_scan_classification(tmp_path):
    args = ["scan", "--a", "0.8", "--R", "2,4", "--out", str(tmp_path)] + FAST
    assert main(args) == 0
    assert _rows(tmp_path / "classification.csv")[0]["classification"] in ("bounded", "growing")
    assert len(_rows(tmp_path / "scan.csv")) == 2


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["solve", "--refraction", "angular:2.5", "--out", str(tmp_path)]) != 0
    assert "ValidationError" in capsys.readouterr().err
    assert main(["solve", "--config", str(tmp_path / "missing.cfg")]) != 0
    assert main(["solve", "--k"]) != 0


def test_console_script_and_thread_cap(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("command_is_not_a_key = 1\n")
    proc = subprocess.run([sys.executable, "-m", "helmopen.cli", "solve", "--config", str(cfg)], capture_output=True, text=True)
    assert proc.returncode != 0 and "run.cfg:1" in proc.stderr
    cfg.write_text("R = 1\nh = 0.2\ninner_h = 0.05\nfield_format = none\n")
    env = {"HELM_THREADS": "1", "PATH": ""}
    proc = subprocess.run([sys.executable, "-m", "helmopen.cli", "solve", "--config", str(cfg), "--out", str(tmp_path)], capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "solve.csv").exists()
