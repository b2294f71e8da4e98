import json
import os

import pytest

from gapcert.cli import main

from conftest import P0_INPUTS, wells_config


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def p0_scalar_config(outdir):
    ci = dict(P0_INPUTS)
    q = ci.pop("q")
    return {
        "certificate_inputs": ci,
        "certificate": {"q": q, "precision_bits": 192},
        "output": {"dir": outdir, "plots": False},
    }


def test_bound_exit_zero(tmp_path, capsys):
    cfg = write(tmp_path, "p0.json", p0_scalar_config(str(tmp_path / "out")))
    assert main(["bound", "--config", cfg]) == 0
    captured = capsys.readouterr()
    assert "bound = " in captured.out
    payload = json.loads((tmp_path / "out" / "bound.json").read_text())
    names = [c["name"] for c in payload["constants"]]
    assert "bound" in names and "alpha" in names
    # no raw mpf internals in the human table: log10 labels only
    assert "mpf(" not in captured.out


def test_validate_shallow_exit_one(tmp_path):
    raw = wells_config(depth=-0.1, sep=3.0, half=5.0, h=1 / 16,
                       outdir=str(tmp_path / "out"))
    cfg = write(tmp_path, "shallow.json", raw)
    assert main(["validate", "--config", cfg]) == 1
    payload = json.loads((tmp_path / "out" / "validation.json").read_text())
    assert payload["outcome"] == "not-in-hypotheses"


def test_missing_q_exit_three(tmp_path, capsys):
    raw = p0_scalar_config(str(tmp_path / "out"))
    del raw["certificate"]["q"]
    cfg = write(tmp_path, "bad.json", raw)
    assert main(["bound", "--config", cfg]) == 3
    err = capsys.readouterr().err
    assert json.loads(err.strip())["error"]["exit_code"] == 3


def test_unknown_key_rejected(tmp_path):
    raw = p0_scalar_config(str(tmp_path / "out"))
    raw["extra_section"] = {"x": 1}
    cfg = write(tmp_path, "bad2.json", raw)
    assert main(["bound", "--config", cfg]) == 3


def test_missing_file_exit_three(tmp_path):
    assert main(["bound", "--config", str(tmp_path / "nope.json")]) == 3


def test_check_assumptions_command(tmp_path):
    raw = wells_config(sep=3.0, half=5.0, outdir=str(tmp_path / "out"))
    cfg = write(tmp_path, "chk.json", raw)
    assert main(["check-assumptions", "--config", cfg]) == 0
    payload = json.loads((tmp_path / "out" / "assumptions.json").read_text())
    assert payload["separation"]["passed"] is True


def test_check_assumptions_violation_exit_one(tmp_path):
    raw = wells_config(sep=3.0, half=5.0, margin=1.2, outdir=str(tmp_path / "out"))
    cfg = write(tmp_path, "chk2.json", raw)
    assert main(["check-assumptions", "--config", cfg]) == 1


def test_solve_command_exports(tmp_path):
    raw = wells_config(depth=-8.0, sep=3.0, half=5.0, h=1 / 16,
                       outdir=str(tmp_path / "out"))
    cfg = write(tmp_path, "solve.json", raw)
    assert main(["solve", "--config", cfg, "--format", "csv"]) == 0
    assert (tmp_path / "out" / "eigen.json").exists()
    psi0 = (tmp_path / "out" / "psi0.csv").read_text().splitlines()
    assert psi0[0] == "x,y,value"
    payload = json.loads((tmp_path / "out" / "eigen.json").read_text())
    assert payload["lambda0"] < payload["lambda1"] < 0


def test_reproducibility_byte_identical(tmp_path):
    raw = wells_config(depth=-8.0, sep=3.0, half=5.0, h=1 / 16)
    raw["sweep"] = {"regime": "coupling", "values": [-8.0, -0.05],
                    "h": 1 / 16, "measurement_max_levels": 1}
    outputs = {}
    for run in ("a", "b"):
        outdir = tmp_path / run
        raw["output"] = {"dir": str(outdir), "plots": False}
        cfg = write(tmp_path, f"sweep_{run}.json", raw)
        assert main(["sweep", "--config", cfg]) == 0
        outputs[run] = sorted(p for p in os.listdir(outdir))
    assert outputs["a"] == outputs["b"]
    for name in outputs["a"]:
        a = (tmp_path / "a" / name).read_bytes()
        b = (tmp_path / "b" / name).read_bytes()
        assert a == b, f"{name} differs between identical runs"


def test_precision_override_flag(tmp_path):
    cfg = write(tmp_path, "p0.json", p0_scalar_config(str(tmp_path / "out")))
    assert main(["bound", "--config", cfg, "--precision", "256"]) == 0


def test_precision_exhausted_exit_two(tmp_path, capsys):
    raw = p0_scalar_config(str(tmp_path / "out"))
    # q -> n drives the certificate beyond any finite-memory representation
    raw["certificate_inputs"].update({"n": 3, "sup_local_V": 0.0,
                                      "sup_local_Vminus": 0.0,
                                      "norm_Vminus_Omega0": 0.0})
    raw["certificate"]["q"] = 3.0000001
    cfg = write(tmp_path, "hardq.json", raw)
    assert main(["bound", "--config", cfg]) == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"]["type"] == "PrecisionExhaustedError"
