from pathlib import Path

import pytest

from sl3jones import cli
from sl3jones import pipeline as pl
from sl3jones.formats import RunManifest, load_document, serialize_operator
from sl3jones.ore import OreOp


def run(tmp_path, *args):
    out = tmp_path / "o"
    rc = cli.main([*args, "--out", str(out)])
    return rc, out


def test_jones_command(tmp_path, capsys):
    rc, out = run(tmp_path, "jones", "--b", "3", "--nmax", "2")
    assert rc == 0
    assert "0 1 q^-2 + q^-4 - q^-6" in capsys.readouterr().out
    man = RunManifest.loads((out / "manifest.txt").read_text())
    assert man.command == "jones" and man.status == "ok"
    assert "table.txt" in man.outputs


def test_manifest_hash_stability(tmp_path):
    _, a = run(tmp_path / "a", "jones", "--nmax", "3", "--mode", "modular", "--v0", "3", "--p", "2147483587")
    _, b = run(tmp_path / "b", "jones", "--nmax", "3", "--mode", "modular", "--v0", "3", "--p", "2147483587")
    ma = RunManifest.loads((a / "manifest.txt").read_text())
    mb = RunManifest.loads((b / "manifest.txt").read_text())
    assert ma.outputs == mb.outputs


def test_gb_and_eps_on_file(tmp_path, capsys):
    f = tmp_path / "toy.ops"
    L1, L2 = OreOp.L(1), OreOp.L(2)
    f.write_text(serialize_operator(L1**2 - L2, "A") + serialize_operator(L2**2 - 1, "B", header=False))
    rc, out = run(tmp_path, "gb", "--op", str(f), "--to", "lex:L2,L1")
    assert rc == 0
    text = capsys.readouterr().out
    assert "rank 4" in text and "converted to lex" in text
    assert set(load_document(out / "converted.ops").sections) == {"H1", "H2"}
    rc, _ = run(tmp_path, "eps", "--op", str(f))
    assert rc == 0


def test_eps_and_transport_on_derived(tmp_path, capsys):
    rc, _ = run(tmp_path, "eps", "--names", "P1,Q2")
    assert rc == 0
    assert capsys.readouterr().out.count("True") == 2
    rc, out = run(tmp_path, "transport", "--names", "P1", "--c", "3", "--verify", "4")
    assert rc == 0 and (out / "transported.ops").exists()
    rc, _ = run(tmp_path, "transport", "--names", "P1", "--c", "1")
    assert rc == 0
    assert "extension" in capsys.readouterr().out


def test_guess_verify_fails_on_wrong_operator(tmp_path):
    f = tmp_path / "bad.ops"
    f.write_text(serialize_operator(OreOp.L(1) - 1, "X"))
    rc, _ = run(tmp_path, "guess", "verify", "--op", str(f), "--region", "0:2")
    assert rc == 1
    rc, _ = run(tmp_path, "guess", "verify", "--names", "P1", "--region", "0:4")
    assert rc == 0


def test_diag_command(tmp_path, capsys):
    rc, out = run(tmp_path, "diag", "--nmax", "8")
    assert rc == 0
    assert capsys.readouterr().out.startswith("order 4")
    assert set(load_document(out / "diag.ops").sections) == {"D", "Dn"}


def test_unknown_names(tmp_path):
    with pytest.raises(SystemExit):
        run(tmp_path, "eps", "--names", "Nope")


def test_staircase_picture():
    pic = cli.staircase_picture([(2, 0), (0, 1)], [(0, 0), (1, 0)], size=2)
    assert pic.splitlines()[-2] == "L2^0 ##o"
    assert pic.splitlines()[-3] == "L2^1 o.."


def test_pipeline_config(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("[pipeline]\nb = 3\nrecompute = no\ntransport_c = 0, 3\noversampling = 0.3\n")
    cfg = pl.PipelineConfig.from_file(cfg_file, out_dir=str(tmp_path / "x"))
    assert cfg.transport_c == (0, 3) and cfg.oversampling == 0.3 and not cfg.recompute
    assert cfg.out_dir.endswith("x")


def test_pipeline_command(tmp_path, capsys):
    rc, out = run(tmp_path, "pipeline")
    text = capsys.readouterr().out
    assert rc == 0, text
    assert text.count("[PASS]") == 10
    man = RunManifest.loads((out / "manifest.txt").read_text())
    assert man.status == "ok" and "operators.ops" in man.outputs
    ops = load_document(out / "operators.ops").sections
    assert {"P1", "P2", "P3", "Q1", "Q2", "D"} <= set(ops)
    assert "interior rays (4,1) (2,1) (1,1) (1,2) (1,4)" in (out / "fan.txt").read_text()
