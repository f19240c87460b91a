import csv
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("ARTICGAN_CLI", "articgan")


def run(*args, env=None, check=True):
    merged = dict(os.environ)
    merged.pop("ARTICGAN_OUT", None)
    merged.update(env or {})
    proc = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=merged)
    if check:
        assert proc.returncode == 0, proc.stderr
    return proc


def rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


@pytest.fixture(scope="module")
def toy(tmp_path_factory):
    out = tmp_path_factory.mktemp("toy")
    run("toy-data", "--out", out)
    return out


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    out = tmp_path_factory.mktemp("train")
    run("train", "--toy", "--steps", 2, "--batch", 2, "--width-divisor", 64, "--seed", 5, "--out", out)
    return out


def test_toy_data_files(toy):
    assert len(list(toy.glob("word*.wav"))) == 8
    assert len(list(toy.glob("word*.ema.csv"))) == 8


def test_train_writes_metrics_and_checkpoint(trained):
    metrics = rows(trained / "metrics.csv")
    assert [r["step"] for r in metrics] == ["1", "2"]
    assert list(metrics[0]) == ["step", "critic_loss", "gen_loss", "gp", "wasserstein_gap", "grad_norm_g", "grad_norm_d"]
    assert (trained / "final.ckpt").exists()


def test_train_is_deterministic(trained, tmp_path):
    run("train", "--toy", "--steps", 2, "--batch", 2, "--width-divisor", 64, "--seed", 5, "--out", tmp_path)
    assert (tmp_path / "metrics.csv").read_bytes() == (trained / "metrics.csv").read_bytes()
    assert (tmp_path / "final.ckpt").read_bytes() == (trained / "final.ckpt").read_bytes()


def test_train_on_directory(toy, tmp_path):
    run("train", "--data", toy, "--steps", 1, "--batch", 2, "--width-divisor", 64, "--out", tmp_path)
    assert len(rows(tmp_path / "metrics.csv")) == 1


def test_train_bad_data_dir(tmp_path):
    proc = run("train", "--data", tmp_path / "missing", "--steps", 1, "--out", tmp_path, check=False)
    assert proc.returncode != 0
    assert proc.stderr.startswith("error: format:")
    assert len(proc.stderr.strip().splitlines()) == 1


def test_generate(trained, tmp_path):
    run("generate", "--checkpoint", trained / "final.ckpt", "--num", 3, "--seed", 1, "--out", tmp_path / "a")
    run("generate", "--checkpoint", trained / "final.ckpt", "--num", 3, "--seed", 1, "--out", tmp_path / "b")
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == ["000.ema.csv", "000.wav", "001.ema.csv", "001.wav", "002.ema.csv", "002.wav"]
    assert len(rows(tmp_path / "a" / "000.ema.csv")) == 256
    assert (tmp_path / "a" / "000.wav").stat().st_size == 44 + 2 * 20480
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_generate_zero_and_env_out(trained, tmp_path):
    run("generate", "--checkpoint", trained / "final.ckpt", "--num", 0, env={"ARTICGAN_OUT": str(tmp_path / "env")})
    assert list((tmp_path / "env").iterdir()) == []


def test_generate_bad_checkpoint(tmp_path):
    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(b"ARTGANCK" + bytes(20))
    proc = run("generate", "--checkpoint", bad, "--out", tmp_path, check=False)
    assert proc.returncode != 0
    assert "checksum" in proc.stderr


def test_missing_out_is_contract_error(trained):
    proc = run("generate", "--checkpoint", trained / "final.ckpt", check=False)
    assert proc.returncode == 2
    assert proc.stderr.startswith("error: contract:")


def test_synth(toy, tmp_path):
    run("synth", "--ema", toy / "word0.ema.csv", "--out", tmp_path / "a.wav")
    run("synth", "--ema", toy / "word0.ema.csv", "--out", tmp_path / "b.wav")
    assert (tmp_path / "a.wav").stat().st_size == 44 + 2 * 20480
    assert (tmp_path / "a.wav").read_bytes() == (tmp_path / "b.wav").read_bytes()
    assert (tmp_path / "a.wav").read_bytes() == (toy / "word0.wav").read_bytes()
    bad = tmp_path / "bad.ema.csv"
    bad.write_text("li_y,li_x\n")
    proc = run("synth", "--ema", bad, "--out", tmp_path / "c.wav", check=False)
    assert proc.returncode == 3
    assert "li_x" in proc.stderr


def test_analyze_dtw_corr_identical(toy, tmp_path):
    out = tmp_path / "report.csv"
    run("analyze", "dtw-corr", "--gen", toy / "word2.ema.csv", "--real", toy / "word2.ema.csv", "--out", out)
    report = rows(out)
    assert len(report) == 12
    assert all(float(r["r"]) == 1.0 for r in report)
    assert all(float(r["dtw_cost"]) == 0.0 for r in report)


def test_analyze_or_test():
    proc = run("analyze", "or-test", 10, 10, 10, 10)
    header, values = proc.stdout.strip().splitlines()
    assert header == "odds_ratio,p_value"
    odds, p = values.split(",")
    assert float(odds) == 1.0
    assert float(p) == pytest.approx(1.0)
    proc = run("analyze", "or-test", 0, 0, 3, 4)
    assert proc.stdout.strip().splitlines()[1].startswith("NA,")


def test_analyze_smooth(toy, tmp_path):
    run("analyze", "smooth", "--in", toy / "word1.ema.csv", "--span", 0.3, "--out", tmp_path / "s.ema.csv")
    smoothed = rows(tmp_path / "s.ema.csv")
    original = rows(toy / "word1.ema.csv")
    assert len(smoothed) == 256
    assert [r["voicing"] for r in smoothed] == [r["voicing"] for r in original]


def test_analyze_export_2d(toy, tmp_path):
    run("analyze", "export-2d", "--gen", toy / "word3.ema.csv", "--real", toy / "word4.ema.csv", "--out", tmp_path)
    files = sorted(p.name for p in tmp_path.glob("*.csv"))
    assert len(files) == 6
    table = rows(tmp_path / "tongue_body.csv")
    real = rows(toy / "word4.ema.csv")
    assert len(table) == 256
    assert float(table[7]["real_x"]) == pytest.approx(3.0 * float(real[7]["tb_x"]), rel=1e-15)


def test_gradcheck_zero_trials():
    proc = run("gradcheck", "--trials", 0)
    assert proc.stdout.strip() == "suite,check,instances,redraws,max_rel_error,tolerance,status"


def test_gradcheck_autodiff_suite():
    proc = run("gradcheck", "--module", "autodiff", "--trials", 2)
    lines = proc.stdout.strip().splitlines()[1:]
    assert lines and all(line.endswith(",PASS") for line in lines)


def test_unknown_subcommand_fails():
    assert run("bogus", check=False).returncode != 0
