import math

import numpy as np
import pytest

import articgan


def test_synthesize_word_shape_and_range():
    ema = articgan.synthetic_word(0)
    assert ema.shape == (13, 256)
    audio = articgan.synthesize(ema)
    assert audio.shape == (20480,)
    assert np.all(np.abs(audio) <= 1.0)
    assert articgan.physical_hash() == articgan.physical_hash()


def test_bad_ema_shape_raises():
    with pytest.raises(articgan.ContractViolation):
        articgan.synthesize(np.zeros((12, 10)))


def test_analysis_ops():
    x = np.linspace(-1, 2, 50)
    assert np.allclose(articgan.loess_smooth(x, 0.3, 1), x, atol=1e-9)
    r = articgan.dtw_align([0, 1, 2], [0, 2])
    assert r["cost"] == 1.0
    assert r["path"][0] == (0, 0)
    assert articgan.pearson_r([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5)
    assert articgan.pearson_r([1, 1, 1], [1, 2, 3]) is None
    odds, p = articgan.odds_ratio_test(0, 10, 5, 5)
    assert odds == 0.0
    assert p == pytest.approx(504 / 15504, rel=1e-12)
    odds, _ = articgan.odds_ratio_test(0, 0, 3, 4)
    assert odds is None


def test_dtw_corr_identity():
    ema = articgan.synthetic_word(3)
    rows = articgan.dtw_corr(ema, ema)
    assert len(rows) == 12
    assert all(row["r"] == pytest.approx(1.0) for row in rows)
    assert rows[0]["place"] == "lower_incisor"


def test_io_roundtrip(tmp_path):
    ema = articgan.synthetic_word(1)
    articgan.write_ema(tmp_path / "w.ema.csv", ema)
    assert np.array_equal(articgan.read_ema(tmp_path / "w.ema.csv"), ema)
    audio = articgan.synthesize(ema)
    articgan.write_wav(tmp_path / "w.wav", audio)
    back = articgan.read_wav(tmp_path / "w.wav")
    assert np.max(np.abs(back - audio)) <= 1 / 32768
    (tmp_path / "bad.ema.csv").write_text("li_y,li_x\n")
    with pytest.raises(articgan.FormatError):
        articgan.read_ema(tmp_path / "bad.ema.csv")


def test_train_then_generate(tmp_path):
    ckpt = tmp_path / "run.ckpt"
    rows = articgan.train(2, seed=1, width_divisor=64, batch_size=2, checkpoint=ckpt)
    assert [row["step"] for row in rows] == [1, 2]
    assert all(math.isfinite(v) for row in rows for v in row.values())
    samples = articgan.generate(ckpt, num=2, seed=3)
    assert len(samples) == 2
    ema, audio = samples[0]
    assert ema.shape == (13, 256)
    assert audio.shape == (20480,)
    assert np.all(np.abs(audio) <= 1.0)


def test_gradcheck_small():
    rows = articgan.gradcheck("autodiff", trials=2, seed=0)
    assert rows and all(row["passed"] for row in rows)
