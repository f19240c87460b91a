"""Articulatory GAN: EMA generator, frozen physical model and analysis tools."""

from ._core import (
    EMA_CHANNELS,
    SAMPLE_RATE,
    ContractViolation,
    FormatError,
    TrainingDiverged,
    dtw_align,
    dtw_corr,
    generate,
    gradcheck,
    loess_smooth,
    odds_ratio_test,
    pearson_r,
    physical_hash,
    read_ema,
    read_wav,
    synthesize,
    synthetic_word,
    train,
    write_ema,
    write_wav,
)

__all__ = [
    "EMA_CHANNELS",
    "SAMPLE_RATE",
    "ContractViolation",
    "FormatError",
    "TrainingDiverged",
    "dtw_align",
    "dtw_corr",
    "generate",
    "gradcheck",
    "loess_smooth",
    "odds_ratio_test",
    "pearson_r",
    "physical_hash",
    "read_ema",
    "read_wav",
    "synthesize",
    "synthetic_word",
    "train",
    "write_ema",
    "write_wav",
]
