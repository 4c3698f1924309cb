"""Two-sample tests for high-dimensional covariance matrices."""

import json

from ._hdcov import (
    BlockTestResult,
    CovTestResult,
    DegenerateScaleError,
    DimensionError,
    ParseError,
    SampleSizeError,
    a_stat,
    asymptotic_power,
    bh_fdr,
    block_power,
    block_test,
    c_stat,
    cov_test,
    ma_population_cov,
    reproduce_table,
    simulate_ma,
    std_normal_cdf,
    std_normal_quantile,
    u_stat,
    w_stat,
)
from ._hdcov import run_genesets as _run_genesets

__version__ = "0.1.0"


def run_genesets(matrix, labels, gmt, fdr=0.05, followup_alpha=0.05, p1=None, mode="exact"):
    """Gene-set pipeline; returns the report as a dict."""
    return json.loads(_run_genesets(str(matrix), str(labels), str(gmt), fdr, followup_alpha, p1, mode))


__all__ = [
    "BlockTestResult",
    "CovTestResult",
    "DegenerateScaleError",
    "DimensionError",
    "ParseError",
    "SampleSizeError",
    "a_stat",
    "asymptotic_power",
    "bh_fdr",
    "block_power",
    "block_test",
    "c_stat",
    "cov_test",
    "ma_population_cov",
    "reproduce_table",
    "run_genesets",
    "simulate_ma",
    "std_normal_cdf",
    "std_normal_quantile",
    "u_stat",
    "w_stat",
]
