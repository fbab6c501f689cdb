"""Confidence intervals and Welch tests over per-seed metric values."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy import stats as _st

from .errors import DegenerateVarianceError


def _mean_var(sample: Sequence[float]) -> tuple[float, float]:
    k = len(sample)
    mean = math.fsum(sample) / k
    if k < 2:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in sample) / (k - 1)
    return mean, var


def _welch_df(qa: float, qb: float, ka: int, kb: int) -> float:
    # Welch-Satterthwaite with the variance terms normalised by their sum, so
    # squaring tiny variances cannot underflow the denominator to zero
    se2 = qa + qb
    ra, rb = qa / se2, qb / se2
    return 1.0 / (ra * ra / (ka - 1) + rb * rb / (kb - 1))


def ci95(sample: Sequence[float], level: float = 0.95) -> tuple[float, float]:
    """Mean and Student-t confidence half-width (df = k - 1); half-width is 0 for k = 1."""
    sample = [float(x) for x in sample]
    k = len(sample)
    if k == 0:
        raise ValueError("ci95 needs at least one value")
    mean, var = _mean_var(sample)
    if k == 1 or var == 0.0:
        return mean, 0.0
    tcrit = _st.t.ppf(0.5 + level / 2, k - 1)
    return mean, float(tcrit * math.sqrt(var) / math.sqrt(k))


@dataclass(frozen=True)
class WelchResult:
    statistic: float
    df: float
    p_value: float
    significant: bool
    direction: str  # "increase" | "decrease" | "none", for b relative to a
    mean_a: float
    mean_b: float
    alpha: float = 0.05


def welch_t(a: Sequence[float], b: Sequence[float], alpha: float = 0.05) -> WelchResult:
    """Two-sided Welch two-sample t-test; ``statistic = (mean_a - mean_b) / se``.

    Raises:
        ValueError: either sample has fewer than two values.
        DegenerateVarianceError: both samples constant with equal means.
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    ka, kb = len(a), len(b)
    if ka < 2 or kb < 2:
        raise ValueError("welch_t needs at least two values per sample")
    ma, va = _mean_var(a)
    mb, vb = _mean_var(b)
    direction = "increase" if mb > ma else "decrease" if mb < ma else "none"
    qa, qb = va / ka, vb / kb
    se2 = qa + qb
    if se2 == 0.0:
        if ma == mb:
            raise DegenerateVarianceError("both samples are constant and equal")
        # zero-variance samples with different means: separation is certain
        return WelchResult(math.copysign(math.inf, ma - mb), math.nan, 0.0, True, direction, ma, mb, alpha)
    t = (ma - mb) / math.sqrt(se2)
    df = _welch_df(qa, qb, ka, kb)
    p = float(2.0 * _st.t.sf(abs(t), df))
    p = min(p, 1.0)
    return WelchResult(t, df, p, p < alpha, direction, ma, mb, alpha)


def difference_ci(a: Sequence[float], b: Sequence[float], level: float = 0.95) -> float:
    """Welch half-width for ``mean(b) - mean(a)``; 0 when it is undefined."""
    if len(a) < 2 or len(b) < 2:
        return 0.0
    _, va = _mean_var([float(x) for x in a])
    _, vb = _mean_var([float(x) for x in b])
    qa, qb = va / len(a), vb / len(b)
    se2 = qa + qb
    if se2 == 0.0:
        return 0.0
    df = _welch_df(qa, qb, len(a), len(b))
    return float(_st.t.ppf(0.5 + level / 2, df) * math.sqrt(se2))


ARROWS = {"increase": "↑", "decrease": "↓", "none": "="}


@dataclass(frozen=True)
class Comparison:
    metric: str
    mean_a: float
    mean_b: float
    delta: float
    direction: str
    significant: bool
    statistic: float
    df: float
    p_value: float

    @property
    def cell(self) -> str:
        return f"{ARROWS[self.direction]} {'sig' if self.significant else 'ns'}"


def compare_samples(metric: str, a: Sequence[float], b: Sequence[float], alpha: float = 0.05) -> Comparison:
    try:
        w = welch_t(a, b, alpha)
    except DegenerateVarianceError:
        m = math.fsum(a) / len(a)
        return Comparison(metric, m, m, 0.0, "none", False, 0.0, math.nan, 1.0)
    except ValueError:
        ma = math.fsum(a) / len(a) if a else math.nan
        mb = math.fsum(b) / len(b) if b else math.nan
        direction = "increase" if mb > ma else "decrease" if mb < ma else "none"
        return Comparison(metric, ma, mb, mb - ma, direction, False, math.nan, math.nan, math.nan)
    return Comparison(metric, w.mean_a, w.mean_b, w.mean_b - w.mean_a, w.direction, w.significant,
                      w.statistic, w.df, w.p_value)
