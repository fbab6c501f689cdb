import json
import math
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from statbench.errors import DegenerateVarianceError
from statbench.stats import ci95, compare_samples, difference_ci, welch_t

ORACLE = json.loads((Path(__file__).parent / "data" / "stats_oracle.json").read_text())["cases"]


def close(x, y, tol=1e-9):
    return abs(x - y) <= tol * max(1.0, abs(y))


def test_ci95_trivial_cases():
    assert ci95([5, 5, 5, 5, 5]) == (5.0, 0.0)
    assert ci95([3.25]) == (3.25, 0.0)
    with pytest.raises(ValueError):
        ci95([])


def test_ci95_reference_example():
    mean, half = ci95([10, 12, 11, 13, 12])
    assert mean == pytest.approx(11.6, abs=1e-12)
    assert close(half, ORACLE[0]["ci_a"][1])


def test_welch_identical_samples():
    w = welch_t([1, 2, 3], [1, 2, 3])
    assert w.statistic == 0.0 and w.p_value == pytest.approx(1.0) and not w.significant
    assert w.direction == "none"


def test_welch_reference_example():
    w = welch_t([10, 12, 11, 13, 12], [14, 15, 13, 16, 15])
    t, df, p = ORACLE[0]["welch"]
    assert close(w.statistic, t) and close(w.df, df) and close(w.p_value, p)
    assert w.significant and w.direction == "increase"


def test_welch_degenerate_and_small_samples():
    with pytest.raises(DegenerateVarianceError):
        welch_t([2, 2, 2], [2, 2])
    with pytest.raises(ValueError):
        welch_t([1], [1, 2])
    w = welch_t([1, 1, 1], [2, 2, 2])
    assert w.statistic == -math.inf and w.p_value == 0.0 and w.significant


@pytest.mark.parametrize("case", range(len(ORACLE)))
def test_against_frozen_oracle(case):
    c = ORACLE[case]
    for sample, (mean, half) in ((c["a"], c["ci_a"]), (c["b"], c["ci_b"])):
        got = ci95(sample)
        assert close(got[0], mean) and close(got[1], half)
    t, df, p = c["welch"]
    w = welch_t(c["a"], c["b"])
    assert close(w.statistic, t) and close(w.df, df) and close(w.p_value, p)


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@given(st.lists(finite, min_size=2, max_size=12), st.lists(finite, min_size=2, max_size=12))
def test_welch_antisymmetry(a, b):
    try:
        ab = welch_t(a, b)
    except DegenerateVarianceError:
        return
    ba = welch_t(b, a)
    if math.isinf(ab.statistic):
        assert ba.statistic == -ab.statistic
    else:
        assert ba.statistic == pytest.approx(-ab.statistic, rel=1e-9, abs=1e-12)
        assert ba.p_value == pytest.approx(ab.p_value, rel=1e-9, abs=1e-12)
    assert 0.0 <= ab.p_value <= 1.0


def test_compare_cells():
    assert compare_samples("x", [1, 2, 3], [1, 2, 3]).cell == "= ns"
    assert compare_samples("x", [5, 5, 5], [5, 5, 5]).cell == "= ns"
    assert compare_samples("x", [10, 12, 11, 13, 12], [14, 15, 13, 16, 15]).cell == "↑ sig"
    assert compare_samples("x", [14, 15, 13, 16, 15], [10, 12, 11, 13, 12]).cell == "↓ sig"
    assert compare_samples("x", [1, 3, 2], [2, 1, 3.5]).cell.endswith("ns")


def test_difference_ci_contains_delta_sign_when_significant():
    a, b = [10, 12, 11, 13, 12], [14, 15, 13, 16, 15]
    assert 0 < difference_ci(a, b) < 3.0
    assert difference_ci([1], [2, 3]) == 0.0


def test_welch_tiny_variance_does_not_underflow():
    w = welch_t([0.0, 0.0], [0.0, 1e-91])
    assert w.statistic == pytest.approx(-1.0) and w.df == pytest.approx(1.0)
    assert w.p_value == pytest.approx(0.5)
