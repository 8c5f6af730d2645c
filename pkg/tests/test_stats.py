import math

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.stats import spearmanr

from ttplon.graph import MetricsRecord
from ttplon.model import Model
from ttplon.stats import (
    ClassKey,
    Correlation,
    ExperimentConfig,
    aggregate_class,
    fisher_mean,
    spearman,
)

FISHER_02_08 = "0.5721224617320372564326518220705860659281726046424"


def test_spearman_examples():
    assert spearman([1, 2, 3, 4], [5, 6, 7, 8]) == (1.0, False)
    assert spearman([1, 2, 3, 4], [8, 7, 6, 5]) == (-1.0, False)
    assert spearman([1, 2, 2, 4], [10, 20, 20, 40]) == (1.0, False)


def test_spearman_degenerate_and_errors():
    assert spearman([1, 1, 1], [3, 1, 2]) == Correlation(0.0, True)
    with pytest.raises(ValueError):
        spearman([1], [1])
    with pytest.raises(ValueError):
        spearman([1, 2], [1, 2, 3])


finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.lists(st.tuples(finite, st.integers(1, 50)), min_size=3, max_size=40))
def test_spearman_matches_scipy(pairs):
    x, y = zip(*pairs)
    assume(len(set(x)) > 1 and len(set(y)) > 1)
    rho, degenerate = spearman(x, y)
    assert not degenerate
    assert rho == pytest.approx(spearmanr(x, y).statistic, abs=1e-12)


@given(st.lists(st.tuples(finite, st.integers(1, 50)), min_size=3, max_size=40))
def test_spearman_rank_invariance(pairs):
    x, y = zip(*pairs)
    assume(len(set(x)) > 1 and len(set(y)) > 1)
    # a strictly increasing transform leaves ranks untouched
    warped = [math.atan(v / 1e5) * 7 + 3 for v in x]
    assume(len(set(warped)) == len(set(x)))
    assert spearman(warped, y).rho == pytest.approx(spearman(x, y).rho, abs=1e-12)


def test_fisher_examples():
    assert fisher_mean([0.5, 0.5, 0.5]) == pytest.approx(0.5, abs=1e-15)
    assert fisher_mean([0.3, -0.3]) == 0.0
    assert abs(fisher_mean([0.2, 0.8]) - float(mpmath.mpf(FISHER_02_08))) <= 1e-12
    with pytest.raises(ValueError):
        fisher_mean([])


def test_fisher_clamps_perfect_correlation():
    value = fisher_mean([1.0, 1.0])
    assert math.isfinite(value) and value == pytest.approx(1 - 1e-6, rel=1e-12)


def _rec(v):
    return MetricsRecord(v, v, v / 10, v / 20, v, v * 3)


def test_aggregate_examples():
    key = ClassKey(Model.TTPA, "u", 2)
    s = aggregate_class([(_rec(1), Correlation(0.1, False)), (_rec(2), Correlation(0.2, False)),
                         (_rec(3), Correlation(0.3, False))], key)
    assert s.mean["n_v"] == 2 and s.std["n_v"] == 1
    assert s.mean["B_mean"] == 6 and s.std["B_mean"] == 3
    assert s.count == 3 and s.std_defined
    assert s.rho_fisher == pytest.approx(fisher_mean([0.1, 0.2, 0.3]))

    one = aggregate_class([(_rec(4), Correlation(0.5, False))], key)
    assert one.mean["l"] == 4 and one.std["l"] == 0 and not one.std_defined

    twin = aggregate_class([(_rec(4), Correlation(0.5, False))] * 2, key)
    assert all(v == 0 for v in twin.std.values())


def test_aggregate_excludes_degenerate_rho():
    s = aggregate_class(
        [(_rec(1), Correlation(0.0, True)), (_rec(2), Correlation(0.4, False))]
    )
    assert s.n_degenerate == 1
    assert s.rho_fisher == pytest.approx(0.4)
    none = aggregate_class([(_rec(1), Correlation(0.0, True))])
    assert math.isnan(none.rho_fisher)


def test_class_keys_and_labels():
    keys = ExperimentConfig().class_keys()
    assert len(keys) == 9 + 9 + 27 + 27
    assert len(set(keys)) == 72
    assert keys[0].label == "ttp0_u_2"
    assert ClassKey(Model.TTPC, "bsc", 10, 0.98).label == "ttpc_bsc_10_0.98"
    with pytest.raises(ValueError):
        ClassKey(Model.TTPB, "u", 2)
    with pytest.raises(ValueError):
        ClassKey(Model.TTPA, "u", 2, 0.9)


def test_config_guards():
    with pytest.raises(ValueError):
        ExperimentConfig(capacity_classes=(3,))
    with pytest.raises(ValueError):
        ExperimentConfig(instances_per_class=0)
    ExperimentConfig(capacity_classes=(3,), non_paper=True)
