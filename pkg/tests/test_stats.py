import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qrg.errors import DomainError
from qrg.stats import (OrderedVector, binned_pmf, chi2_two_sample, empirical_tail, ks_distance,
                       l2_desc_distance, loglog_slope, tv_distance, wilson_interval)

# grid values keep squared differences away from floating-point underflow
vectors = st.lists(st.integers(0, 10**5).map(lambda k: k / 1000), max_size=8).map(lambda xs: OrderedVector.from_unsorted(xs))


def test_l2_examples():
    assert l2_desc_distance(OrderedVector([3, 1]), OrderedVector([3, 1])) == 0
    assert l2_desc_distance(OrderedVector([3, 1]), OrderedVector([2, 1])) == 1
    assert l2_desc_distance(OrderedVector([2, 1]), OrderedVector([2])) == 1


@given(vectors, vectors, vectors)
def test_l2_is_a_metric(x, y, z):
    dxy = l2_desc_distance(x, y)
    assert dxy == l2_desc_distance(y, x)
    assert dxy >= 0
    assert (dxy == 0) == (np.array_equal(x.top(8), y.top(8)))
    assert l2_desc_distance(x, z) <= dxy + l2_desc_distance(y, z) + 1e-9


def test_ordered_vector_validation():
    with pytest.raises(DomainError):
        OrderedVector([1, 2])
    with pytest.raises(DomainError):
        OrderedVector([-1])
    assert OrderedVector([3, 1]).top(3).tolist() == [3, 1, 0]


def test_ks_examples():
    assert ks_distance([1, 2, 3], [1, 2, 3]) == 0
    assert ks_distance([0], [1]) == 1
    assert ks_distance([1, 2, 3, 4], [1, 2, 3, 5]) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        ks_distance([], [1])


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=30),
       st.lists(st.floats(-50, 50), min_size=1, max_size=30))
def test_ks_range_and_monotone_invariance(a, b):
    d = ks_distance(a, b)
    assert 0 <= d <= 1
    # doubling is exact in floating point, so no ties are created or merged
    assert ks_distance(2 * np.array(a), 2 * np.array(b)) == pytest.approx(d)


def test_empirical_tail_examples():
    assert empirical_tail([1, 2, 3], [5])[0][1] == 0
    assert empirical_tail([1, 2, 3, 4], [2.5])[0][1] == 0.5
    lo, hi = wilson_interval(0, 100)
    assert lo == pytest.approx(0.0, abs=1e-15)
    # z^2 / (n + z^2) with z the 97.5% normal quantile
    z = 1.959963984540054
    assert hi == pytest.approx(z * z / (100 + z * z), rel=1e-9)
    assert hi == pytest.approx(0.0370, abs=5e-5)


def test_loglog_slope_recovers_power_law():
    a = np.array([1.0, 2.0, 4.0])
    assert loglog_slope(a, 0.3 * a ** -1.5) == pytest.approx(-1.5, abs=1e-6)
    assert math.isnan(loglog_slope(a, [0.3, 0.1, 0.0]))


def test_pmf_and_tv():
    p = binned_pmf([0, 0, 1, 2, 5, 7], 3)
    assert p.tolist() == pytest.approx([2 / 6, 1 / 6, 1 / 6, 2 / 6])
    assert tv_distance(p, p) == 0
    assert tv_distance([1, 0], [0, 1]) == 1


def test_chi2_same_law_is_small(rng):
    a = rng.poisson(3, 5000)
    b = rng.poisson(3, 5000)
    stat, dof, q = chi2_two_sample(a, b)
    assert dof >= 5 and stat < q
    stat, _, q = chi2_two_sample(a, rng.poisson(3.5, 5000))
    assert stat > q
