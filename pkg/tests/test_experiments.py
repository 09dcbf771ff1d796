import json
import math

import numpy as np
import pytest

from qrg.errors import DomainError
from qrg.experiments import (DiscreteKernel, ExperimentReport, doeblin_check, experiment_doeblin,
                             experiment_dominating, experiment_late_components, experiment_largest_component,
                             experiment_excursion_match, experiment_visits, experiment_walk_convergence)
from qrg.limit import LimitParams
from qrg.stats import loglog_slope


def test_synthetic_tail_slope():
    A = np.array([1.0, 2.0, 4.0])
    assert loglog_slope(A, 0.4 * A ** -1.5) == pytest.approx(-1.5, abs=1e-6)


def test_largest_small_run_and_vacuous_bound():
    rep = experiment_largest_component(n=500, replicas=200, seed=1)
    assert rep.metric("P(Cmax<0.2n^2/3)").note == "bound vacuous (>= 1)"
    assert rep.metric("P(Cmax<0.2n^2/3)").passed
    assert len(rep.raw["c_max"]) == 200


def test_largest_subcritical_is_smaller():
    crit = experiment_largest_component(n=2000, replicas=300, seed=4, a=0.0)
    sub = experiment_largest_component(n=2000, replicas=300, seed=4, a=-3.0)
    assert sub.metric("P(Cmax>1n^2/3)").estimate < crit.metric("P(Cmax>1n^2/3)").estimate


def test_walk_small_s_is_near_zero():
    rep = experiment_walk_convergence(n=10_000, replicas=20, s_grid=(0.01, 0.5), seed=2)
    assert abs(rep.metric("mean Zbar(0.01)").estimate) < 0.1
    assert rep.series["mean_zbar"][0] == 0


def test_late_components_trivial_cases():
    n = 1000
    big_y = experiment_late_components(n=n, replicas=50, ys=(n ** (2 / 3),), seed=3)
    assert big_y.metric(f"p(y={n ** (2 / 3):.6g})").estimate == 0
    huge = experiment_late_components(n=n, replicas=50, delta=50.0, seed=3)
    assert all(m.estimate == 0 for m in huge.metrics if m.name.startswith("p("))


def test_excursions_subcritical_degenerates():
    lp = LimitParams(a=-5.0, lam=0.89636168, c=1.0, dt=1e-3, horizon=8.0)
    rep = experiment_excursion_match(a=-5.0, n=5000, replicas=100, limit=lp, seed=6)
    assert np.mean(rep.raw["c1_scaled"]) < 0.3
    assert np.mean(rep.raw["gamma1"]) < 0.3


def test_doeblin_examples():
    k = 8
    uniform = DiscreteKernel(np.full((k, k), 1 / k), 1.0)
    rep = doeblin_check(uniform, 0, 3)
    assert rep.series["tv"][0] == pytest.approx(1 - 1 / k)
    assert rep.series["tv"][1] == pytest.approx(0, abs=1e-15)
    mix = DiscreteKernel.mixture(64, 0.5, np.random.default_rng(0))
    rep = doeblin_check(mix, 5, 20)
    assert rep.passed
    assert all(t <= 0.5 ** n + 1e-12 for n, t in enumerate(rep.series["tv"]))


def test_kernel_validation():
    with pytest.raises(DomainError):
        DiscreteKernel(np.array([[0.5, 0.6], [0.5, 0.5]]), 0.5)
    with pytest.raises(DomainError):
        DiscreteKernel(np.array([[1.0, 0.0], [0.5, 0.5]]), 0.5)
    with pytest.raises(DomainError):
        DiscreteKernel(np.eye(2), 0.0)


def test_doeblin_tv_nonincreasing_any_kernel():
    rng = np.random.default_rng(11)
    for _ in range(20):
        k = int(rng.integers(2, 30))
        eps = float(rng.uniform(0.05, 1))
        p = rng.random((k, k))
        p = eps / k + (1 - eps) * p / p.sum(axis=1, keepdims=True)
        tv = doeblin_check(DiscreteKernel(p, eps), int(rng.integers(k)), 15).series["tv"]
        assert all(b <= a + 1e-15 for a, b in zip(tv, tv[1:]))


def test_report_formats():
    rep = ExperimentReport("demo", {"n": 3}, 9, 2, raw={"x": [1.5, 2.0]})
    rep.add("m", 0.25, 0.01, "< 1", True)
    rep.add("undefined", math.nan, passed=False)
    doc = json.loads(rep.to_json())
    assert doc["metrics"][1]["estimate"] is None and doc["pass"] is False
    text = rep.to_text()
    assert "PASS" in text and "FAIL" in text
    assert rep.to_csv().splitlines() == ["replica,x", "0,1.5", "1,2.0"]


@pytest.mark.parametrize("fn, kwargs", [
    (experiment_largest_component, {"n": 300, "replicas": 12}),
    (experiment_walk_convergence, {"n": 2000, "replicas": 6}),
    (experiment_visits, {"ns": (100, 400), "replicas": 6}),
    (experiment_dominating, {"n": 500, "replicas": 20, "sandwich_replicas": 6}),
    (experiment_excursion_match, {"n": 400, "replicas": 6, "limit": LimitParams(a=1.0, horizon=2.0, dt=1e-2)}),
    (experiment_late_components, {"n": 300, "replicas": 12}),
    (experiment_doeblin, {"kernels": 3}),
])
def test_reports_independent_of_workers(fn, kwargs):
    one = fn(seed=5, workers=1, **kwargs)
    two = fn(seed=5, workers=2, **kwargs)
    assert one.to_json() == two.to_json()
    assert one.to_csv() == two.to_csv()
