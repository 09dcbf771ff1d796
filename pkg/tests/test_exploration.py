import gzip
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrg.errors import DomainError, HorizonError
from qrg.exploration import (clipped_interval, component_stats, dominating_from_xi,
                             expected_first_eta, explore_lazy, explore_realization, free_count,
                             free_walk, offspring_mean, overcount_walk, rescale_walk, visit_counts,
                             walk_from_eta)
from qrg.experiments import _stopped_at
from qrg.graph import GraphRealization, decompose, sample_realization
from qrg.params import CutGammaLaw, ModelParams, critical_lambda, mean_interval_length, window_params
from qrg.stats import chi2_two_sample


def check_walk_identities(path):
    eta, z, act = path.eta, path.z, path.active
    assert z[0] == 0 and act[0] == 1
    assert np.array_equal(np.diff(z), eta - 1)
    for k in range(1, path.steps + 1):
        expected = act[k - 1] + eta[k - 1] - 1 if act[k - 1] > 0 else eta[k - 1]
        assert act[k] == expected
    iota = path.iota
    assert np.array_equal(iota, 1 - np.minimum.accumulate(z[:-1]))
    assert np.all(np.diff(iota) >= 0)
    nu = visit_counts(path)
    total = sum(nu.values())
    assert np.all(total == path.n)
    weighted = sum(m * s for m, s in nu.items())
    assert np.all(weighted <= np.arange(path.steps + 1) + 1)
    # a surplus link needs a second active interval: one left over or one created this step
    for k in np.flatnonzero(path.surplus) + 1:
        assert act[k - 1] >= 2 or eta[k - 1] >= 1


def test_hand_realization(two_vertex_path):
    real = GraphRealization.from_json(two_vertex_path.read_text())
    path, dec = explore_realization(real)
    assert path.eta.tolist() == [1, 0, 0]
    assert path.z.tolist() == [0, 0, -1, -2]
    assert path.vertices.tolist() == [0, 1, 0]
    assert path.lengths[0] == pytest.approx(0.5)
    assert dec.signature() == [(2, 0), (1, 0)]
    assert path.tau_list == [2, 3]
    assert path.iota.tolist() == [1, 1, 2]
    nu = visit_counts(path)
    assert nu[2][3] == 1 and nu[1][3] == 1 and nu[0][3] == 0
    check_walk_identities(path)


def test_single_vertex_no_links():
    real = GraphRealization.from_lists(ModelParams(c=1.0, lam=1.0, n=1), [[0.2, 0.5, 0.7]])
    path, dec = explore_realization(real)
    assert path.eta.tolist() == [0, 0, 0]
    assert path.z.tolist() == [0, -1, -2, -3]
    assert dec.signature() == [(1, 0)] * 3


def test_oracle_equivalence_sample():
    bad = 0
    for n in range(2, 31, 4):
        for seed in range(40):
            rng = np.random.default_rng([n, seed])
            params = ModelParams(c=rng.uniform(0.3, 3), lam=rng.uniform(0.3, 2), n=n)
            real = sample_realization(params, rng)
            path, dec = explore_realization(real)
            ref = decompose(real).signature()
            bad += dec.signature() != ref
            bad += sorted(((s.size, s.surplus) for s in component_stats(path)), reverse=True) != ref
    assert bad == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60), st.floats(0.2, 3.0), st.floats(-3, 3))
def test_walk_identities_both_engines(seed, n, c, a):
    params = window_params(c, a, n) if 1 + a / n ** (1 / 3) > 0.05 else ModelParams(c=c, lam=1.0, n=n)
    rng = np.random.default_rng(seed)
    lazy = explore_lazy(params, rng, 10 * n + 50)
    check_walk_identities(lazy)
    assert lazy.exhausted
    real, _ = explore_realization(sample_realization(params, rng))
    check_walk_identities(real)


def test_budget_respected(rng):
    path = explore_lazy(window_params(1.0, 0.0, 1000), rng, 37)
    assert path.steps == 37 and not path.exhausted
    with pytest.raises(DomainError):
        explore_lazy(window_params(1.0, 0.0, 10), rng, 0)


def test_rule_three_clipping():
    assert clipped_interval(0.5, 0.3, 0.9, 0.4, 0.1, 1.0) == (0.3, pytest.approx(0.6))
    # arc wrapping through zero
    start, end = clipped_interval(0.05, 0.8, 0.3, 0.1, 0.5, 1.0)
    assert start == pytest.approx(0.95) and end == 0.3


def test_first_step_mean_children():
    n = 10_000
    params = window_params(1.0, 0.0, n)
    law = CutGammaLaw(1.0)
    target = expected_first_eta(n, params.lam, law)
    assert abs(target - (1 - 1 / n) * mean_interval_length(1.0) / params.lam) < 1e-4
    ss = np.random.SeedSequence(2024)
    etas = np.array([explore_lazy(params, np.random.default_rng(s), 1).eta[0]
                     for s in ss.spawn(10_000)])
    se = etas.std(ddof=1) / np.sqrt(etas.size)
    assert abs(etas.mean() - target) < 3 * se


def test_lazy_matches_realization_first_component():
    params = window_params(1.0, 0.0, 10)
    rng = np.random.default_rng(77)
    lazy = [explore_lazy(params, rng, 10**6).tau_list[0] for _ in range(20_000)]
    real = [explore_realization(sample_realization(params, rng))[0].tau_list[0] for _ in range(20_000)]
    stat, dof, q999 = chi2_two_sample(lazy, real)
    assert dof >= 3
    assert stat < q999


def test_rescale_walk_examples():
    zero = walk_from_eta(1000, np.ones(500, dtype=int))
    f = rescale_walk(zero)
    assert np.all(f(np.linspace(0, 0.5, 11)) == 0)
    eta = np.ones(10_000, dtype=int)
    eta[:300] = 2
    g = rescale_walk(walk_from_eta(10**6, eta))
    assert g(1.0) == pytest.approx(3.0)
    assert g(0.0) == 0
    with pytest.raises(HorizonError):
        g(1.5)


def test_component_stats_examples():
    path = walk_from_eta(3, [1, 0, 0])
    assert [(s.size, s.surplus) for s in component_stats(path)] == [(2, 0), (1, 0)]
    path = walk_from_eta(3, [0, 0, 0])
    assert [(s.size, s.surplus) for s in component_stats(path)] == [(1, 0)] * 3
    partial = walk_from_eta(10, [2, 1, 0])
    spans = component_stats(partial)
    assert sum(s.size for s in spans) == 3 and not spans[-1].complete


def test_visit_counts_first_step(rng):
    path = explore_lazy(window_params(1.0, 0.0, 500), rng, 1)
    nu = visit_counts(path)
    assert nu[1][1] == 1 and nu[0][1] == 499


def test_jsonl_export(tmp_path, two_vertex_path):
    path, _ = explore_realization(GraphRealization.from_json(two_vertex_path.read_text()))
    plain = tmp_path / "walk.jsonl"
    packed = tmp_path / "walk.jsonl.gz"
    path.write_jsonl(plain)
    path.write_jsonl(packed, compress=True)
    rows = [json.loads(line) for line in plain.read_text().splitlines()]
    assert rows[0] == {"k": 1, "eta": 1, "A": 1, "Z": 0, "iota": 1, "surplus_delta": 0}
    assert gzip.decompress(packed.read_bytes()).decode() == plain.read_text()


def test_dominating_injected_increments():
    walk = dominating_from_xi([1] * 10, 0.99)
    assert np.all(walk.s == 1)
    assert walk.s_star == pytest.approx(1 + np.arange(11) * 0.01)
    assert np.all(walk.s_star >= walk.s)
    stopped = dominating_from_xi([0, 5, 5], 0.99, level=10)
    assert stopped.gamma == 1 and stopped.s[-1] == 0


def test_overcount_walk_mean_xi_and_stopping(rng):
    params = window_params(1.0, 0.0, 10_000)
    mean_xi = offspring_mean(params)
    assert mean_xi < 1 and mean_xi == pytest.approx(1.0, abs=1e-3)
    vals = []
    for _ in range(2000):
        w = overcount_walk(params, rng, 20, 20_000)
        assert w.gamma is not None
        assert w.s[-1] <= 0 or w.s_star[-1] > 20
        vals.append(w.stopped_value)
    vals = np.array(vals)
    assert abs(vals.mean() - 1) < 3 * vals.std(ddof=1) / np.sqrt(vals.size)
    with pytest.raises(DomainError):
        overcount_walk(params, rng, 0.5, 10)


def test_free_walk_basics(rng):
    one = free_walk(ModelParams(c=1.0, lam=1.0, n=1), rng, 10)
    assert one.steps == 1 and one.eta_f.tolist() == [0]
    assert free_count(100, 2, 3) == 95
    fw = free_walk(window_params(1.0, 0.0, 50), rng, 10_000)
    for k in range(1, fw.steps + 1):
        assert fw.n_f[k] == max(free_count(50, fw.a_f[k], k), 0)
    assert fw.a_f[-1] == 0 and fw.n_f[-1] == 0


def test_stochastic_sandwich():
    n = 10_000
    params = window_params(1.0, 0.0, n)
    k = int(np.floor(n ** (2 / 3)))
    ak, af = [], []
    for r in range(500):
        rng = np.random.default_rng([9, r])
        ak.append(_stopped_at(explore_lazy(params, rng, k).active, k))
        af.append(_stopped_at(free_walk(params, rng, k).a_f, k))
    ak, af = np.array(ak, float), np.array(af, float)
    pooled = np.hypot(ak.std(ddof=1), af.std(ddof=1)) / np.sqrt(500)
    assert af.mean() <= ak.mean() + 3 * pooled
    # the centred walk has mean one at every fixed step
    assert ak.mean() <= 1 + 3 * ak.std(ddof=1) / np.sqrt(500)
