import csv
import json

import numpy as np
import pytest

from qrg.errors import DomainError
from qrg.limit import (Excursion, ExcursionSet, LimitParams, LimitPath, coarsen_normals, excursions,
                       limit_sample, ordered_pairs, reflect, sample_marks, simulate_w)
from qrg.params import critical_lambda


def _path(b, dt=1.0):
    b = np.asarray(b, dtype=float)
    return LimitPath(dt=dt, w=b.copy(), b=b, runmin=np.zeros_like(b))


def test_params_validation():
    with pytest.raises(DomainError):
        LimitParams(dt=2.0, horizon=1.0)
    with pytest.raises(DomainError):
        LimitParams(lam=0.0)
    with pytest.raises(DomainError):
        LimitParams(mark_rate_factor=-1.0)
    assert LimitParams(lam=2.0, c=4.0).rate_factor == 0.5
    assert LimitParams(lam=2.0, c=4.0, mark_rate_factor=1.0).rate_factor == 1.0


def test_noise_free_parabola():
    lp = LimitParams(a=1.0, lam=1.0, c=1.0, dt=1e-3, horizon=2.0)
    path = simulate_w(lp, noise=False)
    assert path.w[0] == 0
    assert path.w[1000] == pytest.approx(0.5, abs=2e-3)
    assert np.abs(path.w - lp.drift(path.times)).max() < 5 * lp.dt


def test_gaussian_moments_at_one():
    lp = LimitParams(a=0.0, lam=1.3, c=2.0, dt=1e-3, horizon=1.0)
    rng = np.random.default_rng(3)
    w1 = np.array([simulate_w(lp, rng).w[-1] for _ in range(10_000)])
    se = w1.std(ddof=1) / np.sqrt(w1.size)
    # the Euler drift sum is -(lam/c) dt^2 m(m-1)/2, which is -lam/2c up to O(dt)
    assert abs(w1.mean() + 1.3 / 4.0) < 3 * se + 1e-3
    assert abs(w1.var(ddof=1) - 1.0) < 0.05


def test_reflect_examples():
    path = reflect(LimitPath(dt=1.0, w=np.array([0, 0.5, -0.3, 0.2, -0.5])))
    assert path.runmin.tolist() == [0, 0, -0.3, -0.3, -0.5]
    assert path.b.tolist() == pytest.approx([0, 0.5, 0, 0.5, 0])
    up = reflect(LimitPath(dt=1.0, w=np.array([0.0, 1, 2, 5])))
    assert up.b.tolist() == [0, 1, 2, 5]
    down = reflect(LimitPath(dt=1.0, w=np.array([0.0, -1, -1, -3])))
    assert np.all(down.b == 0)


def test_reflection_properties(rng):
    path = reflect(simulate_w(LimitParams(a=0.5, horizon=3.0), rng))
    assert np.all(path.b >= 0) and path.b[0] == 0
    assert np.all(np.diff(path.runmin) <= 0)
    new_min = np.concatenate(([True], path.w[1:] < np.minimum.accumulate(path.w)[:-1]))
    assert np.all(path.b[new_min] == 0)


def test_excursion_examples():
    exc = excursions(_path([0, 0.5, 0, 0.5, 0]), min_length=1.0)
    assert exc.gamma == [1, 1]
    assert len(excursions(_path(np.zeros(10))).excursions) == 0
    pattern = _path([1, 1, 1, 0, 1, 1], dt=0.1)
    assert excursions(pattern, min_length=0.1, include_incomplete=True).gamma.values == pytest.approx([0.3, 0.2])
    # the run still open at the end of the grid is dropped by default
    assert excursions(pattern, min_length=0.1).gamma.values == pytest.approx([0.3])
    assert excursions(pattern, min_length=0.25, include_incomplete=True).gamma.values == pytest.approx([0.3])
    with pytest.raises(DomainError):
        excursions(pattern, min_length=0.05)


def test_marks_examples():
    lp = LimitParams(lam=1.0, c=1.0, dt=0.01, horizon=5.0)
    rng = np.random.default_rng(5)
    zero = _path(np.zeros(501), dt=0.01)
    assert sample_marks(zero, lp, rng).total_marks == 0
    const = _path(np.full(500, 2.0), dt=0.01)
    totals = np.array([sample_marks(const, lp, rng, factor=1.0).total_marks for _ in range(10_000)])
    assert abs(totals.mean() - 10.0) < 3 * totals.std(ddof=1) / np.sqrt(totals.size)
    assert sample_marks(const, lp, rng, factor=0.0).total_marks == 0
    with pytest.raises(DomainError):
        sample_marks(const, lp, rng, factor=-0.5)


def test_mark_compensator_with_frozen_path():
    lp = LimitParams(a=1.0, lam=critical_lambda(1.0), c=1.0, dt=1e-3, horizon=4.0)
    rng = np.random.default_rng(8)
    path = reflect(simulate_w(lp, rng))
    comp = lp.rate_factor * path.b.sum() * lp.dt
    diffs = np.array([sample_marks(path, lp, rng).total_marks - comp for _ in range(10_000)])
    assert abs(diffs.mean()) < 3 * diffs.std(ddof=1) / np.sqrt(diffs.size)


def test_marks_assigned_to_their_excursions(rng):
    lp = LimitParams(a=2.0, lam=1.0, c=1.0, dt=1e-3, horizon=6.0, mark_rate_factor=5.0)
    path, exc = limit_sample(lp, rng)
    assert sum(e.marks for e in exc.excursions) <= exc.total_marks
    for e in exc.excursions:
        assert e.length == pytest.approx(round(e.length / lp.dt) * lp.dt)
        assert np.all(path.b[e.start:e.start + round(e.length / lp.dt)] > 0)


def test_ordered_pairs():
    exc = ExcursionSet([Excursion(0, 2.0, 1), Excursion(10, 5.0, 0)], dt=1.0)
    assert ordered_pairs(exc) == [(5.0, 0), (2.0, 1)]
    assert ordered_pairs(ExcursionSet([], dt=1.0)) == []
    tie = ExcursionSet([Excursion(9, 3.0, 2), Excursion(1, 3.0, 7)], dt=1.0)
    assert ordered_pairs(tie) == [(3.0, 7), (3.0, 2)]


def test_grid_refinement_stability():
    lam = critical_lambda(1.0)
    fine = LimitParams(a=1.0, lam=lam, c=1.0, dt=5e-4, horizon=8.0)
    coarse = fine.with_dt(1e-3)
    rng = np.random.default_rng(21)
    longest = {"fine": [], "coarse": []}
    for _ in range(5000):
        g = rng.standard_normal(fine.steps)
        for key, lp, normals in (("fine", fine, g), ("coarse", coarse, coarsen_normals(g))):
            path = reflect(simulate_w(lp, normals=normals))
            gam = excursions(path, min_length=5e-3).gamma
            longest[key].append(gam[0] if len(gam) else 0.0)
    mf, mc = np.mean(longest["fine"]), np.mean(longest["coarse"])
    assert abs(mf - mc) / mf < 0.02


def test_exports(tmp_path, rng):
    lp = LimitParams(a=1.0, horizon=2.0, dt=0.01)
    path, exc = limit_sample(lp, rng, include_incomplete=True)
    target = tmp_path / "path.csv"
    path.write_csv(target)
    rows = list(csv.reader(target.open()))
    assert rows[0] == ["s", "w", "b"] and len(rows) == lp.steps + 2
    assert float(rows[-1][1]) == path.w[-1]
    doc = json.loads(exc.to_json())
    assert [set(d) for d in doc] == [{"start", "length", "marks"}] * len(doc)
