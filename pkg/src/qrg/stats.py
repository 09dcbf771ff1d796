"""Estimators and distances used by the experiments."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps
from statsmodels.stats.proportion import proportion_confint

from .errors import DomainError


@dataclass(frozen=True, eq=False)
class OrderedVector:
    """Finite nonincreasing sequence of nonnegative reals (an element of l2-descending)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size and (np.any(~np.isfinite(v)) or v.min() < 0):
            raise DomainError("entries must be finite and nonnegative")
        if v.size > 1 and np.any(np.diff(v) > 0):
            raise DomainError("entries must be nonincreasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_unsorted(cls, xs) -> "OrderedVector":
        return cls(np.sort(np.asarray(xs, dtype=float))[::-1])

    def __len__(self):
        return self.values.size

    def __getitem__(self, k):
        return self.values[k]

    def __eq__(self, other):
        if isinstance(other, OrderedVector):
            other = other.values
        return np.array_equal(self.values, np.asarray(other, dtype=float))

    def top(self, k: int) -> np.ndarray:
        """First ``k`` entries, zero-padded."""
        out = np.zeros(k)
        m = min(k, self.values.size)
        out[:m] = self.values[:m]
        return out

    def scaled(self, factor: float) -> "OrderedVector":
        return OrderedVector(self.values * factor)


def l2_desc_distance(x, y) -> float:
    """Euclidean distance with the shorter vector zero-padded."""
    x = x.values if isinstance(x, OrderedVector) else np.asarray(x, dtype=float)
    y = y.values if isinstance(y, OrderedVector) else np.asarray(y, dtype=float)
    m = max(x.size, y.size)
    xp = np.zeros(m)
    yp = np.zeros(m)
    xp[:x.size] = x
    yp[:y.size] = y
    return float(np.sqrt(np.sum((xp - yp) ** 2)))


def ks_distance(sample_a, sample_b) -> float:
    """Sup-norm distance between the two empirical distribution functions."""
    a = np.asarray(sample_a, dtype=float).ravel()
    b = np.asarray(sample_b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise DomainError("both samples must be nonempty")
    with warnings.catch_warnings():
        # only the statistic is used; p-value fallbacks are irrelevant here
        warnings.simplefilter("ignore", RuntimeWarning)
        return float(sps.ks_2samp(a, b).statistic)


def wilson_interval(successes: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    if trials <= 0:
        raise DomainError("need at least one trial")
    lo, hi = proportion_confint(successes, trials, alpha=alpha, method="wilson")
    return float(lo), float(hi)


def empirical_tail(samples, thresholds, alpha: float = 0.05) -> list[tuple[float, float, tuple[float, float]]]:
    """``(t, P(X > t), Wilson interval)`` for each threshold."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("samples must be nonempty")
    out = []
    for t in thresholds:
        k = int(np.count_nonzero(x > t))
        out.append((float(t), k / x.size, wilson_interval(k, x.size, alpha)))
    return out


def loglog_slope(xs, ps) -> float:
    """Least-squares slope of ``log p`` against ``log x``; NaN unless every p is positive."""
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    if xs.size < 2 or np.any(ps <= 0) or np.any(xs <= 0):
        return math.nan
    slope, _ = np.polyfit(np.log(xs), np.log(ps), 1)
    return float(slope)


def binned_pmf(counts, top: int = 3) -> np.ndarray:
    """Empirical pmf over ``{0, 1, ..., top - 1, >= top}``."""
    x = np.asarray(counts, dtype=np.int64).ravel()
    if x.size == 0:
        raise DomainError("counts must be nonempty")
    return np.bincount(np.minimum(x, top), minlength=top + 1) / x.size


def tv_distance(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return float(0.5 * np.abs(p - q).sum())


def mean_and_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 2:
        return float(x.mean()) if x.size else math.nan, math.nan
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def chi2_two_sample(a, b, min_expected: float = 5.0) -> tuple[float, int, float]:
    """Chi-square homogeneity test of two integer samples.

    Sparse upper categories are pooled until every expected cell count is at
    least ``min_expected``.  Returns ``(statistic, dof, 0.999 quantile)``.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    top = int(max(a.max(), b.max()))
    ca = np.bincount(a, minlength=top + 1).astype(float)
    cb = np.bincount(b, minlength=top + 1).astype(float)
    share = a.size / (a.size + b.size)
    bins_a, bins_b = [], []
    acc_a = acc_b = 0.0
    for k in range(top + 1):
        acc_a += ca[k]
        acc_b += cb[k]
        tot = acc_a + acc_b
        if min(tot * share, tot * (1 - share)) >= min_expected:
            bins_a.append(acc_a)
            bins_b.append(acc_b)
            acc_a = acc_b = 0.0
    if acc_a + acc_b > 0:
        if bins_a:
            bins_a[-1] += acc_a
            bins_b[-1] += acc_b
        else:
            bins_a.append(acc_a)
            bins_b.append(acc_b)
    table = np.array([bins_a, bins_b])
    if table.shape[1] < 2:
        return 0.0, 0, math.inf
    stat, _, dof, _ = sps.chi2_contingency(table, correction=False)
    return float(stat), int(dof), float(sps.chi2.ppf(0.999, dof))
