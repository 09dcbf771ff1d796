"""Random walks that bound the exploration walk from above and below."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..params import CutGammaLaw, ModelParams


@dataclass(frozen=True)
class DominatingWalk:
    """``S_k = 1 + sum (xi_i - 1)`` and its centred version ``S*_k = 1 + sum (xi_i - E xi)``.

    Both arrays start with the value at ``k = 0``.  ``gamma`` is the stopping
    step, or ``None`` when the budget ran out first.
    """

    s_star: np.ndarray
    s: np.ndarray
    gamma: int | None
    level: float
    mean_xi: float

    @property
    def stopped_value(self) -> float:
        """``S*`` at the stopping step (or at the budget if not stopped)."""
        return float(self.s_star[-1])

    @property
    def exceeded(self) -> bool:
        return self.gamma is not None and self.s_star[self.gamma] > self.level


def offspring_mean(params: ModelParams) -> float:
    """``E xi = n E[1 - exp(-|I| / (lam n))]`` for ``xi ~ Bin(n, 1 - exp(-|I|/(lam n)))``."""
    law = CutGammaLaw(params.c)
    return params.n * (1.0 - law.laplace(1.0 / (params.lam * params.n)))


def dominating_from_xi(xi, mean_xi: float, level: float | None = None) -> DominatingWalk:
    """Build the walk from given increments, stopping at ``S = 0`` or ``S* > level``."""
    xi = np.asarray(xi, dtype=np.int64)
    s = np.concatenate(([1], 1 + np.cumsum(xi - 1)))
    k = np.arange(s.size)
    s_star = s + k * (1.0 - mean_xi)
    gamma = None
    if level is not None:
        stop = (s[1:] <= 0) | (s_star[1:] > level)
        hits = np.flatnonzero(stop)
        if hits.size:
            gamma = int(hits[0]) + 1
            s, s_star = s[:gamma + 1], s_star[:gamma + 1]
    return DominatingWalk(s_star=s_star, s=s, gamma=gamma,
                          level=np.inf if level is None else float(level), mean_xi=float(mean_xi))


def overcount_walk(params: ModelParams, rng: np.random.Generator, level: float,
                   budget: int, chunk: int = 256) -> DominatingWalk:
    """Simulate the over-counting walk until it is stopped or ``budget`` steps pass.

    Increments are drawn in blocks of ``chunk``; the stream consumed per block
    does not depend on where the walk stops inside it.
    """
    if level < 1:
        raise DomainError("level H must be at least 1")
    if budget < 1:
        raise DomainError("budget must be at least 1")
    law = CutGammaLaw(params.c)
    mean_xi = offspring_mean(params)
    scale = 1.0 / (params.lam * params.n)
    xs = []
    s, s_star, k = 1, 1.0, 0
    while k < budget:
        m = min(chunk, budget - k)
        lengths = law.sample(rng, m)
        xi = rng.binomial(params.n, -np.expm1(-lengths * scale))
        steps = np.arange(1, m + 1)
        s_blk = s + np.cumsum(xi - 1)
        star_blk = s_blk + (k + steps) * (1.0 - mean_xi)
        hits = np.flatnonzero((s_blk <= 0) | (star_blk > level))
        if hits.size:
            xs.append(xi[:hits[0] + 1])
            break
        xs.append(xi)
        s, k = int(s_blk[-1]), k + m
    walk = dominating_from_xi(np.concatenate(xs), mean_xi, level)
    return walk


@dataclass(frozen=True)
class FreeWalk:
    """Walk that only counts links to never-touched vertices.

    ``a_f`` and ``n_f`` include the ``k = 0`` values; ``eta_f[k - 1]`` is the
    step-``k`` child count.  ``n_f`` is clamped at zero.
    """

    a_f: np.ndarray
    n_f: np.ndarray
    eta_f: np.ndarray

    @property
    def steps(self) -> int:
        return int(self.eta_f.size)


def free_walk(params: ModelParams, rng: np.random.Generator, budget: int) -> FreeWalk:
    """Children at step ``k`` are ``Bin(N^f_{k-1}, 1 - exp(-|I| / (lam n)))``."""
    if budget < 1:
        raise DomainError("budget must be at least 1")
    n = params.n
    law = CutGammaLaw(params.c)
    scale = 1.0 / (params.lam * n)
    a_f = [1]
    n_f = [n - 1]
    eta_f = []
    a, free = 1, n - 1
    for k in range(1, budget + 1):
        length = law.sample(rng, 1)[0]
        eta = int(rng.binomial(free, -np.expm1(-length * scale))) if free > 0 else 0
        a = a + eta - 1 if a > 0 else eta
        raw = n - a - k - (1 if a == 0 else 0)
        free = max(raw, 0)
        eta_f.append(eta)
        a_f.append(a)
        n_f.append(free)
        if a == 0 and raw < 0:
            break
    return FreeWalk(a_f=np.asarray(a_f, dtype=np.int64), n_f=np.asarray(n_f, dtype=np.int64),
                    eta_f=np.asarray(eta_f, dtype=np.int64))
