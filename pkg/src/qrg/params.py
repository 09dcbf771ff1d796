"""Parameter algebra: cut-gamma interval law, critical curve, critical window.

Everything is expressed with circle length ``c``, unit-rate holes and a
per-pair link intensity ``1/(lam * n)``.  The (beta, lam) form of the
critical curve is only reachable through :func:`critical_curve_F`, with
``c = lam * beta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def _check_positive(name, value):
    if not isinstance(value, (int, float, np.integer, np.floating)) or isinstance(value, bool):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return float(value)


def mean_interval_length(c: float) -> float:
    """Mean length of the interval around a point: ``2(1 - e^-c) - c e^-c``."""
    c = _check_positive("c", c)
    return -2.0 * math.expm1(-c) - c * math.exp(-c)


def critical_curve_F(beta: float, lam: float) -> float:
    """``F(beta, lam) = (2/lam)(1 - e^{-lam beta}) - beta e^{-lam beta}``; criticality is F = 1."""
    beta = _check_positive("beta", beta)
    lam = _check_positive("lambda", lam)
    x = lam * beta
    return (2.0 / lam) * -math.expm1(-x) - beta * math.exp(-x)


def critical_lambda(c: float) -> float:
    """The link normalizer putting ``(lam, c)`` exactly on the critical curve."""
    return mean_interval_length(c)


@dataclass(frozen=True)
class ModelParams:
    """Circle length ``c``, link normalizer ``lam``, window parameter ``a``, vertex count ``n``."""

    c: float
    lam: float
    a: float = 0.0
    n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "c", _check_positive("c", self.c))
        object.__setattr__(self, "lam", _check_positive("lambda", self.lam))
        if not math.isfinite(self.a):
            raise DomainError(f"a must be finite, got {self.a!r}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "n", int(self.n))

    @property
    def link_rate(self) -> float:
        """Intensity of each pair's link process on the circle."""
        return 1.0 / (self.lam * self.n)

    @property
    def links_per_pair(self) -> float:
        return self.c * self.link_rate

    @property
    def window_factor(self) -> float:
        return 1.0 + self.a / float(np.cbrt(self.n))

    def to_dict(self) -> dict:
        return {"c": self.c, "lambda": self.lam, "a": self.a, "n": self.n}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        return cls(c=d["c"], lam=d["lambda"], a=d.get("a", 0.0), n=d["n"])


def window_params(c: float, a: float, n: int) -> ModelParams:
    """Parameters in the critical window: ``mean_interval_length(c) = lam (1 + a n^{-1/3})``."""
    c = _check_positive("c", c)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    if not math.isfinite(a):
        raise DomainError(f"a must be finite, got {a!r}")
    factor = 1.0 + a / float(np.cbrt(n))
    if factor <= 0:
        raise DomainError(
            f"1 + a n^(-1/3) = {factor:.6g} <= 0: window leaves the parameter quarter-plane"
        )
    return ModelParams(c=c, lam=mean_interval_length(c) / factor, a=a, n=int(n))


def exp_from_uniform(u):
    """Unit-rate exponential by inversion of a uniform in [0, 1)."""
    return -np.log1p(-u)


@dataclass(frozen=True)
class CutGammaLaw:
    """Law of ``min(U + V, c)`` for independent unit exponentials U, V.

    Density ``x e^{-x}`` on (0, c) plus an atom of mass ``(1 + c) e^{-c}`` at c.
    """

    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", _check_positive("c", self.c))

    @property
    def atom_mass(self) -> float:
        return (1.0 + self.c) * math.exp(-self.c)

    @property
    def mean(self) -> float:
        return mean_interval_length(self.c)

    def cdf(self, x):
        """Distribution function; jumps to 1 at ``c``."""
        x = np.asarray(x, dtype=float)
        inside = 1.0 - np.exp(-x) * (1.0 + x)
        out = np.where(x < self.c, inside, 1.0)
        return np.where(x <= 0, 0.0, out)

    def laplace(self, theta: float) -> float:
        """``E exp(-theta |I|)`` in closed form."""
        c = self.c
        b = 1.0 + theta
        # integral_0^c x e^{-b x} dx
        partial = (1.0 - math.exp(-b * c) * (1.0 + b * c)) / (b * b)
        return partial + self.atom_mass * math.exp(-theta * c)

    def sample(self, rng, size=None):
        """Vectorized draws; two uniforms per draw, consumed in (U, V) order."""
        if size is None:
            return sample_cut_gamma(self, rng)
        u = rng.random((int(size), 2))
        e = exp_from_uniform(u)
        return np.minimum(e[:, 0] + e[:, 1], self.c)

    def ks_continuous(self, samples) -> float:
        """Kolmogorov distance between the sample ECDF and the law, over the continuous part [0, c)."""
        x = np.sort(np.asarray(samples, dtype=float))
        n = x.size
        if n == 0:
            raise DomainError("empty sample")
        cont = x[x < self.c]
        m = cont.size
        if m == 0:
            return float(self.cdf(np.nextafter(self.c, 0.0)))
        f = self.cdf(cont)
        upper = np.arange(1, m + 1) / n - f
        lower = f - np.arange(0, m) / n
        # the ECDF just left of c must also match the law's left limit there
        tail = abs(m / n - (1.0 - self.atom_mass))
        return float(max(upper.max(), lower.max(), tail))


def sample_cut_gamma(law: CutGammaLaw, rng) -> float:
    """One draw of ``min(U + V, c)``; U and V come from ``rng.random(2)`` by inversion."""
    u = rng.random(2)
    e = exp_from_uniform(u)
    return float(min(e[0] + e[1], law.c))
