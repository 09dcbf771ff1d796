"""Drifted Brownian motion, its reflection at the running minimum, excursions and marks."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError
from .stats import OrderedVector


@dataclass(frozen=True)
class LimitParams:
    """Drift ``a s - (lam / 2c) s^2`` on the grid ``0, dt, ..., horizon``.

    ``mark_rate_factor`` multiplies ``b`` in the mark intensity; ``None``
    means ``lam / c``.
    """

    a: float = 0.0
    lam: float = 1.0
    c: float = 1.0
    dt: float = 1e-3
    horizon: float = 8.0
    mark_rate_factor: float | None = None

    def __post_init__(self):
        for name in ("lam", "c", "dt", "horizon"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a positive finite number, got {v!r}")
        if not math.isfinite(self.a):
            raise DomainError("a must be finite")
        if self.dt > self.horizon:
            raise DomainError("dt must not exceed the horizon")
        if self.steps > 10**9:
            raise DomainError("horizon / dt is too large for one grid")
        if self.mark_rate_factor is not None and not self.mark_rate_factor >= 0:
            raise DomainError("mark_rate_factor must be nonnegative")

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.dt))

    @property
    def curvature(self) -> float:
        return self.lam / self.c

    @property
    def rate_factor(self) -> float:
        return self.curvature if self.mark_rate_factor is None else float(self.mark_rate_factor)

    def drift(self, s):
        """``a s - (lam / 2c) s^2``."""
        s = np.asarray(s, dtype=float)
        return self.a * s - 0.5 * self.curvature * s * s

    def with_dt(self, dt: float) -> "LimitParams":
        return replace(self, dt=dt)


@dataclass
class LimitPath:
    dt: float
    w: np.ndarray
    b: np.ndarray | None = None
    runmin: np.ndarray | None = None

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.w.size) * self.dt

    def write_csv(self, path) -> None:
        if self.b is None:
            raise DomainError("path is not reflected yet")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh)
            out.writerow(["s", "w", "b"])
            for s, w, b in zip(self.times.tolist(), self.w.tolist(), self.b.tolist()):
                out.writerow([repr(s), repr(w), repr(b)])


@dataclass(frozen=True)
class Excursion:
    start: int
    length: float
    marks: int = 0
    complete: bool = True


@dataclass
class ExcursionSet:
    """Excursions kept after filtering; ``runs`` holds ``(start, stop)`` grid index ranges."""

    excursions: list
    dt: float
    runs: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.int64))
    total_marks: int = 0

    @property
    def gamma(self) -> OrderedVector:
        return OrderedVector.from_unsorted([e.length for e in self.excursions])

    def to_json(self) -> str:
        return json.dumps([{"start": e.start, "length": e.length, "marks": e.marks}
                           for e in self.excursions])


def simulate_w(params: LimitParams, rng: np.random.Generator | None = None, *,
               noise: bool = True, normals=None) -> LimitPath:
    """Euler grid ``w_{i+1} = w_i + a dt - (lam/c) s_i dt + sqrt(dt) G_i`` with ``w_0 = 0``.

    ``normals`` may supply the ``G_i`` directly (for coupled paths).
    """
    m, dt = params.steps, params.dt
    s = np.arange(m) * dt
    inc = params.a * dt - params.curvature * s * dt
    if normals is not None:
        g = np.asarray(normals, dtype=float)
        if g.shape != (m,):
            raise DomainError(f"expected {m} normals, got shape {g.shape}")
        inc = inc + math.sqrt(dt) * g
    elif noise:
        if rng is None:
            raise DomainError("rng required when noise is enabled")
        inc = inc + math.sqrt(dt) * rng.standard_normal(m)
    w = np.concatenate(([0.0], np.cumsum(inc)))
    return LimitPath(dt=dt, w=w)


def coarsen_normals(normals) -> np.ndarray:
    """Normals for the grid of step ``2 dt`` driven by the same Brownian path."""
    g = np.asarray(normals, dtype=float)
    if g.size % 2:
        raise DomainError("need an even number of normals")
    return (g[0::2] + g[1::2]) / math.sqrt(2.0)


def reflect(path: LimitPath) -> LimitPath:
    """Fill ``runmin`` and ``b = w - runmin`` in one pass."""
    runmin = np.minimum.accumulate(path.w)
    path.runmin = runmin
    path.b = path.w - runmin
    return path


def _positive_runs(b: np.ndarray) -> np.ndarray:
    pos = np.concatenate(([False], b > 0, [False])).astype(np.int8)
    edges = np.diff(pos)
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    return np.stack([starts, stops], axis=1)


def excursions(path: LimitPath, min_length: float | None = None,
               include_incomplete: bool = False) -> ExcursionSet:
    """Maximal runs of grid points with ``b > 0``; length is ``run size * dt``.

    Runs shorter than ``min_length`` (default ``5 dt``) are dropped, as are
    runs still open at the last grid point unless ``include_incomplete``.
    """
    if path.b is None:
        raise DomainError("path is not reflected yet")
    dt = path.dt
    if min_length is None:
        min_length = 5 * dt
    if min_length < dt * (1 - 1e-12):
        raise DomainError("min_length must be at least dt")
    runs = _positive_runs(path.b)
    keep = (runs[:, 1] - runs[:, 0]) * dt >= min_length * (1 - 1e-12)
    open_end = runs[:, 1] == path.b.size
    if not include_incomplete:
        keep &= ~open_end
    runs = runs[keep]
    open_end = open_end[keep]
    exc = [Excursion(start=int(a), length=float((b - a) * dt), complete=not bool(o))
           for (a, b), o in zip(runs.tolist(), open_end.tolist())]
    return ExcursionSet(excursions=exc, dt=dt, runs=runs)


def sample_marks(path: LimitPath, params: LimitParams, rng: np.random.Generator,
                 exc: ExcursionSet | None = None, factor: float | None = None) -> ExcursionSet:
    """Poisson marks with intensity ``factor * b``: ``Poisson(factor b_i dt)`` per grid cell.

    Each excursion receives the marks of the cells it covers.
    """
    if path.b is None:
        raise DomainError("path is not reflected yet")
    factor = params.rate_factor if factor is None else factor
    if not factor >= 0:
        raise DomainError("mark rate factor must be nonnegative")
    if exc is None:
        exc = excursions(path)
    counts = rng.poisson(factor * path.b * path.dt)
    csum = np.concatenate(([0], np.cumsum(counts)))
    marked = [replace(e, marks=int(csum[b] - csum[a]))
              for e, (a, b) in zip(exc.excursions, exc.runs.tolist())]
    return ExcursionSet(excursions=marked, dt=exc.dt, runs=exc.runs, total_marks=int(csum[-1]))


def ordered_pairs(exc: ExcursionSet) -> list[tuple[float, int]]:
    """``(length, marks)`` by decreasing length; ties go to the earlier start."""
    order = sorted(exc.excursions, key=lambda e: (-e.length, e.start))
    return [(e.length, e.marks) for e in order]


def limit_sample(params: LimitParams, rng: np.random.Generator, min_length: float | None = None,
                 include_incomplete: bool = False) -> tuple[LimitPath, ExcursionSet]:
    """Simulate, reflect, cut into excursions and mark them."""
    path = reflect(simulate_w(params, rng))
    exc = excursions(path, min_length, include_incomplete)
    return path, sample_marks(path, params, rng, exc)
