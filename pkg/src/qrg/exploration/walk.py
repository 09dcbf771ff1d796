"""The exploration trace and the quantities read off it."""
from __future__ import annotations

import gzip
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import HorizonError


@dataclass(frozen=True)
class WalkPath:
    """Trace of an exploration run over ``K`` steps.

    Step ``k`` (1-based) explores one interval.  Arrays indexed by step hold
    entry ``k - 1``; ``active`` and ``z`` also hold the initial values
    ``A_0 = 1`` and ``Z_0 = 0`` and so have length ``K + 1``.
    """

    n: int
    eta: np.ndarray
    active: np.ndarray
    z: np.ndarray
    surplus: np.ndarray
    vertices: np.ndarray
    lengths: np.ndarray
    exhausted: bool

    @property
    def steps(self) -> int:
        return int(self.eta.size)

    @property
    def iota(self) -> np.ndarray:
        """Component index of the interval explored at step ``i``: ``1 - min_{j<i} Z(j)``."""
        return 1 - np.minimum.accumulate(self.z[:-1])

    @property
    def tau_list(self) -> list[int]:
        """Steps at which a component is completed (``A_k = 0``)."""
        return (np.flatnonzero(self.active[1:] == 0) + 1).tolist()

    @property
    def surplus_marks(self) -> list[tuple[int, int]]:
        ks = np.flatnonzero(self.surplus)
        return [(int(k) + 1, int(self.surplus[k])) for k in ks]

    @property
    def nu(self) -> dict[int, np.ndarray]:
        return visit_counts(self)

    def records(self):
        """One dict per step: ``k, eta, A, Z, iota, surplus_delta``."""
        iota = self.iota
        for k in range(1, self.steps + 1):
            yield {
                "k": k,
                "eta": int(self.eta[k - 1]),
                "A": int(self.active[k]),
                "Z": int(self.z[k]),
                "iota": int(iota[k - 1]),
                "surplus_delta": int(self.surplus[k - 1]),
            }

    def write_jsonl(self, path, compress: bool = False) -> None:
        opener = gzip.open if compress else open
        with opener(path, "wt", encoding="utf-8") as fh:
            for rec in self.records():
                fh.write(json.dumps(rec) + "\n")


class ComponentSpan(NamedTuple):
    size: int
    surplus: int
    complete: bool


def _cbrt(n: int) -> float:
    return float(np.cbrt(n))


def rescale_walk(path: WalkPath, n: int | None = None):
    """Return ``s -> n^{-1/3} Z(floor(n^{2/3} s))`` as a (vectorized) function.

    Raises :class:`HorizonError` when ``floor(n^{2/3} s)`` exceeds the explored steps.
    """
    n = path.n if n is None else n
    if path.steps < 1:
        raise HorizonError("path has no steps")
    root = _cbrt(n)
    scale = root * root

    def zbar(s):
        s_arr = np.asarray(s, dtype=float)
        x = s_arr * scale
        # guard against n^{2/3} s landing a hair below an integer
        k = np.floor(x + 1e-9 * np.maximum(1.0, np.abs(x))).astype(np.int64)
        if np.any(k < 0) or np.any(k > path.steps):
            raise HorizonError(f"s beyond explored horizon {path.steps / scale:.6g}")
        out = path.z[k] / root
        return float(out) if out.ndim == 0 else out

    zbar.horizon = path.steps / scale
    return zbar


def component_stats(path: WalkPath, n: int | None = None) -> list[ComponentSpan]:
    """Components read off the walk: they close where ``Z`` hits a new minimum."""
    z = path.z
    prior_min = np.minimum.accumulate(z)[:-1]
    closes = np.flatnonzero(z[1:] < prior_min) + 1
    spans = []
    prev = 0
    csum = np.concatenate(([0], np.cumsum(path.surplus)))
    for k in closes:
        spans.append(ComponentSpan(int(k - prev), int(csum[k] - csum[prev]), True))
        prev = int(k)
    if prev < path.steps:
        spans.append(ComponentSpan(path.steps - prev, int(csum[-1] - csum[prev]), False))
    return spans


def visit_counts(path: WalkPath) -> dict[int, np.ndarray]:
    """``m -> nu_m`` where ``nu_m[k]`` counts vertices with exactly ``m`` explored
    intervals after ``k`` steps (``k = 0..K``)."""
    n, steps = path.n, path.steps
    seen = np.zeros(n, dtype=np.int64)
    # occurrence index of each step's vertex: how many times it was explored before
    prior = np.empty(steps, dtype=np.int64)
    for k, v in enumerate(path.vertices.tolist()):
        prior[k] = seen[v]
        seen[v] += 1
    top = int(seen.max()) if steps else 0
    out = {}
    for m in range(top + 1):
        delta = (prior == m - 1).astype(np.int64) - (prior == m).astype(np.int64)
        series = np.concatenate(([n if m == 0 else 0], delta)).cumsum()
        out[m] = series
    return out


def expected_first_eta(n: int, lam: float, law) -> float:
    """Mean children of the first interval: ``(n - 1) E[1 - exp(-|I| / (lam n))]``."""
    return (n - 1) * (1.0 - law.laplace(1.0 / (lam * n)))


def free_count(n: int, active: int, k: int) -> int:
    """Free vertices after ``k`` steps of the free walk: ``n - A - k - [A = 0]``."""
    return n - active - k - (1 if active == 0 else 0)


def walk_from_eta(n: int, eta, surplus=None, vertices=None, lengths=None, exhausted=False) -> WalkPath:
    """Assemble a :class:`WalkPath` from per-step child counts."""
    eta = np.asarray(eta, dtype=np.int64)
    steps = eta.size
    z = np.concatenate(([0], np.cumsum(eta - 1)))
    active = np.empty(steps + 1, dtype=np.int64)
    active[0] = 1
    a = 1
    for k in range(steps):
        a = a + eta[k] - 1 if a > 0 else eta[k]
        active[k + 1] = a
    return WalkPath(
        n=n,
        eta=eta,
        active=active,
        z=z,
        surplus=np.zeros(steps, dtype=np.int64) if surplus is None else np.asarray(surplus, dtype=np.int64),
        vertices=np.zeros(steps, dtype=np.int64) if vertices is None else np.asarray(vertices, dtype=np.int64),
        lengths=np.full(steps, math.nan) if lengths is None else np.asarray(lengths, dtype=float),
        exhausted=exhausted,
    )
