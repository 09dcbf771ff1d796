"""Exploration that samples holes and links only when the walk reaches them."""
from __future__ import annotations

import heapq
import itertools
import math

import numpy as np

from ..errors import DomainError
from ..params import ModelParams
from .replay import ACTIVE, EXPLORED, _Trace
from .walk import WalkPath


def _wrap(x: float, c: float) -> float:
    y = x % c
    # (-tiny) % c rounds to c in floating point
    return 0.0 if y >= c else y


class Arc:
    """A discovered interval on one circle: ``(start, end)`` read anticlockwise."""

    __slots__ = ("vertex", "start", "end", "full", "status")

    def __init__(self, vertex: int, start: float, end: float, full: bool):
        self.vertex = vertex
        self.start = start
        self.end = end
        self.full = full
        self.status = ACTIVE

    def length(self, c: float) -> float:
        if self.full:
            return c
        return (self.end - self.start) % c

    def contains(self, t: float) -> bool:
        if self.full:
            return True
        if self.start < self.end:
            return self.start < t < self.end
        return t > self.start or t < self.end

    def __repr__(self):
        return f"Arc(v={self.vertex}, {self.start:.6g}->{self.end:.6g}, full={self.full})"


def clipped_interval(s: float, t1: float, t2: float, u: float, v: float, c: float) -> tuple[float, float]:
    """Interval grown from ``s`` inside the neutral arc ``(t1, t2)``.

    The left edge moves ``u`` back from ``s`` and the right edge ``v``
    forward, each stopping at the arc boundary.  Boundaries are copied
    exactly so neighbouring arcs share endpoints.
    """
    dl = (s - t1) % c
    dr = (t2 - s) % c
    start = t1 if u >= dl else _wrap(s - u, c)
    end = t2 if v >= dr else _wrap(s + v, c)
    return start, end


class LazyExplorer:
    """State of one lazily sampled exploration."""

    def __init__(self, params: ModelParams, rng: np.random.Generator):
        self.params = params
        self.rng = rng
        self.n = params.n
        self.c = params.c
        self.rate = 1.0 / (params.lam * params.n)
        self.arcs: dict[int, list[Arc]] = {}
        self.heap: list = []
        self.uid = itertools.count()
        self.next_free = 0
        self.active = 0
        self.trace = _Trace()
        self.exhausted = False

    # -- interval creation ----------------------------------------------------

    def _exp_pair(self) -> tuple[float, float]:
        u = self.rng.random(2)
        return -math.log1p(-u[0]), -math.log1p(-u[1])

    def _fresh(self, w: int, t: float) -> Arc:
        left, right = self._exp_pair()
        if left + right >= self.c:
            arc = Arc(w, t, t, True)
        else:
            arc = Arc(w, _wrap(t - left, self.c), _wrap(t + right, self.c), False)
        self.arcs[w] = [arc]
        return arc

    def _bounds(self, arcs: list[Arc], t: float) -> tuple[float, float]:
        c = self.c
        left = min(arcs, key=lambda a: (t - a.end) % c)
        right = min(arcs, key=lambda a: (a.start - t) % c)
        return left.end, right.start

    def _grow(self, w: int, t: float, arcs: list[Arc]) -> Arc:
        t1, t2 = self._bounds(arcs, t)
        left, right = self._exp_pair()
        start, end = clipped_interval(t, t1, t2, left, right, self.c)
        arc = Arc(w, start, end, False)
        arcs.append(arc)
        return arc

    def _push(self, arc: Arc) -> None:
        heapq.heappush(self.heap, (arc.vertex, arc.start, next(self.uid), arc))
        self.active += 1

    # -- restarts ---------------------------------------------------------------

    def _neutral_start(self) -> Arc | None:
        """Interval beginning at the smallest neutral-arc start across vertices."""
        c = self.c
        best = None
        for w in range(self.n):
            arcs = self.arcs[w]
            if arcs[0].full:
                continue
            ordered = sorted(arcs, key=lambda a: a.start)
            for i, a in enumerate(ordered):
                b = ordered[(i + 1) % len(ordered)]
                if a.end != b.start:
                    key = (a.end, w)
                    if best is None or key < best[0]:
                        best = (key, a, b)
        if best is None:
            return None
        (_, w), a, b = best
        gap = (b.start - a.end) % c
        if gap == 0.0:
            gap = c
        e = -math.log1p(-self.rng.random())
        end = _wrap(a.end + e, c) if e < gap else b.start
        arc = Arc(w, a.end, end, False)
        self.arcs[w].append(arc)
        return arc

    def _restart(self) -> Arc | None:
        while self.next_free < self.n and self.next_free in self.arcs:
            self.next_free += 1
        if self.next_free < self.n:
            return self._fresh(self.next_free, 0.0)
        return self._neutral_start()

    # -- main loop ----------------------------------------------------------------

    def step(self) -> bool:
        """Explore one interval; False once nothing is left to explore."""
        if self.active > 0:
            arc = heapq.heappop(self.heap)[3]
            self.active -= 1
        else:
            arc = self._restart()
            if arc is None:
                self.exhausted = True
                return False
        arc.status = EXPLORED
        n, c = self.n, self.c
        length = arc.length(c)
        eta = 0
        extra = 0
        if n > 1:
            m = int(self.rng.poisson(length * (n - 1) * self.rate))
            if m:
                targets = self.rng.integers(0, n - 1, size=m)
                targets += targets >= arc.vertex
                times = arc.start + length * self.rng.random(m)
                times = np.where(times >= c, times - c, times)
                order = np.lexsort((times, targets))
                for w, t in zip(targets[order].tolist(), times[order].tolist()):
                    arcs = self.arcs.get(w)
                    if arcs is None:
                        self._push(self._fresh(w, t))
                        eta += 1
                        continue
                    hit = next((a for a in arcs if a.contains(t)), None)
                    if hit is None:
                        self._push(self._grow(w, t, arcs))
                        eta += 1
                    elif hit.status == ACTIVE:
                        extra += 1
                    # explored: the link lies in a region already examined, drop it
        self.trace.add(arc.vertex, length, eta, extra)
        return True

    def run(self, budget: int) -> WalkPath:
        for _ in range(budget):
            if not self.step():
                break
        return self.trace.path(self.n, self.exhausted)


def explore_lazy(params: ModelParams, rng: np.random.Generator, budget: int) -> WalkPath:
    """Run ``budget`` explorations (or until exhaustion), sampling on demand."""
    if budget < 1:
        raise DomainError("budget must be at least 1")
    return LazyExplorer(params, rng).run(budget)
