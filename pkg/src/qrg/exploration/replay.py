"""Deterministic replay of the exploration over a pre-sampled realization."""
from __future__ import annotations

import heapq

import numpy as np

from ..graph import Decomposition, GraphRealization
from .walk import WalkPath, walk_from_eta

NEUTRAL, ACTIVE, EXPLORED = 0, 1, 2


class _Trace:
    """Per-step accumulator shared by both engines."""

    def __init__(self):
        self.eta: list[int] = []
        self.surplus: list[int] = []
        self.vertices: list[int] = []
        self.lengths: list[float] = []

    def add(self, vertex: int, length: float, eta: int, surplus: int) -> None:
        self.eta.append(eta)
        self.surplus.append(surplus)
        self.vertices.append(vertex)
        self.lengths.append(length)

    def path(self, n: int, exhausted: bool) -> WalkPath:
        return walk_from_eta(n, self.eta, self.surplus, self.vertices, self.lengths, exhausted)


def _seed_interval(real: GraphRealization, v: int) -> int:
    lo = int(real.interval_offsets[v])
    holes = real.holes_of(v)
    if holes.size and holes[0] == 0.0:
        return lo
    return int(real.locate(np.array([v]), np.array([0.0]))[0])


def explore_realization(real: GraphRealization, budget: int | None = None) -> tuple[WalkPath, Decomposition]:
    """Run the exploration over ``real`` until every interval is explored.

    Returns the walk and the component partition it induces.  Links into
    explored intervals are erased, links into active intervals are surplus,
    links into neutral intervals activate them.
    """
    n = real.params.n
    n_int = real.interval_vertex.size
    ivert = real.interval_vertex.tolist()
    istart = real.interval_start.tolist()
    ilen = real.interval_length.tolist()
    offsets = real.interval_offsets.tolist()

    adj: list[list[int]] = [[] for _ in range(n_int)]
    for u, w in zip(real.link_u.tolist(), real.link_v.tolist()):
        adj[u].append(w)
        adj[w].append(u)

    status = [NEUTRAL] * n_int
    touched = [False] * n
    label = [-1] * n_int
    comp_links: list[int] = []
    comp_surplus: list[int] = []
    trace = _Trace()
    heap: list[tuple[int, float, int]] = []
    next_free = 0
    active = 0
    explored = 0
    limit = n_int if budget is None else min(budget, n_int)

    def activate(q: int) -> None:
        nonlocal active
        status[q] = ACTIVE
        touched[ivert[q]] = True
        heapq.heappush(heap, (ivert[q], istart[q], q))
        active += 1

    def neutral_arc_start() -> int:
        # every vertex is touched here; take the neutral run with the smallest beginning point
        best = None
        for v in range(n):
            lo, hi = offsets[v], offsets[v + 1]
            size = hi - lo
            for m in range(lo, hi):
                if status[m] != NEUTRAL:
                    continue
                prev = lo + (m - lo - 1) % size
                if status[prev] == NEUTRAL:
                    continue
                key = (istart[m], v)
                if best is None or key < best[0]:
                    best = (key, m)
        return best[1]

    while explored < limit:
        if active > 0:
            _, _, q = heapq.heappop(heap)
            active -= 1
        else:
            while next_free < n and touched[next_free]:
                next_free += 1
            q = _seed_interval(real, next_free) if next_free < n else neutral_arc_start()
            comp_links.append(0)
            comp_surplus.append(0)
        status[q] = EXPLORED
        touched[ivert[q]] = True
        label[q] = len(comp_links) - 1
        explored += 1
        eta = 0
        extra = 0
        for r in adj[q]:
            s = status[r]
            if s == NEUTRAL:
                activate(r)
                eta += 1
            elif s == ACTIVE:
                extra += 1
        comp_links[-1] += eta + extra
        comp_surplus[-1] += extra
        trace.add(ivert[q], ilen[q], eta, extra)

    labels = np.asarray(label, dtype=np.int64)
    sizes = np.bincount(labels[labels >= 0], minlength=len(comp_links))
    decomp = Decomposition(
        labels=labels,
        sizes=sizes,
        links=np.asarray(comp_links, dtype=np.int64),
        surplus=np.asarray(comp_surplus, dtype=np.int64),
    )
    return trace.path(n, explored == n_int), decomp
