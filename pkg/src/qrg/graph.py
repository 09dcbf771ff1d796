"""Full realizations of the quantum random graph and their exact decomposition.

A realization stores every hole point of every vertex circle and every link
point of every vertex pair.  Holes live in one flat array sorted by
(vertex, time) with CSR-style offsets; links live in three parallel arrays
sorted by (i, j, t) with ``i < j``.  Nothing in here ever iterates over the
``n (n - 1) / 2`` pairs, so sampling stays linear in the number of points.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, FixtureError, RejectedRealizationError
from .params import ModelParams
from .stats import OrderedVector


@dataclass(frozen=True)
class Interval:
    """A maximal hole-free arc ``(start, start + length)`` (mod c) of one vertex circle."""

    vertex: int
    start: float
    length: float
    full_circle: bool = False

    def contains(self, t: float, c: float) -> bool:
        if self.full_circle:
            return True
        offset = (t - self.start) % c
        return 0.0 < offset < self.length


class GraphRealization:
    """Holes and links of one sampled (or hand-built) graph.

    Instances are treated as immutable; the arrays are flagged read-only.
    Construction validates ordering, ranges and the coincidence rule, and
    resolves each link endpoint to the interval that contains it.
    """

    def __init__(self, params: ModelParams, hole_times, hole_offsets, link_i, link_j, link_t):
        self.params = params
        n, c = params.n, params.c
        self.hole_times = np.ascontiguousarray(hole_times, dtype=float)
        self.hole_offsets = np.ascontiguousarray(hole_offsets, dtype=np.int64)
        self.link_i = np.ascontiguousarray(link_i, dtype=np.int64)
        self.link_j = np.ascontiguousarray(link_j, dtype=np.int64)
        self.link_t = np.ascontiguousarray(link_t, dtype=float)
        self._validate(n, c)

        counts = np.diff(self.hole_offsets)
        per_vertex = np.maximum(counts, 1)
        self.interval_offsets = np.concatenate(([0], np.cumsum(per_vertex)))
        self._build_intervals(counts)
        self.link_u = self.locate(self.link_i, self.link_t)
        self.link_v = self.locate(self.link_j, self.link_t)
        for arr in (self.hole_times, self.hole_offsets, self.link_i, self.link_j, self.link_t,
                    self.link_u, self.link_v, self.interval_offsets):
            arr.setflags(write=False)

    # -- construction -------------------------------------------------------------

    def _validate(self, n, c):
        h, off = self.hole_times, self.hole_offsets
        if off.shape != (n + 1,) or off[0] != 0 or off[-1] != h.size or np.any(np.diff(off) < 0):
            raise DomainError("hole offsets do not describe n vertices")
        if h.size:
            if not np.all(np.isfinite(h)) or h.min() < 0 or h.max() >= c:
                raise DomainError("hole times must lie in [0, c)")
            same_vertex = np.ones(h.size - 1, dtype=bool)
            cuts = off[1:-1]
            same_vertex[cuts[(cuts > 0) & (cuts < h.size)] - 1] = False
            gaps = np.diff(h)
            if np.any(gaps[same_vertex] <= 0):
                raise DomainError("hole times within a vertex must be strictly increasing")
        m = self.link_t.size
        if not (self.link_i.size == self.link_j.size == m):
            raise DomainError("link arrays differ in length")
        if m:
            if self.link_i.min() < 0 or self.link_j.max() >= n or np.any(self.link_i >= self.link_j):
                raise DomainError("links need 0 <= i < j < n")
            t = self.link_t
            if not np.all(np.isfinite(t)) or t.min() < 0 or t.max() >= c:
                raise DomainError("link times must lie in [0, c)")
            key_same = (np.diff(self.link_i) == 0) & (np.diff(self.link_j) == 0)
            if np.any(np.diff(self.link_i) < 0) or np.any((np.diff(self.link_i) == 0) & (np.diff(self.link_j) < 0)):
                raise DomainError("links must be sorted by (i, j, t)")
            if np.any(np.diff(t)[key_same] <= 0):
                raise DomainError("link times within a pair must be strictly increasing")

    def _build_intervals(self, counts):
        n, c = self.params.n, self.params.c
        h, off = self.hole_times, self.hole_offsets
        total = int(self.interval_offsets[-1])
        vertex = np.repeat(np.arange(n), np.maximum(counts, 1))
        start = np.zeros(total)
        length = np.full(total, c)
        full = np.zeros(total, dtype=bool)

        empty = counts == 0
        full[self.interval_offsets[:-1][empty]] = True
        if h.size:
            hole_vertex = np.repeat(np.arange(n), counts)
            ids = np.arange(h.size) + np.cumsum(empty)[hole_vertex]
            nxt = np.empty_like(h)
            nxt[:-1] = h[1:]
            last = off[1:][counts > 0] - 1
            nxt[last] = h[off[:-1][counts > 0]] + c
            lengths = nxt - h
            lengths[last[counts[counts > 0] == 1]] = c
            start[ids] = h
            length[ids] = lengths
        self.interval_vertex = vertex
        self.interval_start = start
        self.interval_length = length
        self.interval_full = full
        for arr in (vertex, start, length, full):
            arr.setflags(write=False)

    @classmethod
    def from_lists(cls, params: ModelParams, holes, links=()) -> "GraphRealization":
        """Build from per-vertex hole lists and ``(i, j, times)`` link triples.

        Hole and link times are sorted here; pairs may be given in either order.
        """
        n = params.n
        if len(holes) != n:
            raise DomainError(f"expected {n} hole lists, got {len(holes)}")
        hole_lists = [sorted(float(x) for x in hv) for hv in holes]
        offsets = np.concatenate(([0], np.cumsum([len(hv) for hv in hole_lists])))
        flat = np.array([x for hv in hole_lists for x in hv], dtype=float)
        rows = []
        for i, j, ts in links:
            i, j = int(i), int(j)
            if i == j:
                raise DomainError(f"self-link on vertex {i}")
            i, j = min(i, j), max(i, j)
            rows.extend((i, j, float(t)) for t in ts)
        rows.sort()
        li = np.array([r[0] for r in rows], dtype=np.int64)
        lj = np.array([r[1] for r in rows], dtype=np.int64)
        lt = np.array([r[2] for r in rows], dtype=float)
        return cls(params, flat, offsets, li, lj, lt)

    # -- queries ------------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def c(self) -> float:
        return self.params.c

    @property
    def n_intervals(self) -> int:
        return int(self.interval_offsets[-1])

    @property
    def n_links(self) -> int:
        return int(self.link_t.size)

    def holes_of(self, v: int) -> np.ndarray:
        return self.hole_times[self.hole_offsets[v]:self.hole_offsets[v + 1]]

    def pair_links(self) -> dict:
        """``{(i, j): times}`` for every pair carrying at least one link."""
        out = {}
        if not self.n_links:
            return out
        keys = np.stack([self.link_i, self.link_j], axis=1)
        bounds = np.flatnonzero(np.any(np.diff(keys, axis=0) != 0, axis=1)) + 1
        for lo, hi in zip(np.concatenate(([0], bounds)), np.concatenate((bounds, [self.n_links]))):
            out[(int(self.link_i[lo]), int(self.link_j[lo]))] = self.link_t[lo:hi]
        return out

    def interval(self, idx: int) -> Interval:
        return Interval(
            vertex=int(self.interval_vertex[idx]),
            start=float(self.interval_start[idx]),
            length=float(self.interval_length[idx]),
            full_circle=bool(self.interval_full[idx]),
        )

    def locate(self, vertices, times) -> np.ndarray:
        """Interval ids containing ``(vertex, time)`` points.

        Raises :class:`RejectedRealizationError` if a time coincides exactly
        with a hole of that vertex.
        """
        v = np.asarray(vertices, dtype=np.int64)
        t = np.asarray(times, dtype=float)
        lo = self.hole_offsets[v].copy()
        hi = self.hole_offsets[v + 1].copy()
        start = lo.copy()
        h = self.hole_times
        if h.size:
            while True:
                active = lo < hi
                if not active.any():
                    break
                mid = (lo + hi) // 2
                le = active & (h[np.where(active, mid, 0)] <= t)
                lo = np.where(le, mid + 1, lo)
                hi = np.where(active & ~le, mid, hi)
        rank = lo - start
        k = self.hole_offsets[v + 1] - start
        if h.size:
            hit = (rank > 0) & (h[np.maximum(lo - 1, 0)] == t)
            if hit.any():
                bad = int(np.flatnonzero(hit)[0])
                raise RejectedRealizationError(
                    f"time {float(t[bad])!r} coincides with a hole of vertex {int(v[bad])}"
                )
        m = np.where(k == 0, 0, np.where(rank == 0, k - 1, rank - 1))
        return self.interval_offsets[v] + m

    # -- transforms and serialization -------------------------------------------

    def permuted(self, perm) -> "GraphRealization":
        """The same graph with vertex ``v`` renamed ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        holes = [None] * self.n
        for v in range(self.n):
            holes[int(perm[v])] = self.holes_of(v).tolist()
        links = [(int(perm[i]), int(perm[j]), ts.tolist()) for (i, j), ts in self.pair_links().items()]
        return GraphRealization.from_lists(self.params, holes, links)

    def to_json_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "holes": [self.holes_of(v).tolist() for v in range(self.n)],
            "links": [{"i": i, "j": j, "ts": ts.tolist()} for (i, j), ts in self.pair_links().items()],
        }

    def to_json(self) -> str:
        # repr-based float output is the shortest string that round-trips exactly
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, doc) -> "GraphRealization":
        """Parse and revalidate; schema problems raise :class:`FixtureError` naming the field."""
        if not isinstance(doc, dict):
            raise FixtureError("$", "document must be a JSON object")
        for key in ("params", "holes", "links"):
            if key not in doc:
                raise FixtureError(key, "missing")
        p = doc["params"]
        if not isinstance(p, dict):
            raise FixtureError("params", "must be an object")
        for key in ("c", "lambda", "n"):
            if key not in p:
                raise FixtureError(f"params.{key}", "missing")
            if not _is_number(p[key]):
                raise FixtureError(f"params.{key}", f"must be a number, got {p[key]!r}")
        try:
            params = ModelParams.from_dict(p)
        except DomainError as exc:
            raise FixtureError("params", str(exc)) from None
        holes = doc["holes"]
        if not isinstance(holes, list) or len(holes) != params.n:
            raise FixtureError("holes", f"must be a list of {params.n} lists")
        for v, hv in enumerate(holes):
            if not isinstance(hv, list):
                raise FixtureError(f"holes[{v}]", "must be a list")
            for q, x in enumerate(hv):
                if not _is_number(x) or not (0 <= x < params.c):
                    raise FixtureError(f"holes[{v}][{q}]", f"must be a number in [0, c), got {x!r}")
            if len(set(hv)) != len(hv):
                raise FixtureError(f"holes[{v}]", "hole times must be distinct")
        links = doc["links"]
        if not isinstance(links, list):
            raise FixtureError("links", "must be a list")
        triples = []
        seen = set()
        for q, rec in enumerate(links):
            where = f"links[{q}]"
            if not isinstance(rec, dict) or not {"i", "j", "ts"} <= set(rec):
                raise FixtureError(where, "must be an object with keys i, j, ts")
            i, j, ts = rec["i"], rec["j"], rec["ts"]
            for name, val in (("i", i), ("j", j)):
                if not isinstance(val, int) or isinstance(val, bool) or not 0 <= val < params.n:
                    raise FixtureError(f"{where}.{name}", f"must be a vertex id in [0, {params.n})")
            if i == j:
                raise FixtureError(where, "self-links are not allowed")
            pair = (min(i, j), max(i, j))
            if pair in seen:
                raise FixtureError(where, f"pair {pair} listed twice")
            seen.add(pair)
            if not isinstance(ts, list):
                raise FixtureError(f"{where}.ts", "must be a list")
            for r, x in enumerate(ts):
                if not _is_number(x) or not (0 <= x < params.c):
                    raise FixtureError(f"{where}.ts[{r}]", f"must be a number in [0, c), got {x!r}")
            if len(set(ts)) != len(ts):
                raise FixtureError(f"{where}.ts", "link times must be distinct")
            triples.append((i, j, ts))
        try:
            return cls.from_lists(params, holes, triples)
        except RejectedRealizationError as exc:
            raise FixtureError("links", str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "GraphRealization":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FixtureError("$", f"malformed JSON ({exc})") from None
        return cls.from_json_dict(doc)

    def __eq__(self, other):
        if not isinstance(other, GraphRealization):
            return NotImplemented
        return (
            self.params == other.params
            and np.array_equal(self.hole_offsets, other.hole_offsets)
            and np.array_equal(self.hole_times, other.hole_times)
            and np.array_equal(self.link_i, other.link_i)
            and np.array_equal(self.link_j, other.link_j)
            and np.array_equal(self.link_t, other.link_t)
        )

    __hash__ = None

    def __repr__(self):
        return (f"GraphRealization(n={self.n}, c={self.c}, holes={self.hole_times.size}, "
                f"links={self.n_links})")


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def sample_realization(params: ModelParams, rng: np.random.Generator) -> GraphRealization:
    """Sample holes (rate 1 per circle) and links (rate ``1/(lam n)`` per pair).

    The total link count is drawn once and pairs are assigned uniformly,
    which is equivalent to independent Poisson counts per pair.
    """
    n, c = params.n, params.c
    counts = rng.poisson(c, size=n)
    total = int(counts.sum())
    hole_vertex = np.repeat(np.arange(n), counts)
    hole_times = rng.random(total) * c
    order = np.lexsort((hole_times, hole_vertex))
    hole_times = hole_times[order]
    offsets = np.concatenate(([0], np.cumsum(counts)))

    if n >= 2:
        m = int(rng.poisson(c * (n - 1) / (2.0 * params.lam)))
        a = rng.integers(0, n, size=m)
        b = rng.integers(0, n - 1, size=m)
        b = b + (b >= a)
        li, lj = np.minimum(a, b), np.maximum(a, b)
        lt = rng.random(m) * c
        order = np.lexsort((lt, lj, li))
        li, lj, lt = li[order], lj[order], lt[order]
    else:
        li = lj = np.zeros(0, dtype=np.int64)
        lt = np.zeros(0)
    return GraphRealization(params, hole_times, offsets, li, lj, lt)


def intervals_of(realization: GraphRealization) -> list[Interval]:
    """All intervals, indexed by interval id (vertex-major, then by starting hole)."""
    return [realization.interval(q) for q in range(realization.n_intervals)]


@dataclass(frozen=True)
class Decomposition:
    """Connected components over intervals.

    ``labels[q]`` is the component of interval ``q``; ``sizes``, ``links`` and
    ``surplus`` are indexed by component.
    """

    labels: np.ndarray
    sizes: np.ndarray
    links: np.ndarray
    surplus: np.ndarray

    @property
    def n_components(self) -> int:
        return int(self.sizes.size)

    @property
    def ordered_sizes(self) -> OrderedVector:
        return OrderedVector(np.sort(self.sizes)[::-1])

    @property
    def components(self) -> list[dict]:
        order = np.argsort(self.labels, kind="stable")
        bounds = np.concatenate(([0], np.cumsum(self.sizes)))
        return [
            {"intervals": order[bounds[k]:bounds[k + 1]].tolist(),
             "links": int(self.links[k]), "surplus": int(self.surplus[k])}
            for k in range(self.n_components)
        ]

    def signature(self) -> list[tuple[int, int]]:
        """Sorted ``(size, surplus)`` pairs: the partition up to relabeling."""
        return sorted(zip(self.sizes.tolist(), self.surplus.tolist()), reverse=True)


def decompose(realization: GraphRealization) -> Decomposition:
    """Exact components: intervals joined whenever a link time lies in both."""
    size = realization.n_intervals
    u, v = realization.link_u, realization.link_v
    graph = coo_matrix((np.ones(u.size, dtype=np.int8), (u, v)), shape=(size, size)).tocsr()
    count, labels = connected_components(graph, directed=False)
    sizes = np.bincount(labels, minlength=count)
    links = np.bincount(labels[u], minlength=count) if u.size else np.zeros(count, dtype=np.int64)
    surplus = links - (sizes - 1)
    return Decomposition(labels=labels, sizes=sizes, links=links, surplus=surplus)


def component_of_point(realization: GraphRealization, vertex: int, t: float,
                       decomposition: Decomposition | None = None) -> int:
    """Component id of the interval holding time ``t`` on ``vertex``."""
    if not 0 <= vertex < realization.n:
        raise DomainError(f"vertex {vertex} out of range")
    if not 0 <= t < realization.c:
        raise DomainError(f"time {t} outside [0, c)")
    if t in set(realization.holes_of(vertex).tolist()):
        raise DomainError(f"time {t} is a hole of vertex {vertex}")
    dec = decomposition if decomposition is not None else decompose(realization)
    idx = realization.locate([vertex], [t])[0]
    return int(dec.labels[idx])
