"""Metrics over client groups and facilities, shortest-path closures, and metric checks.

Distances live in a dense symmetric matrix. The same code runs on float64
arrays and on object arrays of ``Fraction`` (exact mode); only the dtype
differs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .checks import CheckReport, build_report
from .profile import PreferenceProfile

EPS_FEAS = 1e-9


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class PointSpace:
    points: tuple[str, ...]
    n_clients: int = 0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if len(set(self.points)) != len(self.points):
            raise MetricError("point identifiers must be unique")

    @classmethod
    def from_profile(cls, profile: PreferenceProfile) -> "PointSpace":
        return cls(profile.group_labels + profile.facilities, len(profile.groups))

    def __len__(self) -> int:
        return len(self.points)

    def index(self, point: str) -> int:
        try:
            return self.points.index(point)
        except ValueError:
            raise KeyError(f"unknown point {point!r}") from None

    @property
    def clients(self) -> tuple[str, ...]:
        return self.points[: self.n_clients]

    @property
    def facilities(self) -> tuple[str, ...]:
        return self.points[self.n_clients :]


@dataclass(frozen=True, eq=False)
class Metric:
    space: PointSpace
    dist: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.dist)
        k = len(self.space)
        if d.shape != (k, k):
            raise MetricError(f"distance matrix shape {d.shape} does not match {k} points")
        if any(d[i, i] != 0 for i in range(k)):
            raise MetricError("metric must have a zero diagonal")
        if (d != d.T).any():
            raise MetricError("metric must be symmetric")
        if (d < 0).any():
            raise MetricError("metric must be nonnegative")
        d = d.copy()
        d.flags.writeable = False
        object.__setattr__(self, "dist", d)

    @property
    def exact(self) -> bool:
        return self.dist.dtype == object

    def __call__(self, x: str, y: str):
        return self.dist[self.space.index(x), self.space.index(y)]

    def __eq__(self, other) -> bool:
        return isinstance(other, Metric) and self.space == other.space and bool((self.dist == other.dist).all())

    def scaled(self, t) -> "Metric":
        return Metric(self.space, self.dist * t)

    def to_json(self) -> dict[str, Any]:
        return {"points": list(self.space.points), "n_clients": self.space.n_clients,
                "dist": [[float(v) for v in row] for row in self.dist]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Metric":
        space = PointSpace(tuple(data["points"]), int(data.get("n_clients", 0)))
        return cls(space, np.array(data["dist"], dtype=float))


@dataclass(frozen=True)
class MetricGraph:
    space: PointSpace
    edges: tuple[tuple[str, str, Any], ...]
    colocate: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((u, v, w) for u, v, w in self.edges))
        object.__setattr__(self, "colocate", tuple(tuple(c) for c in self.colocate))
        names = set(self.space.points)
        for u, v, w in self.edges:
            if u not in names or v not in names:
                raise MetricError(f"edge ({u}, {v}) has an endpoint outside the space")
            if w < 0:
                raise MetricError(f"edge ({u}, {v}) has negative weight {w}")
        for group in self.colocate:
            for p in group:
                if p not in names:
                    raise MetricError(f"colocated point {p!r} not in the space")

    def scaled(self, t) -> "MetricGraph":
        return MetricGraph(self.space, tuple((u, v, w * t) for u, v, w in self.edges), self.colocate)

    def to_json(self) -> dict[str, Any]:
        return {
            "points": list(self.space.points),
            "n_clients": self.space.n_clients,
            "colocate": [list(c) for c in self.colocate],
            "edges": [[u, v, float(w)] for u, v, w in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any], space: PointSpace | None = None) -> "MetricGraph":
        if space is None:
            space = PointSpace(tuple(data["points"]), int(data.get("n_clients", 0)))
        elif "points" in data and tuple(data["points"]) != space.points:
            raise MetricError("graph points do not match the profile's point space")
        return cls(space, tuple((u, v, w) for u, v, w in data["edges"]), tuple(tuple(c) for c in data.get("colocate", ())))


def as_fraction(x) -> Fraction:
    """Exact value of a printed decimal; floats go through their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def metric_closure(graph: MetricGraph, exact: bool = False) -> Metric:
    """All-pairs shortest paths (Floyd-Warshall); colocated points become zero-weight edges."""
    space = graph.space
    k = len(space)
    if exact:
        inf = float("inf")
        d = np.full((k, k), inf, dtype=object)
        conv = as_fraction
        zero = Fraction(0)
    else:
        d = np.full((k, k), np.inf)
        conv = float
        zero = 0.0
    for i in range(k):
        d[i, i] = zero
    for u, v, w in graph.edges:
        i, j = space.index(u), space.index(v)
        w = conv(w)
        if w < d[i, j]:
            d[i, j] = d[j, i] = w
    for group in graph.colocate:
        idx = [space.index(p) for p in group]
        for i, j in itertools.combinations(idx, 2):
            d[i, j] = d[j, i] = zero
    # one pass is exact in rational mode; in floats, repeat until d[x, y] <= fl(d[x, z] + d[z, y]) holds everywhere
    changed = True
    while changed:
        changed = False
        for m in range(k):
            via = d[:, m : m + 1] + d[m : m + 1, :]
            better = via < d
            if better.any():
                d = np.where(better, via, d)
                changed = True
        if exact:
            break
    unreachable = np.argwhere(d == float("inf"))
    if len(unreachable):
        i, j = unreachable[0]
        raise MetricError(f"graph is disconnected: no path between {space.points[i]!r} and {space.points[j]!r}")
    return Metric(space, d)


def complete_graph(metric: Metric) -> MetricGraph:
    k = len(metric.space)
    pts = metric.space.points
    edges = tuple((pts[i], pts[j], metric.dist[i, j]) for i in range(k) for j in range(i + 1, k))
    return MetricGraph(metric.space, edges)


def _require_same_space(metric: Metric, profile: PreferenceProfile) -> None:
    if metric.space.points != PointSpace.from_profile(profile).points:
        raise MetricError("metric and profile have different point spaces")


def check_consistency(metric: Metric, profile: PreferenceProfile, tol: float = EPS_FEAS) -> CheckReport:
    """Every group must be no farther from its r-th choice than from its (r+1)-th."""
    _require_same_space(metric, profile)
    d = metric.dist
    k = len(profile.groups)
    items = []
    for g, group in enumerate(profile.groups):
        cols = [k + profile.facility_index(f) for f in group.ranking]
        for r in range(1, profile.m):
            items.append(((profile.group_labels[g], r), d[cols[r - 1], g] - d[cols[r], g]))
    return build_report("consistency", items, tol, len(items))


def check_triangle(metric: Metric, tol: float = 0.0) -> CheckReport:
    """Report triples (x, y, z) with d(x, y) > d(x, z) + d(z, y) + tol."""
    d = metric.dist
    k = len(metric.space)
    pts = metric.space.points
    if metric.exact:
        items = []
        for x, y, z in itertools.permutations(range(k), 3):
            if x < y:
                items.append(((pts[x], pts[y], pts[z]), d[x, y] - d[x, z] - d[z, y]))
        return build_report("triangle", items, tol, len(items))
    # excess[x, y, z] = d[x, y] - (d[x, z] + d[z, y]); the rounded sum is what a closure compares against
    excess = d[:, :, None] - (d[:, None, :] + d[None, :, :])
    idx = [(x, y, z) for x, y, z in itertools.permutations(range(k), 3) if x < y]
    items = (((pts[x], pts[y], pts[z]), float(excess[x, y, z])) for x, y, z in idx)
    return build_report("triangle", items, tol, len(idx))


def social_cost(metric: Metric, profile: PreferenceProfile, facility: str):
    _require_same_space(metric, profile)
    col = len(profile.groups) + profile.facility_index(facility)
    return sum(w * metric.dist[col, g] for g, w in enumerate(profile.weights))


def metric_from_pairs(space: PointSpace, values: dict[tuple[int, int], float], clip: float = EPS_FEAS) -> Metric:
    """Symmetric metric from unordered-pair values keyed by point index; tiny negatives are clipped."""
    k = len(space)
    d = np.zeros((k, k))
    for (i, j), v in values.items():
        if v < 0:
            if v < -clip:
                raise MetricError(f"negative distance {v} between {space.points[i]} and {space.points[j]}")
            v = 0.0
        d[i, j] = d[j, i] = v
    return Metric(space, d)


def pairs(k: int) -> Sequence[tuple[int, int]]:
    return [(i, j) for i in range(k) for j in range(i + 1, k)]


def triangle_rows(k: int) -> Iterable[tuple[tuple[int, int], int]]:
    """Each unordered triple in its three rotations, as (lhs pair, third point)."""
    for x, y, z in itertools.combinations(range(k), 3):
        yield (x, y), z
        yield (x, z), y
        yield (y, z), x
