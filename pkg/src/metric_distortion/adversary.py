"""Worst-case consistent metric for a fixed lottery and reference facility.

For a lottery ``q`` and facility ``o`` the adversary maximizes the expected
weighted cost of ``q`` over metrics consistent with the profile, subject to
the weighted cost of ``o`` being at most 1. The distortion of ``q`` is the
largest such optimum over ``o``; an unbounded LP means infinite distortion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .lp import INFEASIBLE, UNBOUNDED, LinearProgram, LpBuilder, SolverError, solve
from .metric import (EPS_FEAS, Metric, PointSpace, check_consistency, check_triangle,
                     metric_from_pairs, pairs, social_cost, triangle_rows)
from .profile import PreferenceProfile

NORM_ROW = "norm"


@dataclass(frozen=True)
class Lottery:
    facilities: tuple[str, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "facilities", tuple(self.facilities))
        object.__setattr__(self, "probabilities", tuple(float(p) for p in self.probabilities))
        if len(self.facilities) != len(self.probabilities):
            raise ValueError("one probability per facility required")
        if any(p < 0 or math.isnan(p) for p in self.probabilities):
            raise ValueError("probabilities must be nonnegative")
        if abs(sum(self.probabilities) - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {sum(self.probabilities)!r}, not 1")

    @classmethod
    def from_mapping(cls, profile: PreferenceProfile, probs: Mapping[str, float], normalize: bool = False) -> "Lottery":
        unknown = set(probs) - set(profile.facilities)
        if unknown:
            raise ValueError(f"unknown facility {sorted(unknown)[0]!r} in lottery")
        values = [float(probs.get(f, 0.0)) for f in profile.facilities]
        if normalize:
            total = sum(values)
            values = [v / total for v in values]
        return cls(profile.facilities, tuple(values))

    @classmethod
    def point_mass(cls, profile: PreferenceProfile, facility: str) -> "Lottery":
        return cls.from_mapping(profile, {facility: 1.0})

    def __getitem__(self, facility: str) -> float:
        return self.probabilities[self.facilities.index(facility)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.facilities, self.probabilities))


@dataclass(frozen=True)
class AdversaryOutcome:
    o: str
    value: float
    witness: Metric | None

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.value)


@dataclass(frozen=True)
class DistortionResult:
    value: float
    o_star: str
    witness: Metric | None
    per_o: dict[str, float]

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.value)

    def to_json(self) -> dict:
        return {
            "value": None if self.unbounded else self.value,
            "o_star": self.o_star,
            "witness": None if self.witness is None else self.witness.to_json(),
            "unbounded": self.unbounded,
            "per_o": {o: (None if math.isinf(v) else v) for o, v in self.per_o.items()},
        }


def dvar(space: PointSpace, i: int, j: int) -> str:
    """Variable name for the distance between points ``i`` and ``j`` (order-free)."""
    if i > j:
        i, j = j, i
    return f"d[{space.points[i]},{space.points[j]}]"


def objective_template(profile: PreferenceProfile) -> dict[str, dict[str, float]]:
    """Objective coefficients with q left symbolic: ``{var: {facility: weight}}``."""
    space = PointSpace.from_profile(profile)
    k = len(profile.groups)
    out: dict[str, dict[str, float]] = {}
    for g, w in enumerate(profile.weights):
        for fi, f in enumerate(profile.facilities):
            out.setdefault(dvar(space, g, k + fi), {})[f] = float(w)
    return out


def build_adversary_lp(profile: PreferenceProfile, q: Lottery | Mapping[str, float], o: str) -> LinearProgram:
    if o not in profile.facilities:
        raise ValueError(f"{o!r} is not a facility")
    probs = q.as_dict() if isinstance(q, Lottery) else dict(q)
    space = PointSpace.from_profile(profile)
    k = len(profile.groups)
    b = LpBuilder("max", f"adversary[o={o}]")
    for i, j in pairs(len(space)):
        b.var(dvar(space, i, j))
    for v, coefs in objective_template(profile).items():
        c = sum(probs.get(f, 0.0) * w for f, w in coefs.items())
        if c:
            b.objective[v] = c
    oi = k + profile.facility_index(o)
    b.add(NORM_ROW, {dvar(space, g, oi): float(w) for g, w in enumerate(profile.weights)}, "<=", 1.0)
    for g, group in enumerate(profile.groups):
        cols = [k + profile.facility_index(f) for f in group.ranking]
        for r in range(1, profile.m):
            b.add(f"cons[{space.points[g]},{r}]",
                  {dvar(space, g, cols[r - 1]): 1.0, dvar(space, g, cols[r]): -1.0}, "<=")
    for (x, y), z in triangle_rows(len(space)):
        p = space.points
        b.add(f"tri[{p[x]},{p[y]};{p[z]}]",
              {dvar(space, x, y): 1.0, dvar(space, x, z): -1.0, dvar(space, y, z): -1.0}, "<=")
    return b.build()


def witness_metric(profile: PreferenceProfile, values: Mapping[str, float], prefix: str = "") -> Metric:
    space = PointSpace.from_profile(profile)
    return metric_from_pairs(space, {(i, j): values[prefix + dvar(space, i, j)] for i, j in pairs(len(space))})


def solve_adversary(profile: PreferenceProfile, q: Lottery, o: str, backend: str | None = None) -> AdversaryOutcome:
    lp = build_adversary_lp(profile, q, o)
    sol = solve(lp, backend=backend)
    if sol.status == UNBOUNDED:
        return AdversaryOutcome(o, math.inf, None)
    if sol.status == INFEASIBLE:
        raise SolverError(f"adversary LP for o={o} reported infeasible; the zero metric is always feasible")
    witness = witness_metric(profile, sol.primal)
    _revalidate(profile, witness, o)
    return AdversaryOutcome(o, sol.objective, witness)


def _revalidate(profile: PreferenceProfile, witness: Metric, o: str) -> None:
    for report in (check_consistency(witness, profile, EPS_FEAS), check_triangle(witness, EPS_FEAS)):
        if not report.ok:
            raise SolverError(f"adversary witness for o={o} fails revalidation: {report.summary()}")
    norm = social_cost(witness, profile, o)
    if norm > 1 + EPS_FEAS:
        raise SolverError(f"adversary witness for o={o} breaks normalization ({norm!r})")


def distortion_of(profile: PreferenceProfile, q: Lottery, backend: str | None = None) -> DistortionResult:
    """Worst case over reference facilities; ties keep the first facility in profile order."""
    best: AdversaryOutcome | None = None
    per_o = {}
    for o in profile.facilities:
        out = solve_adversary(profile, q, o, backend)
        per_o[o] = out.value
        if best is None or out.value > best.value:
            best = out
    return DistortionResult(best.value, best.o, best.witness, per_o)
