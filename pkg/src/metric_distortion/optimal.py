"""Instance-optimal randomized social choice by linear programming.

``build_best_dist`` assembles the min-max LP mechanically: for each reference
facility ``o`` it dualizes the adversary LP, keeps the dual rows with the
lottery left symbolic, and bounds the dual objective by ``gamma``.
``build_best_dist_dual`` writes down the dual family of per-facility metrics
directly, so the two builds can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .adversary import (NORM_ROW, Lottery, build_adversary_lp, dvar, objective_template,
                        solve_adversary)
from .lp import LinearProgram, LpBuilder, SolverError, dualize, solve
from .metric import Metric, PointSpace, check_consistency, check_triangle, pairs, triangle_rows
from .profile import PreferenceProfile

TIGHT_TOL = 1e-6
GAMMA = "gamma"
PHI = "phi"


def qvar(f: str) -> str:
    return f"q[{f}]"


def yprefix(o: str) -> str:
    return f"y[{o}]:"


def dprefix(o: str) -> str:
    return f"{o}:"


@dataclass(frozen=True)
class OptimalResult:
    gamma: float
    q: Lottery
    tight_os: tuple[str, ...]
    multipliers: dict[str, dict[str, float]] = field(repr=False)
    adversary_values: dict[str, float] = field(default_factory=dict)

    def to_json(self, dual_phi: float | None = None) -> dict:
        out = {"gamma": self.gamma, "q": self.q.as_dict(), "tight_os": list(self.tight_os)}
        if dual_phi is not None:
            out["dual_phi"] = dual_phi
        return out


@dataclass(frozen=True)
class DualMetricsResult:
    phi: float
    metrics: dict[str, Metric]


def build_best_dist(profile: PreferenceProfile) -> LinearProgram:
    b = LpBuilder("min", "best-dist")
    for f in profile.facilities:
        b.var(qvar(f))
    b.var(GAMMA)
    template = objective_template(profile)
    for o in profile.facilities:
        # zero objective: the rows below put the lottery back in symbolically
        dual = dualize(build_adversary_lp(profile, {}, o))
        pre = yprefix(o)
        for v in dual.variables:
            b.var(pre + v, free=v in dual.free)
        for row in dual.constraints:
            terms = {pre + v: a for v, a in row.terms.items()}
            for f, w in template.get(row.name, {}).items():
                terms[qvar(f)] = -w
            b.add(f"[{o}]{row.name}", terms, row.relation, 0.0)
        terms = {pre + v: a for v, a in dual.objective.items()}
        terms[GAMMA] = -1.0
        b.add(f"[{o}]value", terms, "<=", 0.0)
    b.add("total", {qvar(f): 1.0 for f in profile.facilities}, ">=", 1.0)
    b.objective = {GAMMA: 1.0}
    return b.build()


def build_best_dist_dual(profile: PreferenceProfile) -> LinearProgram:
    space = PointSpace.from_profile(profile)
    k = len(profile.groups)
    w = profile.weights
    b = LpBuilder("max", "best-dist-dual")
    b.var(PHI)
    for o in profile.facilities:
        for i, j in pairs(len(space)):
            b.var(dprefix(o) + dvar(space, i, j))
    norm = {}
    for o in profile.facilities:
        oi = k + profile.facility_index(o)
        for g in range(k):
            norm[dprefix(o) + dvar(space, g, oi)] = float(w[g])
    b.add(NORM_ROW, norm, "<=", 1.0)
    for fi, f in enumerate(profile.facilities):
        terms = {PHI: 1.0}
        for o in profile.facilities:
            for g in range(k):
                terms[dprefix(o) + dvar(space, g, k + fi)] = -float(w[g])
        b.add(f"phi[{f}]", terms, "<=", 0.0)
    p = space.points
    for o in profile.facilities:
        pre = dprefix(o)
        for g, group in enumerate(profile.groups):
            cols = [k + profile.facility_index(f) for f in group.ranking]
            for r in range(1, profile.m):
                b.add(f"{pre}cons[{p[g]},{r}]",
                      {pre + dvar(space, g, cols[r - 1]): 1.0, pre + dvar(space, g, cols[r]): -1.0}, "<=")
        for (x, y), z in triangle_rows(len(space)):
            b.add(f"{pre}tri[{p[x]},{p[y]};{p[z]}]",
                  {pre + dvar(space, x, y): 1.0, pre + dvar(space, x, z): -1.0, pre + dvar(space, y, z): -1.0}, "<=")
    b.objective = {PHI: 1.0}
    return b.build()


def extract_lottery(profile: PreferenceProfile, primal: dict[str, float]) -> Lottery:
    raw = [primal[qvar(f)] for f in profile.facilities]
    if min(raw) < -1e-9:
        raise SolverError(f"solver returned a negative probability {min(raw)!r}")
    raw = [max(v, 0.0) for v in raw]
    total = sum(raw)
    if total < 1 - 1e-6:
        raise SolverError(f"lottery mass {total!r} below 1")
    return Lottery(profile.facilities, tuple(v / total for v in raw))


def optimal_scf(profile: PreferenceProfile, backend: str | None = None) -> OptimalResult:
    lp = build_best_dist(profile)
    sol = solve(lp, backend=backend)
    if not sol.optimal:
        raise SolverError(f"Best-Dist LP ended with status {sol.status}")
    gamma = sol.primal[GAMMA]
    q = extract_lottery(profile, sol.primal)
    multipliers = {}
    for o in profile.facilities:
        pre = yprefix(o)
        multipliers[o] = {v[len(pre):]: x for v, x in sol.primal.items() if v.startswith(pre)}
    values = {o: solve_adversary(profile, q, o, backend).value for o in profile.facilities}
    tight = tuple(o for o in profile.facilities if abs(values[o] - gamma) <= TIGHT_TOL)
    return OptimalResult(gamma, q, tight, multipliers, values)


def optimal_dual_metrics(profile: PreferenceProfile, backend: str | None = None) -> DualMetricsResult:
    from .adversary import witness_metric

    lp = build_best_dist_dual(profile)
    sol = solve(lp, backend=backend)
    if not sol.optimal:
        raise SolverError(f"Best-Dist-Dual LP ended with status {sol.status}")
    metrics = {}
    for o in profile.facilities:
        metric = witness_metric(profile, sol.primal, dprefix(o))
        for report in (check_consistency(metric, profile), check_triangle(metric, 1e-9)):
            if not report.ok:
                raise SolverError(f"dual metric for {o} fails revalidation: {report.summary()}")
        metrics[o] = metric
    return DualMetricsResult(sol.objective, metrics)
