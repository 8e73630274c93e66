"""Linear-program model, mechanical dualization, feasibility checks and solving.

Variables are either nonnegative or free. Constraints are named rows
``sum(coef * var) (<=|>=|=) rhs``. ``solve`` goes through one narrow seam so
the embedded simplex can be swapped for scipy's HiGHS (``backend="highs"`` or
the ``METRIC_DISTORTION_SOLVER`` environment variable).

Dual values reported by ``solve`` are shadow prices, d(objective)/d(rhs).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import simplex
from .checks import CheckReport, build_report
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, SolverError

__all__ = [
    "Constraint", "LinearProgram", "LpBuilder", "LpSolution", "LpError", "SolverError",
    "OPTIMAL", "INFEASIBLE", "UNBOUNDED", "dualize", "solve", "check_feasible", "dump",
]

EPS_FEAS = 1e-9
EPS_GAP = 1e-7
EPS_CS = 1e-6

RELATIONS = ("<=", ">=", "=")


class LpError(ValueError):
    pass


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: Mapping[str, float]
    relation: str
    rhs: float = 0.0

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise LpError(f"constraint {self.name!r}: unknown relation {self.relation!r}")


@dataclass(frozen=True, eq=False)
class LinearProgram:
    sense: str
    variables: tuple[str, ...]
    objective: Mapping[str, float]
    constraints: tuple[Constraint, ...]
    free: frozenset[str] = frozenset()
    name: str = ""
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise LpError(f"sense must be 'max' or 'min', got {self.sense!r}")
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "free", frozenset(self.free))
        index = {v: k for k, v in enumerate(self.variables)}
        if len(index) != len(self.variables):
            raise LpError("duplicate variable name")
        object.__setattr__(self, "_index", index)
        for v in self.free:
            if v not in index:
                raise LpError(f"free variable {v!r} not declared")
        for v in self.objective:
            if v not in index:
                raise LpError(f"objective references undeclared variable {v!r}")
        names = set()
        for con in self.constraints:
            if con.name in names:
                raise LpError(f"duplicate constraint name {con.name!r}")
            names.add(con.name)
            for v in con.terms:
                if v not in index:
                    raise LpError(f"constraint {con.name!r} references undeclared variable {v!r}")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.constraints), len(self.variables)

    def column(self, var: str) -> int:
        return self._index[var]

    def constraint(self, name: str) -> Constraint:
        for con in self.constraints:
            if con.name == name:
                return con
        raise KeyError(name)

    def matrix(self):
        """Dense ``(A, b, relations, c, free_mask)`` in declaration order."""
        A = np.zeros(self.shape)
        for i, con in enumerate(self.constraints):
            for v, a in con.terms.items():
                A[i, self._index[v]] += a
        b = np.array([con.rhs for con in self.constraints], dtype=float)
        c = np.zeros(len(self.variables))
        for v, a in self.objective.items():
            c[self._index[v]] += a
        free = np.array([v in self.free for v in self.variables], dtype=bool)
        return A, b, [con.relation for con in self.constraints], c, free


class LpBuilder:
    """Accumulates variables and rows; ``build()`` freezes them into a LinearProgram."""

    def __init__(self, sense: str, name: str = ""):
        self.sense = sense
        self.name = name
        self.variables: list[str] = []
        self.free: set[str] = set()
        self.objective: dict[str, float] = {}
        self.constraints: list[Constraint] = []

    def var(self, name: str, free: bool = False) -> str:
        self.variables.append(name)
        if free:
            self.free.add(name)
        return name

    def add(self, name: str, terms: Mapping[str, float], relation: str, rhs: float = 0.0) -> None:
        self.constraints.append(Constraint(name, dict(terms), relation, rhs))

    def build(self) -> LinearProgram:
        return LinearProgram(self.sense, tuple(self.variables), dict(self.objective),
                             tuple(self.constraints), frozenset(self.free), self.name)


@dataclass(frozen=True)
class LpSolution:
    status: str
    objective: float | None = None
    primal: dict[str, float] = field(default_factory=dict)
    dual: dict[str, float] = field(default_factory=dict)
    iterations: int = 0
    backend: str = "simplex"

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def dualize(lp: LinearProgram) -> LinearProgram:
    """Standard LP dual. Dual variables carry the primal row names, dual rows the primal variable names.

    Rows pointing the "wrong" way for the sense (``>=`` in a max, ``<=`` in a
    min) are negated first, so every dual variable is nonnegative or free.
    For such rows the dual variable is the negated shadow price.
    """
    maximize = lp.sense == "max"
    natural = "<=" if maximize else ">="
    cols: dict[str, dict[str, float]] = {v: {} for v in lp.variables}
    objective = {}
    free = set()
    for con in lp.constraints:
        s = -1.0 if con.relation not in (natural, "=") else 1.0
        if con.relation == "=":
            free.add(con.name)
        for v, a in con.terms.items():
            if a:
                cols[v][con.name] = cols[v].get(con.name, 0.0) + s * a
        if con.rhs:
            objective[con.name] = s * con.rhs
    dual_rel = ">=" if maximize else "<="
    rows = []
    for v in lp.variables:
        rel = "=" if v in lp.free else dual_rel
        rows.append(Constraint(v, cols[v], rel, float(lp.objective.get(v, 0.0))))
    return LinearProgram(
        "min" if maximize else "max",
        tuple(con.name for con in lp.constraints),
        objective,
        tuple(rows),
        frozenset(free),
        f"dual({lp.name})" if lp.name else "dual",
    )


def default_backend() -> str:
    return os.environ.get("METRIC_DISTORTION_SOLVER", "simplex")


def solve(lp: LinearProgram, backend: str | None = None, via_dual: bool | None = None) -> LpSolution:
    """Solve ``lp``. ``via_dual`` (default: automatic) solves the mechanical dual instead.

    The dual route is only taken when the origin is feasible, so an
    infeasible dual unambiguously means an unbounded primal.
    """
    backend = backend or default_backend()
    if via_dual is None:
        m, n = lp.shape
        via_dual = m > 2 * n and _origin_feasible(lp)
    if via_dual:
        if not _origin_feasible(lp):
            raise LpError("dual route needs a feasible origin")
        return _solve_via_dual(lp, backend)
    return _solve_direct(lp, backend)


def _origin_feasible(lp: LinearProgram) -> bool:
    for con in lp.constraints:
        if con.relation == "<=" and con.rhs < 0:
            return False
        if con.relation == ">=" and con.rhs > 0:
            return False
        if con.relation == "=" and con.rhs != 0:
            return False
    return True


def _solve_direct(lp: LinearProgram, backend: str) -> LpSolution:
    A, b, rel, c, free = lp.matrix()
    maximize = lp.sense == "max"
    if backend == "simplex":
        res = simplex.solve_dense(c, A, b, rel, free, maximize=maximize)
    elif backend == "highs":
        res = _solve_highs(c, A, b, rel, free, maximize)
    else:
        raise LpError(f"unknown solver backend {backend!r}")
    if res.status != OPTIMAL:
        return LpSolution(res.status, iterations=res.iterations, backend=backend)
    primal = dict(zip(lp.variables, map(float, res.x)))
    dual = {con.name: float(y) for con, y in zip(lp.constraints, res.y)}
    return LpSolution(OPTIMAL, res.objective, primal, dual, res.iterations, backend)


def _solve_via_dual(lp: LinearProgram, backend: str) -> LpSolution:
    dlp = dualize(lp)
    dsol = _solve_direct(dlp, backend)
    if dsol.status == INFEASIBLE:
        return LpSolution(UNBOUNDED, iterations=dsol.iterations, backend=backend)
    if dsol.status == UNBOUNDED:
        return LpSolution(INFEASIBLE, iterations=dsol.iterations, backend=backend)
    maximize = lp.sense == "max"
    natural = "<=" if maximize else ">="
    # primal values are the shadow prices of the dual rows (up to the dual's sense flip)
    primal = {v: dsol.dual[v] for v in lp.variables}
    for v in primal:
        if v not in lp.free and primal[v] < 0:
            primal[v] = 0.0
    dual = {}
    for con in lp.constraints:
        s = -1.0 if con.relation not in (natural, "=") else 1.0
        dual[con.name] = s * dsol.primal[con.name]
    objective = sum(a * primal[v] for v, a in lp.objective.items())
    return LpSolution(OPTIMAL, float(objective), primal, dual, dsol.iterations, backend + "+dual")


def _solve_highs(c, A, b, rel, free, maximize):
    from scipy.optimize import linprog

    rel = np.array(rel)
    ub = rel == "<="
    lb = rel == ">="
    eq = rel == "="
    A_ub = np.vstack([A[ub], -A[lb]])
    b_ub = np.concatenate([b[ub], -b[lb]])
    bounds = [(None, None) if f else (0, None) for f in free]
    res = linprog(-c if maximize else c, A_ub=A_ub if len(b_ub) else None, b_ub=b_ub if len(b_ub) else None,
                  A_eq=A[eq] if eq.any() else None, b_eq=b[eq] if eq.any() else None,
                  bounds=bounds, method="highs")
    if res.status == 2:
        return simplex.SimplexResult(INFEASIBLE)
    if res.status == 3:
        return simplex.SimplexResult(UNBOUNDED)
    if res.status != 0:
        raise SolverError(f"HiGHS failed: {res.message}")
    y = np.zeros(len(b))
    mu_ub = res.ineqlin.marginals if len(b_ub) else np.zeros(0)
    n_ub = int(ub.sum())
    y[ub] = mu_ub[:n_ub]
    y[lb] = -mu_ub[n_ub:]
    if eq.any():
        y[eq] = res.eqlin.marginals
    if maximize:
        y = -y
    return simplex.SimplexResult(OPTIMAL, res.x, y, float(c @ res.x), int(res.nit))


def row_activity(con: Constraint, point: Mapping[str, float]):
    return sum(a * point[v] for v, a in con.terms.items())


def check_feasible(lp: LinearProgram, point: Mapping[str, float], tol: float = EPS_FEAS) -> CheckReport:
    """Per-row and per-bound excess of ``point``; exact when the values are Fractions and tol is 0."""
    missing = [v for v in lp.variables if v not in point]
    if missing:
        raise LpError(f"point is missing a value for {missing[0]!r} ({len(missing)} unassigned)")
    items = []
    for con in lp.constraints:
        act = row_activity(con, point)
        if con.relation == "<=":
            excess = act - con.rhs
        elif con.relation == ">=":
            excess = con.rhs - act
        else:
            excess = abs(act - con.rhs)
        items.append(((con.name,), excess))
    for v in lp.variables:
        if v not in lp.free:
            items.append(((f"{v} >= 0",), -point[v]))
    return build_report("feasibility", items, tol, len(items))


def complementary_slackness(lp: LinearProgram, sol: LpSolution) -> float:
    """Largest |dual value * row slack| over the rows of an optimal solution."""
    worst = 0.0
    for con in lp.constraints:
        slack = con.rhs - row_activity(con, sol.primal)
        worst = max(worst, abs(sol.dual[con.name] * slack))
    return worst


def _fmt_terms(terms: Mapping[str, float]) -> str:
    return " ".join(f"{a:+.12g} {v}" for v, a in terms.items() if a) or "0"


def dump(lp: LinearProgram) -> str:
    """Row-wise human-readable text, stable for golden-file comparisons."""
    out = [f"# {lp.name}" if lp.name else "# lp", "maximize" if lp.sense == "max" else "minimize",
           f"  obj: {_fmt_terms(lp.objective)}", "subject to"]
    for con in lp.constraints:
        out.append(f"  {con.name}: {_fmt_terms(con.terms)} {con.relation} {con.rhs:.12g}")
    if lp.free:
        out.append("free")
        out.extend(f"  {v}" for v in lp.variables if v in lp.free)
    return "\n".join(out) + "\n"
