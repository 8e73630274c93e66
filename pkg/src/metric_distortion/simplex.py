"""Dense two-phase revised simplex with an explicit basis inverse.

Works on ``min/max c x  s.t.  A x (<=|>=|=) b`` with per-column free flags.
Pricing is Dantzig's rule; after a run of degenerate pivots it switches to
Bland's rule until the objective moves again, which rules out cycling.
The basis inverse is refactored periodically, and once a basis is optimal the
primal and dual vectors are recomputed from the original data, so update
drift never reaches callers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

REFACTOR_EVERY = 100


class SolverError(RuntimeError):
    """Numerical failure, distinct from an infeasible or unbounded verdict."""


@dataclass
class SimplexResult:
    status: str
    x: np.ndarray | None = None
    y: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0


class _Revised:
    def __init__(self, A: np.ndarray, b: np.ndarray, basis: np.ndarray, tol: float, max_iter: int, degenerate_limit: int):
        self.A = A
        self.b = b
        self.basis = basis
        self.tol = tol
        self.max_iter = max_iter
        self.degenerate_limit = degenerate_limit
        self.iterations = 0
        self.refactor()

    def refactor(self) -> None:
        try:
            self.Binv = np.linalg.inv(self.A[:, self.basis])
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular basis: {exc}") from None
        self.xb = self.Binv @ self.b
        self.xb[np.abs(self.xb) < 1e-13] = 0.0
        self._since_refactor = 0

    def pivot(self, r: int, e: int, d: np.ndarray) -> None:
        theta = self.xb[r] / d[r]
        self.xb -= theta * d
        self.xb[r] = theta
        row = self.Binv[r] / d[r]
        self.Binv -= np.outer(d, row)
        self.Binv[r] = row
        self.basis[r] = e
        self._since_refactor += 1
        if self._since_refactor >= REFACTOR_EVERY:
            self.refactor()

    def run(self, cost: np.ndarray, allowed: np.ndarray) -> str:
        tol = self.tol
        streak = 0
        bland = False
        while True:
            if self.iterations >= self.max_iter:
                raise SolverError(f"simplex iteration limit {self.max_iter} exceeded")
            y = cost[self.basis] @ self.Binv
            rc = cost - y @ self.A
            cand = allowed & (rc < -tol)
            cand[self.basis] = False
            if not cand.any():
                return OPTIMAL
            if bland:
                e = int(np.flatnonzero(cand)[0])
            else:
                e = int(np.argmin(np.where(cand, rc, 0.0)))
            d = self.Binv @ self.A[:, e]
            pos = np.flatnonzero(d > tol)
            if pos.size == 0:
                return UNBOUNDED
            xb = np.maximum(self.xb[pos], 0.0)
            ratios = xb / d[pos]
            best = ratios.min()
            ties = pos[ratios <= best + tol]
            if bland:
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                r = int(ties[np.argmax(d[ties])])
            self.pivot(r, e, d)
            self.iterations += 1
            if best <= tol:
                streak += 1
                if streak > self.degenerate_limit:
                    bland = True
            else:
                streak = 0
                bland = False


def solve_dense(
    c: np.ndarray,
    A: np.ndarray,
    b: np.ndarray,
    relations: list[str],
    free: np.ndarray | None = None,
    maximize: bool = False,
    tol: float = 1e-9,
    max_iter: int = 200_000,
    degenerate_limit: int = 50,
) -> SimplexResult:
    """Solve a small dense LP. ``y`` holds shadow prices d(objective)/d(b)."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    free = np.zeros(n, dtype=bool) if free is None else np.asarray(free, dtype=bool)

    # columns: original vars, negated copies of free vars, slack/surplus, artificials
    free_idx = np.flatnonzero(free)
    cost = -c if maximize else c.copy()
    A_std = np.hstack([A, -A[:, free_idx]])
    cost = np.concatenate([cost, -cost[free_idx]])

    sign = np.where(b < 0, -1.0, 1.0)
    A_std = A_std * sign[:, None]
    b = b * sign
    rel = []
    for s, r in zip(sign, relations):
        if s < 0 and r != "=":
            r = "<=" if r == ">=" else ">="
        rel.append(r)

    n_struct = A_std.shape[1]
    slack_rows = [i for i, r in enumerate(rel) if r != "="]
    S = np.zeros((m, len(slack_rows)))
    for k, i in enumerate(slack_rows):
        S[i, k] = 1.0 if rel[i] == "<=" else -1.0
    art_rows = [i for i, r in enumerate(rel) if r != "<="]
    R = np.zeros((m, len(art_rows)))
    for k, i in enumerate(art_rows):
        R[i, k] = 1.0
    full = np.hstack([A_std, S, R])
    n_total = full.shape[1]
    art_start = n_struct + len(slack_rows)
    cost_full = np.concatenate([cost, np.zeros(n_total - n_struct)])

    basis = np.empty(m, dtype=int)
    slack_col = {i: n_struct + k for k, i in enumerate(slack_rows)}
    art_col = {i: art_start + k for k, i in enumerate(art_rows)}
    for i in range(m):
        basis[i] = slack_col[i] if rel[i] == "<=" else art_col[i]

    engine = _Revised(full, b, basis, tol, max_iter, degenerate_limit)
    allowed = np.ones(n_total, dtype=bool)

    if art_rows:
        phase1 = np.zeros(n_total)
        phase1[art_start:] = 1.0
        engine.run(phase1, allowed)
        engine.refactor()
        infeas = float(phase1[engine.basis] @ engine.xb)
        if infeas > 10 * tol * max(1.0, float(np.abs(b).max(initial=0.0))):
            return SimplexResult(INFEASIBLE, iterations=engine.iterations)
        for r in range(m):
            if engine.basis[r] >= art_start:
                row = engine.Binv[r] @ full[:, :art_start]
                row[engine.basis[engine.basis < art_start]] = 0.0
                cand = np.flatnonzero(np.abs(row) > 1e-7)
                if cand.size:
                    e = int(cand[np.argmax(np.abs(row[cand]))])
                    engine.pivot(r, e, engine.Binv @ full[:, e])
        allowed[art_start:] = False

    status = engine.run(cost_full, allowed)
    if status == UNBOUNDED:
        return SimplexResult(UNBOUNDED, iterations=engine.iterations)

    B = full[:, engine.basis]
    try:
        xb = np.linalg.solve(B, b)
        y_std = np.linalg.solve(B.T, cost_full[engine.basis])
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular final basis: {exc}") from None
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if xb.min(initial=0.0) < -1e-6 * scale:
        raise SolverError(f"final basis lost primal feasibility ({xb.min():.3g})")
    xb = np.maximum(xb, 0.0)
    x_full = np.zeros(n_total)
    x_full[engine.basis] = xb
    x = x_full[:n].copy()
    x[free_idx] -= x_full[n : n + len(free_idx)]
    y = y_std * sign
    if maximize:
        y = -y
    return SimplexResult(OPTIMAL, x, y, float(c @ x), engine.iterations)
