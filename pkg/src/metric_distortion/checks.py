"""Pass/fail reports shared by the metric, LP and certificate checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Violation:
    where: tuple
    excess: Any  # float, or Fraction in exact mode

    def __str__(self) -> str:
        return f"{self.where}: excess {float(self.excess):.3g}"


@dataclass(frozen=True)
class CheckReport:
    name: str
    violations: tuple[Violation, ...] = ()
    max_excess: Any = 0.0
    checked: int = 0
    tol: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def summary(self) -> str:
        status = "pass" if self.ok else f"FAIL ({len(self.violations)} violations)"
        return f"{self.name}: {status}, max excess {float(self.max_excess):.3g} over {self.checked} rows"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "checked": self.checked,
            "tol": self.tol,
            "max_excess": float(self.max_excess),
            "violations": [{"where": [str(w) for w in v.where], "excess": float(v.excess)} for v in self.violations[:50]],
            "n_violations": len(self.violations),
            **{k: (float(v) if hasattr(v, "denominator") else v) for k, v in self.extra.items()},
        }


def build_report(name: str, items, tol, checked: int, **extra) -> CheckReport:
    """``items`` yields ``(where, excess)``; entries with excess > tol become violations."""
    worst = 0
    bad = []
    for where, excess in items:
        if excess > worst:
            worst = excess
        if excess > tol:
            bad.append(Violation(tuple(where), excess))
    return CheckReport(name, tuple(bad), worst, checked, float(tol), dict(extra))
