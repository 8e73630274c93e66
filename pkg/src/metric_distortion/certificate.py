"""Lower-bound certificates: one consistent metric per reference facility.

If the metrics satisfy the dual constraints (consistency, triangle inequality,
total normalization at most 1), then ``phi = min_i sum_o cost_o(i)`` bounds
the distortion of every randomized rule on the profile from below, by weak
duality. Verification closes any graphs, checks each family of rows, and
computes ``phi`` directly from the distances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .checks import CheckReport, build_report
from .metric import (EPS_FEAS, Metric, MetricGraph, PointSpace, as_fraction, check_consistency,
                     check_triangle, metric_closure, social_cost)
from .profile import PreferenceProfile, profile_from_json, profile_to_json

PRINTED_TOL = 5e-4
INTERNAL_TOL = 1e-9


@dataclass(frozen=True)
class Certificate:
    profile: PreferenceProfile
    graphs: dict[str, MetricGraph | Metric]
    claimed_phi: float | None = None

    def __post_init__(self):
        if set(self.graphs) != set(self.profile.facilities):
            raise ValueError("certificate needs exactly one metric per facility")
        space = PointSpace.from_profile(self.profile)
        for o, g in self.graphs.items():
            if g.space.points != space.points:
                raise ValueError(f"metric for {o!r} is over a different point space")

    def to_json(self) -> dict[str, Any]:
        entries = []
        for o in self.profile.facilities:
            g = self.graphs[o]
            key = "graph" if isinstance(g, MetricGraph) else "metric"
            entries.append({"o": o, key: g.to_json()})
        return {"profile": profile_to_json(self.profile), "metrics": entries, "claimed_phi": self.claimed_phi}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Certificate":
        profile = profile_from_json(data["profile"])
        space = PointSpace.from_profile(profile)
        graphs: dict[str, MetricGraph | Metric] = {}
        for entry in data["metrics"]:
            if "graph" in entry:
                graphs[entry["o"]] = MetricGraph.from_json(entry["graph"], space)
            else:
                metric = Metric.from_json(entry["metric"])
                graphs[entry["o"]] = Metric(space, metric.dist)
        return cls(profile, graphs, data.get("claimed_phi"))

    def scaled(self, t) -> "Certificate":
        return Certificate(self.profile, {o: g.scaled(t) for o, g in self.graphs.items()}, self.claimed_phi)


@dataclass(frozen=True)
class CertificateReport:
    feasible: bool
    phi: Any  # None when infeasible
    normalization: Any
    phi_by_facility: dict[str, Any]
    checks: dict[str, CheckReport]
    metrics: dict[str, Metric] = field(repr=False)
    claim_ok: bool | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "feasible": self.feasible,
            "phi": None if self.phi is None else float(self.phi),
            "normalization": float(self.normalization),
            "normalization_slack": float(1 - self.normalization),
            "phi_by_facility": {f: float(v) for f, v in self.phi_by_facility.items()},
            "claim_ok": self.claim_ok,
            "checks": {k: r.to_json() for k, r in self.checks.items()},
        }


def verify_certificate(cert: Certificate, tol: float = INTERNAL_TOL, exact: bool = False,
                       claim_tol: float = PRINTED_TOL) -> CertificateReport:
    """Check a certificate; with ``exact`` all arithmetic is rational and ``tol`` is ignored."""
    profile = cert.profile
    if exact:
        tol = 0
    metrics = {}
    for o in profile.facilities:
        g = cert.graphs[o]
        if isinstance(g, MetricGraph):
            metrics[o] = metric_closure(g, exact=exact)
        elif exact and not g.exact:
            metrics[o] = Metric(g.space, np.vectorize(as_fraction, otypes=[object])(g.dist))
        else:
            metrics[o] = g
    checks: dict[str, CheckReport] = {}
    for o, metric in metrics.items():
        checks[f"consistency[{o}]"] = check_consistency(metric, profile, tol)
        checks[f"triangle[{o}]"] = check_triangle(metric, tol)
    normalization = sum(social_cost(metrics[o], profile, o) for o in profile.facilities)
    checks["normalization"] = build_report("normalization", [(("sum_o cost_o(o)",), normalization - 1)], tol, 1,
                                           value=normalization)
    phi_by = {i: sum(social_cost(metrics[o], profile, i) for o in profile.facilities) for i in profile.facilities}
    feasible = all(r.ok for r in checks.values())
    phi = min(phi_by.values()) if feasible else None
    claim_ok = None
    if cert.claimed_phi is not None and phi is not None:
        claim_ok = abs(float(phi) - cert.claimed_phi) <= claim_tol
    return CertificateReport(feasible, phi, normalization, phi_by, checks, metrics, claim_ok)


def load_appendix_b() -> Certificate:
    from . import fixtures

    prof = fixtures.profile()
    return Certificate(prof, dict(fixtures.dual_metric_graphs(prof)), fixtures.GAMMA_STAR)


def certificate_from_metrics(profile: PreferenceProfile, metrics: dict[str, Metric],
                             claimed_phi: float | None = None) -> Certificate:
    return Certificate(profile, dict(metrics), claimed_phi)


__all__ = ["Certificate", "CertificateReport", "verify_certificate", "load_appendix_b",
           "certificate_from_metrics", "PRINTED_TOL", "INTERNAL_TOL", "EPS_FEAS"]
