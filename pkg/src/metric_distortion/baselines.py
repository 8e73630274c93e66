"""Ordinal lotteries for comparison, scored with the same adversary LP."""

from __future__ import annotations

from dataclasses import dataclass

from .adversary import Lottery, distortion_of
from .optimal import optimal_scf
from .profile import PreferenceProfile


def random_dictatorship(profile: PreferenceProfile) -> Lottery:
    """Each facility gets the weight share of the groups ranking it first."""
    mass = dict.fromkeys(profile.facilities, 0)
    for g in profile.groups:
        mass[g.ranking[0]] += g.weight
    n = profile.n
    return Lottery(profile.facilities, tuple(mass[f] / n for f in profile.facilities))


def uniform_lottery(profile: PreferenceProfile) -> Lottery:
    m = profile.m
    return Lottery(profile.facilities, (1 / m,) * m)


BASELINES = {
    "random-dictatorship": random_dictatorship,
    "uniform": uniform_lottery,
}


@dataclass(frozen=True)
class BaselineRow:
    name: str
    distortion: float
    lottery: Lottery

    def to_json(self) -> dict:
        inf = self.distortion == float("inf")
        return {"name": self.name, "distortion": None if inf else self.distortion,
                "unbounded": inf, "q": self.lottery.as_dict()}


def evaluate_baselines(profile: PreferenceProfile, backend: str | None = None,
                       include_optimal: bool = True) -> list[BaselineRow]:
    rows = []
    for name, rule in BASELINES.items():
        q = rule(profile)
        rows.append(BaselineRow(name, distortion_of(profile, q, backend).value, q))
    if include_optimal:
        opt = optimal_scf(profile, backend)
        rows.append(BaselineRow("optimal", opt.gamma, opt.q))
    return rows


def format_table(rows: list[BaselineRow], precision: int = 6) -> str:
    width = max(len(r.name) for r in rows)
    lines = [f"{'rule':<{width}}  distortion"]
    for r in rows:
        val = "unbounded" if r.distortion == float("inf") else f"{r.distortion:.{precision}f}"
        lines.append(f"{r.name:<{width}}  {val}")
    return "\n".join(lines)
