"""Search small profiles for large optimal distortion.

Profiles are canonicalized before solving: groups are coalesced and the
facilities renamed ``a, b, c, ...`` so that the encoding (sorted list of
``(ranking as index tuple, weight)``) is lexicographically minimal over all
relabelings. The minimum always sends some group's ranking to the identity,
so trying the relabeling that does this for each group is enough.
"""

from __future__ import annotations

import itertools
import logging
import math
import random
import string
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .adversary import Lottery, distortion_of
from .lp import SolverError
from .optimal import optimal_scf
from .profile import ClientGroup, PreferenceProfile, coalesce

log = logging.getLogger(__name__)

REVALIDATE_TOL = 1e-6
MAX_M = len(string.ascii_lowercase)

Encoding = tuple[tuple[tuple[int, ...], int], ...]


@dataclass(frozen=True)
class SearchSpec:
    m: int
    mode: str = "exhaustive"  # or "sample"
    max_groups: int = 2
    weight_cap: int = 1
    threshold: float = 1.0
    budget: int = 1000
    seed: int = 0
    include: tuple[PreferenceProfile, ...] = ()

    def __post_init__(self):
        if not 1 <= self.m <= MAX_M:
            raise ValueError(f"m must be between 1 and {MAX_M}, got {self.m}")
        if self.mode not in ("exhaustive", "sample"):
            raise ValueError(f"mode must be 'exhaustive' or 'sample', got {self.mode!r}")
        if self.max_groups < 1 or self.weight_cap < 1:
            raise ValueError("max_groups and weight_cap must be at least 1")
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if not self.threshold >= 1:
            raise ValueError("threshold must be at least 1")
        object.__setattr__(self, "include", tuple(self.include))


def encode(profile: PreferenceProfile) -> Encoding:
    index = {f: i for i, f in enumerate(profile.facilities)}
    return tuple(sorted((tuple(index[f] for f in g.ranking), g.weight) for g in profile.groups))


def _relabeled_encoding(groups, anchor: Sequence[str]) -> Encoding:
    pos = {f: i for i, f in enumerate(anchor)}
    return tuple(sorted((tuple(pos[f] for f in g.ranking), g.weight) for g in groups))


def canonical_encoding(profile: PreferenceProfile) -> Encoding:
    groups = coalesce(profile).groups
    return min(_relabeled_encoding(groups, g.ranking) for g in groups)


def from_encoding(enc: Encoding) -> PreferenceProfile:
    m = len(enc[0][0])
    names = tuple(string.ascii_lowercase[:m])
    return PreferenceProfile(names, tuple(ClientGroup(tuple(names[i] for i in rk), w) for rk, w in enc))


def canonicalize(profile: PreferenceProfile) -> PreferenceProfile:
    if profile.m > MAX_M:
        raise ValueError(f"canonical names support at most {MAX_M} facilities")
    return from_encoding(canonical_encoding(profile))


def _exhaustive(spec: SearchSpec) -> Iterator[PreferenceProfile]:
    rankings = list(itertools.permutations(range(spec.m)))
    for k in range(1, spec.max_groups + 1):
        # one group can always be mapped to the identity ranking
        for rest in itertools.combinations(rankings[1:], k - 1):
            chosen = (rankings[0],) + rest
            for weights in itertools.product(range(1, spec.weight_cap + 1), repeat=k):
                yield from_encoding(tuple(sorted(zip(chosen, weights))))


def _sampled(spec: SearchSpec) -> Iterator[PreferenceProfile]:
    rng = random.Random(spec.seed)
    names = tuple(string.ascii_lowercase[: spec.m])
    while True:
        k = rng.randint(1, min(spec.max_groups, math.factorial(spec.m)))
        # distinct rankings, so coalescing cannot push a weight past the cap
        rankings: list[tuple[str, ...]] = []
        while len(rankings) < k:
            rk = list(names)
            rng.shuffle(rk)
            if tuple(rk) not in rankings:
                rankings.append(tuple(rk))
        groups = tuple(ClientGroup(rk, rng.randint(1, spec.weight_cap)) for rk in rankings)
        yield PreferenceProfile(names, groups)


def enumerate_profiles(spec: SearchSpec, max_misses: int | None = None) -> Iterator[PreferenceProfile]:
    """Distinct canonical profiles, ``spec.include`` first, at most ``spec.budget`` of them.

    Sampling stops early after ``max_misses`` consecutive duplicates
    (default ``20 * budget``), which happens when the space is nearly exhausted.
    """
    seen: set[Encoding] = set()
    count = 0
    misses = 0
    limit = max_misses if max_misses is not None else 20 * spec.budget
    source = _exhaustive(spec) if spec.mode == "exhaustive" else _sampled(spec)
    for prof in itertools.chain(spec.include, source):
        if count >= spec.budget:
            return
        enc = canonical_encoding(prof)
        if enc in seen:
            misses += 1
            if spec.mode == "sample" and misses >= limit:
                return
            continue
        misses = 0
        seen.add(enc)
        count += 1
        yield from_encoding(enc)


@dataclass(frozen=True)
class Evaluation:
    profile: PreferenceProfile
    gamma: float | None
    q: Lottery | None = None
    error: str | None = None

    def to_json(self) -> dict:
        from .profile import profile_to_json

        return {
            "profile": profile_to_json(self.profile),
            "gamma": self.gamma,
            "q": None if self.q is None else self.q.as_dict(),
            "error": self.error,
        }


@dataclass(frozen=True)
class SearchSummary:
    hits: list[Evaluation]
    best: Evaluation | None
    evaluated: int
    failures: list[Evaluation] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "evaluated": self.evaluated,
            "hits": len(self.hits),
            "best_gamma": None if self.best is None else self.best.gamma,
            "best_profile": None if self.best is None else self.best.to_json()["profile"],
            "failures": [{"profile": f.to_json()["profile"], "error": f.error} for f in self.failures],
        }


def evaluate(profile: PreferenceProfile, backend: str | None = None, revalidate: bool = True) -> Evaluation:
    try:
        opt = optimal_scf(profile, backend)
        if revalidate:
            check = distortion_of(profile, opt.q, backend).value
            if not abs(check - opt.gamma) <= REVALIDATE_TOL:
                raise SolverError(f"gamma {opt.gamma!r} does not revalidate (adversary gives {check!r})")
    except (SolverError, ValueError) as exc:
        return Evaluation(profile, None, None, f"{type(exc).__name__}: {exc}")
    return Evaluation(profile, opt.gamma, opt.q)


def iter_evaluations(spec: SearchSpec, backend: str | None = None, jobs: int = 1,
                     revalidate: bool = True) -> Iterator[Evaluation]:
    """Evaluations in enumeration order, whether or not they run in parallel."""
    profiles = enumerate_profiles(spec)
    if jobs <= 1:
        for prof in profiles:
            yield evaluate(prof, backend, revalidate)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        batch = list(itertools.islice(profiles, 4 * jobs))
        while batch:
            yield from pool.map(evaluate, batch, itertools.repeat(backend), itertools.repeat(revalidate))
            batch = list(itertools.islice(profiles, 4 * jobs))


def summarize(spec: SearchSpec, evaluations) -> SearchSummary:
    hits, failures = [], []
    best = None
    n = 0
    for ev in evaluations:
        n += 1
        if ev.error is not None:
            log.warning("skipping instance after solver failure: %s", ev.error)
            failures.append(ev)
            continue
        if best is None or ev.gamma > best.gamma:
            best = ev
        if ev.gamma >= spec.threshold:
            hits.append(ev)
    hits.sort(key=lambda ev: (-ev.gamma, encode(ev.profile)))
    return SearchSummary(hits, best, n, failures)


def search_instances(spec: SearchSpec, backend: str | None = None, jobs: int = 1,
                     revalidate: bool = True) -> SearchSummary:
    return summarize(spec, iter_evaluations(spec, backend, jobs, revalidate))


def gamma_in_range(gamma: float) -> bool:
    return 1 - 1e-9 <= gamma <= 3 + 1e-6 and not math.isnan(gamma)
