"""Preference profiles: facilities (candidates) plus weighted groups of clients.

A group stands for ``weight`` colocated clients that share one strict ranking.
Point labels for groups are derived from their position (``C1``, ``C2``, ...),
so every LP row and column name downstream is stable once a profile is built.

Text format::

    # comment
    candidates: a b c
    2 : a b c
    1 : c b a
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Sequence


class ProfileError(ValueError):
    """Invalid profile data. ``line`` is the 1-based source line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ClientGroup:
    ranking: tuple[str, ...]
    weight: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(self.ranking))
        if isinstance(self.weight, bool) or int(self.weight) != self.weight or self.weight < 1:
            raise ProfileError(f"group weight must be a positive integer, got {self.weight!r}")
        object.__setattr__(self, "weight", int(self.weight))
        if len(set(self.ranking)) != len(self.ranking):
            dup = _first_duplicate(self.ranking)
            raise ProfileError(f"duplicate facility {dup!r} in ranking")


@dataclass(frozen=True)
class PreferenceProfile:
    facilities: tuple[str, ...]
    groups: tuple[ClientGroup, ...]

    def __post_init__(self):
        object.__setattr__(self, "facilities", tuple(self.facilities))
        object.__setattr__(self, "groups", tuple(self.groups))
        if not self.facilities:
            raise ProfileError("profile needs at least one facility")
        if not self.groups:
            raise ProfileError("profile needs at least one client group")
        if len(set(self.facilities)) != len(self.facilities):
            raise ProfileError(f"duplicate facility identifier {_first_duplicate(self.facilities)!r}")
        labels = set(self.group_labels)
        clash = [f for f in self.facilities if f in labels]
        if clash:
            raise ProfileError(f"facility identifier {clash[0]!r} collides with a client label")
        full = set(self.facilities)
        for k, g in enumerate(self.groups):
            if set(g.ranking) != full or len(g.ranking) != len(self.facilities):
                missing = sorted(full - set(g.ranking))
                extra = sorted(set(g.ranking) - full)
                if extra:
                    raise ProfileError(f"group {k + 1}: unknown facility {extra[0]!r}")
                raise ProfileError(f"group {k + 1}: ranking missing facility {missing[0]!r}")

    @property
    def m(self) -> int:
        return len(self.facilities)

    @property
    def n(self) -> int:
        """Total number of clients (sum of group weights)."""
        return sum(g.weight for g in self.groups)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(g.weight for g in self.groups)

    @property
    def group_labels(self) -> tuple[str, ...]:
        return tuple(f"C{k + 1}" for k in range(len(self.groups)))

    def facility_index(self, facility: str) -> int:
        try:
            return self.facilities.index(facility)
        except ValueError:
            raise KeyError(f"unknown facility {facility!r}") from None

    def alt(self, group: int, r: int) -> str:
        return alt(self, group, r)


def alt(profile: PreferenceProfile, group: int, r: int) -> str:
    """The ``r``-th most preferred facility of ``group`` (both 1-based for r, 0-based for group)."""
    if not 0 <= group < len(profile.groups):
        raise IndexError(f"group index {group} out of range")
    if not 1 <= r <= profile.m:
        raise IndexError(f"rank {r} out of range 1..{profile.m}")
    return profile.groups[group].ranking[r - 1]


def _first_duplicate(items: Iterable[str]) -> str | None:
    seen = set()
    for x in items:
        if x in seen:
            return x
        seen.add(x)
    return None


def parse_profile(text: str) -> PreferenceProfile:
    facilities: list[str] | None = None
    groups: list[ClientGroup] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if facilities is None:
            head, sep, rest = line.partition(":")
            if not sep or head.strip().lower() != "candidates":
                raise ProfileError("expected 'candidates: <id> ...' before any group", lineno)
            facilities = rest.split()
            if not facilities:
                raise ProfileError("empty candidate list", lineno)
            dup = _first_duplicate(facilities)
            if dup is not None:
                raise ProfileError(f"duplicate facility {dup!r} in candidate list", lineno)
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise ProfileError("expected '<weight> : <ranking>'", lineno)
        try:
            weight = int(head.strip())
        except ValueError:
            raise ProfileError(f"bad weight {head.strip()!r}", lineno) from None
        if weight < 1:
            raise ProfileError(f"weight must be positive, got {weight}", lineno)
        ranking = rest.split()
        dup = _first_duplicate(ranking)
        if dup is not None:
            raise ProfileError(f"duplicate facility {dup!r} in ranking", lineno)
        unknown = [f for f in ranking if f not in facilities]
        if unknown:
            raise ProfileError(f"unknown facility {unknown[0]!r}", lineno)
        missing = [f for f in facilities if f not in ranking]
        if missing:
            raise ProfileError(f"ranking missing facility {missing[0]!r}", lineno)
        groups.append(ClientGroup(tuple(ranking), weight))
    if facilities is None:
        raise ProfileError("empty input")
    if not groups:
        raise ProfileError("no client groups")
    return PreferenceProfile(tuple(facilities), tuple(groups))


def format_profile(profile: PreferenceProfile) -> str:
    lines = ["candidates: " + " ".join(profile.facilities)]
    lines += [f"{g.weight} : " + " ".join(g.ranking) for g in profile.groups]
    return "\n".join(lines) + "\n"


def profile_to_json(profile: PreferenceProfile) -> dict[str, Any]:
    return {
        "candidates": list(profile.facilities),
        "groups": [{"weight": g.weight, "ranking": list(g.ranking)} for g in profile.groups],
    }


def profile_from_json(data: dict[str, Any]) -> PreferenceProfile:
    try:
        facilities = tuple(data["candidates"])
        groups = tuple(ClientGroup(tuple(g["ranking"]), g.get("weight", 1)) for g in data["groups"])
    except (KeyError, TypeError) as exc:
        raise ProfileError(f"malformed profile JSON: {exc}") from None
    return PreferenceProfile(facilities, groups)


def load_profile(path: str) -> PreferenceProfile:
    """Read a profile file, accepting either the text format or its JSON mirror."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProfileError(f"invalid JSON: {exc.msg}", exc.lineno) from None
        return profile_from_json(data)
    return parse_profile(text)


def coalesce(profile: PreferenceProfile) -> PreferenceProfile:
    """Merge groups with identical rankings; groups ordered by ranking (facility-index order)."""
    index = {f: i for i, f in enumerate(profile.facilities)}
    merged: dict[tuple[str, ...], int] = {}
    for g in profile.groups:
        merged[g.ranking] = merged.get(g.ranking, 0) + g.weight
    order = sorted(merged, key=lambda rk: tuple(index[f] for f in rk))
    return PreferenceProfile(profile.facilities, tuple(ClientGroup(rk, merged[rk]) for rk in order))


def expand(profile: PreferenceProfile) -> PreferenceProfile:
    """One weight-1 group per client, in group order."""
    groups = tuple(ClientGroup(g.ranking, 1) for g in profile.groups for _ in range(g.weight))
    return PreferenceProfile(profile.facilities, groups)


def relabel(profile: PreferenceProfile, mapping: dict[str, str]) -> PreferenceProfile:
    """Rename facilities through ``mapping`` (a bijection); facility order follows the new names' positions."""
    facilities = tuple(mapping[f] for f in profile.facilities)
    groups = tuple(ClientGroup(tuple(mapping[f] for f in g.ranking), g.weight) for g in profile.groups)
    return PreferenceProfile(facilities, groups)


def make_profile(facilities: Sequence[str], rankings: Iterable[Sequence[str] | tuple[int, Sequence[str]]]) -> PreferenceProfile:
    """Convenience constructor: rankings are either sequences or ``(weight, ranking)`` pairs."""
    groups = []
    for item in rankings:
        if len(item) == 2 and isinstance(item[0], int):
            groups.append(ClientGroup(tuple(item[1]), item[0]))
        else:
            groups.append(ClientGroup(tuple(item), 1))
    return PreferenceProfile(tuple(facilities), tuple(groups))
