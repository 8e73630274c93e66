"""Embedded data for the 7-voter / 7-candidate instance with optimal distortion 2.063164.

Clients 1-3 share one ranking, 4-6 another, and client 7 a third. In the
coalesced profile those groups are the points ``C1``, ``C2`` and ``C3``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .metric import MetricGraph, PointSpace
from .profile import PreferenceProfile, expand, parse_profile

PROFILE_TEXT = """\
# clients 1-3, 4-6 and 7
candidates: a b c d e f g
3 : c e b a f g d
3 : d g f a e b c
1 : b a f g e c d
"""

GAMMA_STAR = 2.063164

Q_STAR = {
    "a": 0.039301, "b": 0.121723, "c": 0.388299, "d": 0.291224,
    "e": 0.107872, "f": 0.029475, "g": 0.022107,
}

# edge-length units of the seven per-facility dual metrics
M = {
    "a": 0.014507, "b": 0.020955, "c": 0.038866, "d": 0.051820,
    "e": 0.013433, "f": 0.019343, "g": 0.025791,
}

# Node lists give colocated points; each edge is (node, node, multiple of M[o]).
# C3 is client 7.
_GRAPHS = {
    "a": (
        [("C1",), ("a",), ("C2",), ("C3",), ("b",), ("c", "e"), ("d", "f", "g")],
        [("C1", "a", 1), ("C1", "b", 1), ("C1", "c", 1), ("C2", "d", 1),
         ("C2", "a", 1), ("C3", "a", 1), ("C3", "b", 1)],
    ),
    "b": (
        [("C1",), ("e",), ("b", "C3"), ("c",), ("a", "d", "f", "g"), ("C2",)],
        [("C1", "b", 1), ("C1", "e", 1), ("C1", "c", 1), ("C2", "a", 1),
         ("C2", "b", 1), ("C2", "e", 1)],
    ),
    "c": (
        [("C2",), ("c", "C1"), ("d",), ("a", "b", "e", "f", "g"), ("C3",)],
        [("C2", "d", 1), ("C2", "c", 1), ("C2", "a", 1), ("C3", "c", 1), ("C3", "a", 1)],
    ),
    "d": (
        [("C3",), ("C1",), ("d", "C2"), ("a", "b", "c", "e", "f", "g")],
        [("C3", "C1", 1), ("C1", "d", 1), ("C1", "a", 1), ("d", "C3", 1), ("a", "C3", 1)],
    ),
    "e": (
        [("d",), ("C2",), ("a", "f", "g"), ("C3",), ("e",), ("b",), ("C1",), ("c",)],
        [("d", "C2", 1), ("C2", "a", 1), ("C2", "e", 1), ("a", "C3", 1),
         ("C3", "b", 1), ("C3", "e", 1), ("C1", "e", 1), ("C1", "c", 1)],
    ),
    "f": (
        [("c", "e"), ("a", "b"), ("d", "g"), ("f",), ("C1",), ("C2",), ("C3",)],
        [("c", "d", 2), ("f", "C1", 1), ("c", "C1", 1), ("a", "C1", 1), ("C2", "d", 1),
         ("C2", "f", 1), ("a", "C3", 1), ("C3", "f", 1), ("a", "d", 2)],
    ),
    "g": (
        [("d",), ("a", "b", "f"), ("C2",), ("C3",), ("g",), ("C1",), ("c", "e")],
        [("d", "a", 2), ("d", "c", 2), ("d", "C2", 1), ("g", "C2", 1), ("g", "C3", 1),
         ("a", "C3", 1), ("a", "C1", 1), ("g", "C1", 1), ("c", "C1", 1)],
    ),
}


def profile() -> PreferenceProfile:
    return parse_profile(PROFILE_TEXT)


def expanded_profile() -> PreferenceProfile:
    """Seven weight-1 clients ``C1``..``C7`` in the original voter numbering."""
    return expand(profile())


def dual_metric_graphs(prof: PreferenceProfile | None = None) -> dict[str, MetricGraph]:
    prof = prof or profile()
    space = PointSpace.from_profile(prof)
    out = {}
    for o, (nodes, edges) in _GRAPHS.items():
        unit = M[o]
        colocate = tuple(n for n in nodes if len(n) > 1)
        out[o] = MetricGraph(space, tuple((u, v, k * unit) for u, v, k in edges), colocate)
    return out


@dataclass(frozen=True)
class PublishedMultipliers:
    gamma: float
    beta: dict[tuple[str, int, int], float]  # (o, client, rank)
    alpha: dict[tuple[int, str, int, tuple[str, str, str]], float]  # (family, o, rotation, triangle)


@lru_cache(maxsize=1)
def load_multipliers() -> PublishedMultipliers:
    text = resources.files(__package__).joinpath("data/minmax_multipliers.txt").read_text(encoding="utf-8")
    gamma = None
    beta, alpha = {}, {}
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "gamma":
            gamma = float(parts[1])
        elif parts[0] == "beta":
            o, j, r, v = parts[1:]
            beta[(o, int(j), int(r))] = float(v)
        elif parts[0] == "alpha":
            fam, o, rot, x, y, z, v = parts[1:]
            alpha[(int(fam), o, int(rot), (x, y, z))] = float(v)
        else:
            raise ValueError(f"unrecognized multiplier line: {line!r}")
    return PublishedMultipliers(gamma, beta, alpha)


def _client(token: str) -> str:
    return f"C{token}" if token.isdigit() else token


def multiplier_row(family: int, rotation: int, triangle: tuple[str, str, str]) -> tuple[str, str, str]:
    """``(u, v, w)`` such that the multiplier belongs to the row ``d(u, v) <= d(u, w) + d(v, w)``.

    Triangles with one facility are written (facility, client, client); rotation
    1 bounds the client-client side, 2 the first facility-client side, 3 the
    second. Triangles with two facilities are (client, better, worse) for the
    client's ranking; rotation 1 bounds client-worse, 2 bounds better-worse.
    Triangles with zero or three facilities use the plain order: rotation 1
    bounds (x, y), 2 bounds (x, z), 3 bounds (y, z).
    """
    x, y, z = (_client(t) for t in triangle)
    if family == 1:
        return {1: (y, z, x), 2: (x, y, z), 3: (x, z, y)}[rotation]
    if family == 2:
        return {1: (x, z, y), 2: (y, z, x)}[rotation]
    return {1: (x, y, z), 2: (x, z, y), 3: (y, z, x)}[rotation]


def tri_row_name(space: PointSpace, u: str, v: str, w: str) -> str:
    """Adversary row name for ``d(u, v) <= d(u, w) + d(v, w)``."""
    if space.index(u) > space.index(v):
        u, v = v, u
    return f"tri[{u},{v};{w}]"


# Six printed multipliers carry a wrong symbol: as printed, 13 rows of the
# min-max LP fail by up to 0.29, and every such row is paired with a row
# that holds with exactly that much spare. Each edit moves one entry to the
# row it evidently belongs to: (family, o, rotation, triangle) -> corrected.
MULTIPLIER_ERRATA = {
    (1, "b", 2, ("d", "2", "5")): (1, "c", 2, ("d", "2", "5")),
    (1, "b", 2, ("b", "3", "5")): (1, "c", 2, ("b", "3", "5")),
    (1, "b", 2, ("b", "1", "7")): (1, "c", 2, ("b", "1", "7")),
    (1, "b", 2, ("b", "3", "7")): (1, "c", 2, ("b", "3", "7")),
    (1, "d", 2, ("b", "4", "7")): (1, "d", 2, ("c", "4", "7")),
    (2, "f", 2, ("2", "b", "f")): (2, "f", 2, ("2", "c", "f")),
}

MULTIPLIER_TOL = 1e-3


def multiplier_assignment(lp, prof: PreferenceProfile | None = None, errata: bool = False) -> dict[str, float]:
    """Printed multipliers as a full point of the mechanically built min-max LP; unprinted values are 0.

    ``prof`` must be the expanded seven-client profile the LP was built from.
    The normalization multiplier of every reference facility is set to gamma,
    which is how the printed expansion eliminates it. With ``errata`` the
    entries in ``MULTIPLIER_ERRATA`` are moved to their corrected rows.
    """
    from .optimal import GAMMA, qvar, yprefix

    prof = prof or expanded_profile()
    space = PointSpace.from_profile(prof)
    data = load_multipliers()
    point = dict.fromkeys(lp.variables, 0.0)

    def add(name: str, value: float) -> None:
        if name not in point:
            raise KeyError(f"printed multiplier maps to unknown variable {name!r}")
        point[name] += value

    add(GAMMA, data.gamma)
    for f, v in Q_STAR.items():
        add(qvar(f), v)
    for o in prof.facilities:
        add(yprefix(o) + "norm", data.gamma)
    for (o, j, r), v in data.beta.items():
        add(yprefix(o) + f"cons[C{j},{r}]", v)
    for key, v in data.alpha.items():
        if errata:
            key = MULTIPLIER_ERRATA.get(key, key)
        fam, o, rot, tri = key
        add(yprefix(o) + tri_row_name(space, *multiplier_row(fam, rot, tri)), v)
    return point


def check_multipliers(tol: float = MULTIPLIER_TOL, errata: bool = False, lp=None):
    """Feasibility report of the printed multipliers in the mechanically built min-max LP."""
    from .lp import check_feasible
    from .optimal import build_best_dist

    prof = expanded_profile()
    lp = lp or build_best_dist(prof)
    point = multiplier_assignment(lp, prof, errata=errata)
    report = check_feasible(lp, point, tol)
    return report
