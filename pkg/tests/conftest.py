import random

import pytest

from metric_distortion import fixtures
from metric_distortion.profile import ClientGroup, PreferenceProfile, make_profile


def opposed():
    return make_profile("ab", ["ab", "ba"])


def unanimous(m=3, groups=2):
    names = "abcdefg"[:m]
    rng = random.Random(m * 10 + groups)
    rows = []
    for _ in range(groups):
        rest = list(names[1:])
        rng.shuffle(rest)
        rows.append(["a"] + rest)
    return make_profile(names, rows)


def random_profile(rng, max_m=4, max_groups=4, weight_cap=3):
    m = rng.randint(1, max_m)
    names = tuple("abcdefg"[:m])
    groups = []
    for _ in range(rng.randint(1, max_groups)):
        rk = list(names)
        rng.shuffle(rk)
        groups.append(ClientGroup(tuple(rk), rng.randint(1, weight_cap)))
    return PreferenceProfile(names, tuple(groups))


@pytest.fixture(scope="session")
def instance_profile():
    return fixtures.profile()


@pytest.fixture(scope="session")
def instance_optimal(instance_profile):
    from metric_distortion.optimal import optimal_scf

    return optimal_scf(instance_profile)


@pytest.fixture(scope="session")
def instance_dual(instance_profile):
    from metric_distortion.optimal import optimal_dual_metrics

    return optimal_dual_metrics(instance_profile)


@pytest.fixture(scope="session")
def expanded_best_dist():
    from metric_distortion.optimal import build_best_dist

    return build_best_dist(fixtures.expanded_profile())
