import random
from fractions import Fraction

import pytest

from conftest import opposed, random_profile, unanimous
from metric_distortion import fixtures
from metric_distortion.baselines import evaluate_baselines, format_table, random_dictatorship, uniform_lottery
from metric_distortion.profile import make_profile


def test_random_dictatorship_fixture():
    q = random_dictatorship(fixtures.profile()).as_dict()
    assert q["c"] == pytest.approx(3 / 7) and q["d"] == pytest.approx(3 / 7) and q["b"] == pytest.approx(1 / 7)
    assert q["a"] == q["e"] == q["f"] == q["g"] == 0


def test_simple_lotteries():
    assert random_dictatorship(unanimous(3, 2)).as_dict() == {"a": 1.0, "b": 0.0, "c": 0.0}
    assert random_dictatorship(opposed()).probabilities == (0.5, 0.5)
    assert uniform_lottery(fixtures.profile()).probabilities == pytest.approx((1 / 7,) * 7)
    assert uniform_lottery(make_profile("a", ["a"])).probabilities == (1.0,)
    assert uniform_lottery(opposed()).probabilities == (0.5, 0.5)


def test_fixture_table(instance_optimal):
    rows = {r.name: r.distortion for r in evaluate_baselines(fixtures.profile())}
    assert rows["optimal"] == pytest.approx(fixtures.GAMMA_STAR, abs=1e-5)
    assert rows["random-dictatorship"] >= fixtures.GAMMA_STAR
    # exact value from the rational witness: 109/49
    assert Fraction(rows["random-dictatorship"]).limit_denominator(1000) == Fraction(109, 49)


def test_trivial_tables():
    for r in evaluate_baselines(make_profile("a", [(2, "a")])):
        assert r.distortion == pytest.approx(1, abs=1e-9)
    rows = {r.name: r.distortion for r in evaluate_baselines(opposed())}
    assert rows["random-dictatorship"] == pytest.approx(2) == rows["optimal"]


def test_baselines_dominate_optimal_and_rd_below_three():
    rng = random.Random(17)
    for _ in range(12):
        p = random_profile(rng, max_m=3, max_groups=3)
        rows = {r.name: r.distortion for r in evaluate_baselines(p)}
        for name, v in rows.items():
            assert v >= rows["optimal"] - 1e-6, name
        assert rows["random-dictatorship"] < 3


def test_format_table():
    text = format_table(evaluate_baselines(opposed()), precision=3)
    assert text.splitlines()[1].endswith("2.000")
