import numpy as np
import pytest

from metric_distortion import fixtures
from metric_distortion.adversary import Lottery, build_adversary_lp
from metric_distortion.lp import (EPS_CS, Constraint, INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, LpBuilder, LpError,
                                  check_feasible, complementary_slackness, dualize, dump, solve)


def lp_from(sense, c, rows, free=()):
    b = LpBuilder(sense, "t")
    for k in range(len(c)):
        b.var(f"x{k}", free=k in free)
    b.objective = {f"x{k}": v for k, v in enumerate(c) if v}
    for i, (coefs, rel, rhs) in enumerate(rows):
        b.add(f"r{i}", {f"x{k}": a for k, a in enumerate(coefs) if a}, rel, rhs)
    return b.build()


def test_one_variable_dual_pair():
    lp = lp_from("max", [1], [([1], "<=", 1)])
    d = dualize(lp)
    assert d.sense == "min" and d.variables == ("r0",)
    assert d.constraints[0].relation == ">=" and d.constraints[0].rhs == 1
    assert solve(lp).objective == pytest.approx(1) == solve(d).objective


def test_spec_solve_examples():
    assert solve(lp_from("max", [1, 1], [([1, 1], "<=", 2)])).objective == pytest.approx(2)
    assert solve(lp_from("max", [1], [])).status == UNBOUNDED
    assert solve(lp_from("min", [0], [([1], "<=", -1)])).status == INFEASIBLE


def test_beale_cycling_example():
    lp = lp_from("max", [0.75, -20, 0.5, -6], [
        ([0.25, -8, -1, 9], "<=", 0),
        ([0.5, -12, -0.5, 3], "<=", 0),
        ([0, 0, 1, 0], "<=", 1),
    ])
    sol = solve(lp, via_dual=False)
    assert sol.status == OPTIMAL and sol.objective == pytest.approx(1.25, abs=1e-12)


def test_equality_and_free_variables():
    # min x1, x0 + x1 = 1, x0 <= 3, x1 free: optimum at x1 = -2
    lp = lp_from("min", [0, 1], [([1, 1], "=", 1), ([1, 0], "<=", 3)], free=(1,))
    sol = solve(lp)
    assert sol.objective == pytest.approx(-2)
    assert sol.primal["x1"] == pytest.approx(-2)
    assert solve(dualize(lp)).objective == pytest.approx(-2)


def test_model_validation():
    with pytest.raises(LpError):
        LinearProgram("max", ("x",), {"y": 1}, ())
    with pytest.raises(LpError):
        LinearProgram("up", ("x",), {}, ())
    b = LpBuilder("max")
    b.var("x")
    b.add("r", {"x": 1}, "<=", 1)
    b.add("r", {"x": 1}, "<=", 2)
    with pytest.raises(LpError):
        b.build()
    with pytest.raises(LpError):
        lp_from("max", [1], [([1], "<", 1)])


def test_check_feasible():
    lp = lp_from("max", [1], [([1], ">=", 1), ([1], "<=", 4)])
    sol = solve(lp)
    assert check_feasible(lp, sol.primal, 1e-9).ok
    rep = check_feasible(lp, {"x0": 0.0})
    assert not rep.ok and rep.violations[0].where == ("r0",)
    with pytest.raises(LpError, match="x0"):
        check_feasible(lp, {})


def test_dump_golden():
    lp = lp_from("min", [2, 0, -1], [([1, 1, 0], ">=", 1), ([0, 1, 1], "=", 2.5)], free=(2,))
    assert dump(lp) == (
        "# t\n"
        "minimize\n"
        "  obj: +2 x0 -1 x2\n"
        "subject to\n"
        "  r0: +1 x0 +1 x1 >= 1\n"
        "  r1: +1 x1 +1 x2 = 2.5\n"
        "free\n"
        "  x2\n"
    )


def test_adversary_lp_and_its_dual_agree():
    p = fixtures.profile()
    q = Lottery.from_mapping(p, fixtures.Q_STAR, normalize=True)
    lp = build_adversary_lp(p, q, "c")
    direct = solve(lp, via_dual=False)
    dual = solve(dualize(lp), via_dual=False)
    assert direct.objective == pytest.approx(dual.objective, abs=1e-8)


def random_lp(rng):
    m, n = rng.integers(1, 6), rng.integers(1, 6)
    A = rng.integers(-4, 5, size=(m, n)).astype(float)
    rhs = rng.integers(-3, 6, size=m).astype(float)
    rel = rng.choice(["<=", ">=", "="], size=m, p=[0.6, 0.25, 0.15])
    c = rng.integers(-4, 5, size=n).astype(float)
    free = tuple(k for k in range(n) if rng.random() < 0.2)
    sense = "max" if rng.random() < 0.5 else "min"
    return lp_from(sense, c, [(A[i], rel[i], rhs[i]) for i in range(m)], free)


def test_fuzz_against_highs():
    rng = np.random.default_rng(12345)
    counts = {OPTIMAL: 0, INFEASIBLE: 0, UNBOUNDED: 0}
    for _ in range(300):
        lp = random_lp(rng)
        ours = solve(lp, backend="simplex", via_dual=False)
        ref = solve(lp, backend="highs", via_dual=False)
        assert ours.status == ref.status, dump(lp)
        counts[ours.status] += 1
        if ours.status != OPTIMAL:
            continue
        assert ours.objective == pytest.approx(ref.objective, abs=1e-8)
        assert check_feasible(lp, ours.primal, 1e-9).ok
        assert complementary_slackness(lp, ours) <= EPS_CS
        d = dualize(lp)
        dsol = solve(d, via_dual=False)
        assert dsol.objective == pytest.approx(ours.objective, abs=1e-7)
        dd = solve(dualize(d), via_dual=False)
        assert dd.objective == pytest.approx(ours.objective, abs=1e-7)
    # the generator should exercise every status
    assert min(counts.values()) >= 10, counts


def test_dual_route_matches_direct():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 60:
        lp = random_lp(rng)
        # move every rhs to the side that keeps the origin feasible
        sign = {"<=": 1.0, ">=": -1.0, "=": 0.0}
        rows = tuple(Constraint(c.name, c.terms, c.relation, sign[c.relation] * abs(c.rhs)) for c in lp.constraints)
        lp = LinearProgram(lp.sense, lp.variables, lp.objective, rows, lp.free, lp.name)
        direct = solve(lp, via_dual=False)
        routed = solve(lp, via_dual=True)
        assert direct.status == routed.status
        if direct.optimal:
            assert routed.objective == pytest.approx(direct.objective, abs=1e-8)
            assert check_feasible(lp, routed.primal, 1e-8).ok
        checked += 1


def test_determinism():
    rng = np.random.default_rng(3)
    lp = random_lp(rng)
    while not solve(lp).optimal:
        lp = random_lp(rng)
    a, b = solve(lp), solve(lp)
    assert a.primal == b.primal and a.dual == b.dual


def test_unknown_backend():
    with pytest.raises(LpError):
        solve(lp_from("max", [1], [([1], "<=", 1)]), backend="nope")
