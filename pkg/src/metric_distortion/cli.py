"""Command-line interface.

Exit codes: 0 success, 1 computation failure (solver error, infeasible
certificate, failed reproduction item), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from typing import Any

from . import fixtures
from .adversary import Lottery, distortion_of, solve_adversary
from .baselines import evaluate_baselines, format_table
from .certificate import (INTERNAL_TOL, PRINTED_TOL, Certificate, certificate_from_metrics, load_appendix_b,
                          verify_certificate)
from .lp import LpError, SolverError
from .metric import MetricError
from .optimal import optimal_dual_metrics, optimal_scf
from .profile import ProfileError, load_profile
from .search import SearchSpec, iter_evaluations, summarize

MODE_ENV = "METRIC_DISTORTION_MODE"
LOTTERY_TOL = 1e-6
VALUE_TOL = 1e-5

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


_EXACT_KEYS = {"tol"}


def _round(obj: Any, precision: int) -> Any:
    if isinstance(obj, float):
        if math.isinf(obj) or math.isnan(obj):
            return None
        return round(obj, precision)
    if isinstance(obj, dict):
        return {k: v if k in _EXACT_KEYS else _round(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, precision) for v in obj]
    return obj


def _emit(args, obj: Any) -> None:
    print(json.dumps(_round(obj, args.precision)))


def _rational(args) -> bool:
    if args.rational:
        return True
    mode = os.environ.get(MODE_ENV, "float")
    if mode not in ("float", "rational"):
        raise InputError(f"{MODE_ENV} must be 'float' or 'rational', got {mode!r}")
    return mode == "rational"


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def _profile(path: str):
    try:
        return load_profile(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except ProfileError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_lottery(path: str, profile) -> Lottery:
    """JSON object ``{facility: probability}`` or lines ``facility probability``."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        probs = json.loads(text)
        if not isinstance(probs, dict):
            raise InputError(f"{path}: lottery JSON must be an object")
    except json.JSONDecodeError:
        probs = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                probs[parts[0]] = float(parts[1])
                if len(parts) != 2:
                    raise ValueError
            except (ValueError, IndexError):
                raise InputError(f"{path}: line {n}: expected 'facility probability'") from None
    try:
        values = {f: float(v) for f, v in probs.items()}
    except (TypeError, ValueError):
        raise InputError(f"{path}: probabilities must be numbers") from None
    if any(v < 0 or math.isnan(v) for v in values.values()):
        raise InputError(f"{path}: probabilities must be nonnegative")
    total = sum(values.values())
    if abs(total - 1) > LOTTERY_TOL + 1e-12:
        raise InputError(f"{path}: probabilities sum to {total!r}, not 1 within {LOTTERY_TOL}")
    try:
        return Lottery.from_mapping(profile, values, normalize=True)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_solve(args) -> int:
    profile = _profile(args.profile)
    res = optimal_scf(profile, args.backend)
    dual_phi = None if args.no_dual else optimal_dual_metrics(profile, args.backend).phi
    _emit(args, res.to_json(dual_phi))
    return EXIT_OK


def cmd_adversary(args) -> int:
    profile = _profile(args.profile)
    q = load_lottery(args.lottery, profile)
    if args.o is not None:
        if args.o not in profile.facilities:
            raise InputError(f"--o: {args.o!r} is not a facility")
        out = solve_adversary(profile, q, args.o, args.backend)
        _emit(args, {"value": None if out.unbounded else out.value, "o_star": args.o,
                     "witness": None if out.witness is None else out.witness.to_json(),
                     "unbounded": out.unbounded})
    else:
        _emit(args, distortion_of(profile, q, args.backend).to_json())
    return EXIT_OK


def cmd_dual(args) -> int:
    profile = _profile(args.profile)
    res = optimal_dual_metrics(profile, args.backend)
    cert = certificate_from_metrics(profile, res.metrics, res.phi)
    report = verify_certificate(cert, INTERNAL_TOL)
    out = {"phi": res.phi, "certificate_phi": report.phi, "feasible": report.feasible}
    if args.certificate_out:
        with open(args.certificate_out, "w", encoding="utf-8") as fh:
            json.dump(cert.to_json(), fh)
        out["certificate"] = args.certificate_out
    _emit(args, out)
    return EXIT_OK if report.feasible else EXIT_FAIL


def cmd_verify_cert(args) -> int:
    data = _read_json(args.certificate)
    try:
        cert = Certificate.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.certificate}: malformed certificate ({exc})") from None
    tol = args.tolerance if args.tolerance is not None else INTERNAL_TOL
    report = verify_certificate(cert, tol, exact=_rational(args))
    _emit(args, report.to_json())
    return EXIT_OK if report.feasible and report.claim_ok is not False else EXIT_FAIL


def cmd_baseline(args) -> int:
    profile = _profile(args.profile)
    rows = evaluate_baselines(profile, args.backend)
    if args.json:
        _emit(args, [r.to_json() for r in rows])
    else:
        print(format_table(rows, args.precision))
    return EXIT_OK


def cmd_search(args) -> int:
    include = tuple(_profile(p) for p in args.include)
    try:
        spec = SearchSpec(args.m, args.mode, args.max_groups, args.weight_cap, args.threshold,
                          args.budget, args.seed, include)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    def stream():
        for ev in iter_evaluations(spec, args.backend, args.jobs):
            if ev.error is not None or ev.gamma >= spec.threshold:
                _emit(args, ev.to_json())
            yield ev

    summary = summarize(spec, stream())
    _emit(args, {"summary": summary.to_json()})
    return EXIT_OK


def reproduce(tolerance: float | None = None, rational: bool = False, as_printed: bool = False,
              backend: str | None = None) -> list[dict]:
    """Run the four reproduction items and return one record per item."""
    prof = fixtures.profile()
    target = fixtures.GAMMA_STAR
    items = []

    opt = optimal_scf(prof, backend)
    items.append({"item": "solve", "gamma": opt.gamma, "ok": abs(opt.gamma - target) <= VALUE_TOL})

    dual = optimal_dual_metrics(prof, backend)
    items.append({"item": "dual", "phi": dual.phi, "ok": abs(dual.phi - target) <= VALUE_TOL})

    cert_tol = INTERNAL_TOL if tolerance is None else tolerance
    rep = verify_certificate(load_appendix_b(), cert_tol)
    ok = rep.feasible and rep.claim_ok and abs(rep.normalization - 1) <= 1e-4
    rec = {"item": "certificate", "phi": rep.phi, "normalization": rep.normalization,
           "feasible": rep.feasible, "tol": cert_tol}
    if rational:
        exact = verify_certificate(load_appendix_b(), exact=True)
        rec["rational_feasible"] = exact.feasible
        rec["rational_phi"] = None if exact.phi is None else str(exact.phi)
        rec["rational_normalization"] = str(exact.normalization)
        ok = ok and exact.feasible and abs(float(exact.phi) - target) <= PRINTED_TOL
    rec["ok"] = bool(ok)
    items.append(rec)

    a_tol = fixtures.MULTIPLIER_TOL if tolerance is None else tolerance
    from .optimal import build_best_dist

    lp = build_best_dist(fixtures.expanded_profile())
    printed = fixtures.check_multipliers(a_tol, errata=False, lp=lp)
    corrected = fixtures.check_multipliers(a_tol, errata=True, lp=lp)
    used = printed if as_printed else corrected
    items.append({"item": "multipliers", "tol": a_tol, "errata_applied": not as_printed,
                  "max_violation": used.max_excess, "violations": len(used.violations),
                  "max_violation_as_printed": printed.max_excess,
                  "violations_as_printed": len(printed.violations), "ok": used.ok})
    return items


def cmd_reproduce_paper(args) -> int:
    items = reproduce(args.tolerance, _rational(args), args.as_printed, args.backend)
    for rec in items:
        _emit(args, rec)
    ok = all(rec["ok"] for rec in items)
    _emit(args, {"summary": "pass" if ok else "FAIL", "passed": sum(r["ok"] for r in items), "items": len(items)})
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=6, help="decimals in numeric output (default 6)")
    common.add_argument("--rational", action="store_true", help="re-verify certificates in exact arithmetic")
    common.add_argument("--tolerance", type=float, default=None, help="feasibility tolerance for checks")
    common.add_argument("--backend", choices=("simplex", "highs"), default=None,
                        help="LP solver (default: $METRIC_DISTORTION_SOLVER or simplex)")

    p = argparse.ArgumentParser(prog="metric-distortion", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="optimal lottery and distortion of a profile")
    s.add_argument("profile")
    s.add_argument("--no-dual", action="store_true", help="skip the dual solve")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("adversary", parents=[common], help="distortion of a given lottery")
    s.add_argument("profile")
    s.add_argument("lottery")
    s.add_argument("--o", default=None, help="single reference facility")
    s.set_defaults(func=cmd_adversary)

    s = sub.add_parser("dual", parents=[common], help="solve the dual and emit a certificate")
    s.add_argument("profile")
    s.add_argument("--certificate-out", default=None)
    s.set_defaults(func=cmd_dual)

    s = sub.add_parser("verify-cert", parents=[common], help="verify a lower-bound certificate")
    s.add_argument("certificate")
    s.set_defaults(func=cmd_verify_cert)

    s = sub.add_parser("baseline", parents=[common], help="distortion of classical lotteries")
    s.add_argument("profile")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_baseline)

    s = sub.add_parser("search", parents=[common], help="search small profiles for high distortion")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--max-groups", type=int, default=2)
    s.add_argument("--weight-cap", type=int, default=1)
    s.add_argument("--threshold", type=float, default=1.0)
    s.add_argument("--budget", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", choices=("exhaustive", "sample"), default="exhaustive")
    s.add_argument("--include", action="append", default=[], metavar="PROFILE", help="profile to evaluate first")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("reproduce-paper", parents=[common], help="check the embedded 7x7 instance end to end")
    s.add_argument("--as-printed", action="store_true", help="check the printed min-max multipliers without errata")
    s.set_defaults(func=cmd_reproduce_paper)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverError, MetricError, LpError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
