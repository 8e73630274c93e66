"""Instance-optimal randomized social choice under metric distortion, by linear programming."""

from .adversary import DistortionResult, Lottery, build_adversary_lp, distortion_of, solve_adversary
from .baselines import evaluate_baselines, random_dictatorship, uniform_lottery
from .certificate import Certificate, load_appendix_b, verify_certificate
from .lp import LinearProgram, LpBuilder, SolverError, check_feasible, dualize, solve
from .metric import Metric, MetricGraph, PointSpace, check_consistency, check_triangle, metric_closure
from .optimal import build_best_dist, build_best_dist_dual, optimal_dual_metrics, optimal_scf
from .profile import ClientGroup, PreferenceProfile, ProfileError, coalesce, load_profile, parse_profile
from .search import SearchSpec, enumerate_profiles, search_instances

__version__ = "0.1.0"

__all__ = [
    "Certificate", "ClientGroup", "DistortionResult", "LinearProgram", "Lottery", "LpBuilder", "Metric",
    "MetricGraph", "PointSpace", "PreferenceProfile", "ProfileError", "SearchSpec", "SolverError",
    "build_adversary_lp", "build_best_dist", "build_best_dist_dual", "check_consistency", "check_feasible",
    "check_triangle", "coalesce", "distortion_of", "dualize", "enumerate_profiles", "evaluate_baselines",
    "load_appendix_b", "load_profile", "metric_closure", "optimal_dual_metrics", "optimal_scf",
    "parse_profile", "random_dictatorship", "search_instances", "solve", "solve_adversary",
    "uniform_lottery", "verify_certificate",
]
