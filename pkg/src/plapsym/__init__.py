"""Bounded one-dimensional solutions of -(|u'|^{p-2} u')' = f(u) and the
half-space / ball experiments built on them."""

from .nonlinearity import (
    NonlinearitySpec,
    ZeroInfo,
    HypothesisReport,
    eval_f,
    eval_F,
    isolate_zeros,
    check_smp,
    check_no_zero_left_of,
    check_thm13,
)
from .classification import ProfileEntry, catalog, classify
from .profile import Profile, build_profile, oracle_integrate, time_of_level
from .ball import RadialSolution, minimize_radial, sup_norm_scan, truncate
from .strip import GridSolution, compare_to_profile, solve_strip, symmetry_deviation

__version__ = "0.1.0"
