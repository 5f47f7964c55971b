"""Two-step support selection for noisy linear measurements.

Thin wrapper around the C++ core: SLOPE solvers, the split-sample
selector, median-of-means variants, risk simulation and the
minimax bound calculators.
"""

from ._core import (
    A_PRACTICAL,
    A_THEORY,
    __version__,
    chi2_tail_bound,
    gen_instance,
    lambda_weights,
    mc_risk,
    mom_select,
    mom_threshold,
    prox_sorted_l1,
    psi_mc,
    psi_plus_mc,
    select,
    slope_solve,
    sorted_l1_norm,
    sqrt_slope_solve,
    student_tail_envelope,
    sufficient_n,
)

__all__ = [
    "A_PRACTICAL",
    "A_THEORY",
    "__version__",
    "chi2_tail_bound",
    "gen_instance",
    "lambda_weights",
    "mc_risk",
    "mom_select",
    "mom_threshold",
    "prox_sorted_l1",
    "psi_mc",
    "psi_plus_mc",
    "select",
    "slope_solve",
    "sorted_l1_norm",
    "sqrt_slope_solve",
    "student_tail_envelope",
    "sufficient_n",
]
