"""Variance of p-norms of Gaussian vectors: theory, bounds, experiments.

The package splits into scalar Gaussian primitives (gaussian), truncated
moments (truncated), order statistics (orderstats), the closed-form
variance theory across the three growth regimes of p (variance), seeded
Monte Carlo estimators (montecarlo), random almost-round sections
(subspaces), log-domain carriers (logdomain), and the calibrated
constants that every asymptotic statement hides (config).
"""

from .config import Constants, DEFAULT_CONSTANTS, dump_constants, load_constants, parse_constants
from .errors import ConfigError, DomainError, LplabError, NumericalError
from .gaussian import (
    abs_cdf,
    abs_moment,
    abs_tail,
    abs_tail_log,
    lp_norm,
    lp_norm_rows,
    mills_bounds,
    quantile,
    quantile_approx,
    quantile_tail,
    upper_quantile,
)
from .logdomain import (
    ONE,
    ZERO,
    BoundBracket,
    LogValue,
    log_diff_exp,
    log_mean_exp,
    log_sum_exp,
)
from .montecarlo import (
    MCEstimate,
    MomentAccumulator,
    RngStream,
    SmallBallEstimate,
    default_samples,
    gaussian_draws,
    mc_lower_identity,
    mc_negative_moment,
    mc_norm_stats,
    mc_small_ball,
    mc_truncated_stats,
    merge_pairwise,
    threshold_log_value,
    wilson_interval,
)
from .orderstats import (
    chernoff_bound,
    deviation_bound_crude,
    deviation_bound_initial,
    deviation_bound_intermediate,
    orderstat_cdf_exact,
    sample_top_orderstats,
)
from .subspaces import (
    DistortionResult,
    SphericityResult,
    SubspaceBasis,
    SweepRow,
    distortion,
    random_subspace,
    sphere_net,
    sphericity_experiment,
    transition_sweep,
)
from .truncated import (
    HalfMaxWindow,
    TruncationSpec,
    half_max_window,
    incomplete_integral,
    moment_bracket,
    moment_scale,
    trunc_moment_chi,
    trunc_moment_min,
)
from .variance import (
    LemmaCheckEntry,
    LemmaCheckReport,
    RegimePoint,
    a_quantity,
    auto_p_grid,
    classify,
    combined_upper,
    lemma_checks,
    lower_envelope,
    negative_moment_bound,
    predict_variance,
    quantile_power_sum,
    small_ball_bound,
    tail_term,
    truncation_level_M,
    upper_envelope,
)

__version__ = "0.1.0"

__all__ = [
    "BoundBracket",
    "ConfigError",
    "Constants",
    "DEFAULT_CONSTANTS",
    "DistortionResult",
    "DomainError",
    "HalfMaxWindow",
    "LemmaCheckEntry",
    "LemmaCheckReport",
    "LogValue",
    "LplabError",
    "MCEstimate",
    "MomentAccumulator",
    "NumericalError",
    "ONE",
    "RegimePoint",
    "RngStream",
    "SmallBallEstimate",
    "SphericityResult",
    "SubspaceBasis",
    "SweepRow",
    "TruncationSpec",
    "ZERO",
    "a_quantity",
    "abs_cdf",
    "abs_moment",
    "abs_tail",
    "abs_tail_log",
    "auto_p_grid",
    "chernoff_bound",
    "classify",
    "combined_upper",
    "default_samples",
    "deviation_bound_crude",
    "deviation_bound_initial",
    "deviation_bound_intermediate",
    "distortion",
    "dump_constants",
    "gaussian_draws",
    "half_max_window",
    "incomplete_integral",
    "lemma_checks",
    "load_constants",
    "log_diff_exp",
    "log_mean_exp",
    "log_sum_exp",
    "lower_envelope",
    "lp_norm",
    "lp_norm_rows",
    "mc_lower_identity",
    "mc_negative_moment",
    "mc_norm_stats",
    "mc_small_ball",
    "mc_truncated_stats",
    "merge_pairwise",
    "mills_bounds",
    "moment_bracket",
    "moment_scale",
    "negative_moment_bound",
    "orderstat_cdf_exact",
    "parse_constants",
    "predict_variance",
    "quantile",
    "quantile_approx",
    "quantile_power_sum",
    "quantile_tail",
    "random_subspace",
    "sample_top_orderstats",
    "small_ball_bound",
    "sphere_net",
    "sphericity_experiment",
    "tail_term",
    "threshold_log_value",
    "transition_sweep",
    "trunc_moment_chi",
    "trunc_moment_min",
    "truncation_level_M",
    "upper_envelope",
    "upper_quantile",
    "wilson_interval",
]
