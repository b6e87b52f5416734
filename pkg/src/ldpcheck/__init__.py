"""Large-deviation rate functions by convex duality, checked against exact
and Monte Carlo tail probabilities of empirical means."""
from .distributions import (
    DistributionSpec,
    DomainError,
    SpecError,
    SumDistribution,
    UnsupportedKindError,
    essential_sup,
    exact_sum_distribution,
    mean,
    parse_spec,
    sample,
    tilt,
    tilted_sample,
)
from .entropy import EntropyCurve, concatenation_check, dual_gap, entropy_curve, shape_check
from .pressure import pressure, pressure_derivative, truncated_pressure
from .rate import RateResult, optimize_lambda, rate, rate_curve
from .tail import TailEstimate, tail_exact, tail_naive, tail_tilted

__version__ = "0.1.0"
