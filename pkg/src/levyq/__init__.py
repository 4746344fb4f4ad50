"""Best purely atomic approximations of probability measures on the line,
in the classical and slant-parameterized Levy metrics.

The package computes exact distances between a distribution and any
finitely supported measure, optimal atoms and weights (with equal-weight
and unconstrained variants) together with optimality certificates, the
limit laws obeyed by the scaled errors as the number of atoms grows, the
asymptotic distribution of optimal atom locations, and an independent
brute-force oracle for end-to-end verification.
"""

from .errors import NumericalIntegrityError, UnsupportedSpecError
from .monotone import Interval, Jump, MonotoneMap, identity_map, invert, step_map
from .distributions import (
    DistributionSpec, InverseMeasureDescriptor,
    exponential, benford, pareto, normal, uniform, two_point,
    atom_uniform_mixture, cantor, inverse_cantor, empirical,
    cdf, cdf_left, quantile, quantile_left, dilate, inverse_measure,
    ac_density, support, cdf_map, quantile_map, parse_spec, spec_to_json,
    empirical_from_csv,
)
from .levy import (AtomicMeasure, TubeFit, distance_to_atomic, levy_distance,
                   levy_distance_leq, tube_radius, tube_radius_min)
from .quantizer import (ApproxResult, Certificate, best_locations_given_weights,
                        best_uniform, best_unconstrained,
                        best_weights_given_locations, certify, uniform_error,
                        uniform_error_sweep, unconstrained_error)
from .asymptotics import (AsymptoticReport, admissible_uniform_limsup,
                          best_error_limit, best_error_limit_value,
                          best_error_second_order, odd_denominator_index,
                          point_density, point_density_cdf, polylog_half,
                          saturation, saturation_of_index, uniform_error_limits,
                          uniform_error_refined)
from .oracle import GridConfig, brute_force_best, empirical_point_check

__version__ = "0.1.0"

__all__ = [
    "NumericalIntegrityError", "UnsupportedSpecError",
    "Interval", "Jump", "MonotoneMap", "identity_map", "invert", "step_map",
    "DistributionSpec", "InverseMeasureDescriptor",
    "exponential", "benford", "pareto", "normal", "uniform", "two_point",
    "atom_uniform_mixture", "cantor", "inverse_cantor", "empirical",
    "cdf", "cdf_left", "quantile", "quantile_left", "dilate", "inverse_measure",
    "ac_density", "support", "cdf_map", "quantile_map", "parse_spec",
    "spec_to_json", "empirical_from_csv",
    "AtomicMeasure", "TubeFit", "distance_to_atomic", "levy_distance",
    "levy_distance_leq", "tube_radius", "tube_radius_min",
    "ApproxResult", "Certificate", "best_locations_given_weights",
    "best_uniform", "best_unconstrained", "best_weights_given_locations",
    "certify", "uniform_error", "uniform_error_sweep", "unconstrained_error",
    "AsymptoticReport", "admissible_uniform_limsup", "best_error_limit",
    "best_error_limit_value", "best_error_second_order", "odd_denominator_index",
    "point_density", "point_density_cdf", "polylog_half", "saturation",
    "saturation_of_index", "uniform_error_limits", "uniform_error_refined",
    "GridConfig", "brute_force_best", "empirical_point_check",
]
