"""Optimal atomic approximation solvers and their optimality certificates.

Four solvers, all exact up to bisection tolerance:

* ``best_weights_given_locations``: the optimal error for fixed atom
  locations is the largest tube radius over the induced partition of the
  line (outer intervals carry the levels 0 and 1); any cumulative-weight
  vector threading the per-interval windows at that level is optimal, and
  the solver picks window midpoints deterministically.
* ``best_locations_given_weights``: dually, the optimal error for fixed
  weights is the largest window radius of the quantile function over the
  cumulative-weight partition of ``[0, 1]``; atom locations thread the
  induced windows, midpoints again.
* ``best_uniform``: the previous solver at equal weights ``1/n``.
* ``best_unconstrained``: outer bisection on the error level; a level is
  feasible when the greedy covering of ``[0, 1]`` that pushes each
  cumulative weight as far right as the window radius allows reaches 1
  within ``n`` steps.  The greedy supremum has a closed form through the
  inverse-function calculus,

      ``P_next = min(1, level + F(g(P + level) + 2 * level / eps))``,

  because ``g(z-) <= K`` holds exactly for ``z <= F(K)``; this reproduces
  the per-step bisection value exactly at two function evaluations.

Optimality of a pair (locations, weights) at a level is characterized by
the two families of window conditions; ``certify`` re-evaluates both
directly (one predicate evaluation each, no bisection needed since a tube
radius is below a level exactly when the window at that level contains the
value).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import NumericalIntegrityError
from .monotone import INF, MonotoneMap, scale_values
from .levy import AtomicMeasure, tube_radius_detailed, tube_radius_min_detailed
from .distributions import (DistributionSpec, cdf, cdf_left, cdf_map, quantile,
                            quantile_left, quantile_array, quantile_left_array,
                            quantile_map)

__all__ = ["ApproxResult", "Certificate", "best_weights_given_locations",
           "best_locations_given_weights", "best_uniform", "best_unconstrained",
           "certify", "uniform_error", "uniform_error_sweep", "unconstrained_error"]

LEVEL_TOL = 1e-13
CERT_SLACK = 1e-8


@dataclass(frozen=True)
class Certificate:
    """Window-condition flags at a level; ``None`` means not evaluated."""

    level: float
    weight_condition: bool | None = None
    location_condition: bool | None = None

    def to_json(self) -> dict:
        return {"level": self.level,
                "weight_condition": self.weight_condition,
                "location_condition": self.location_condition}


@dataclass(frozen=True)
class ApproxResult:
    """An approximation with its error, certificate, and solver counters."""

    measure: AtomicMeasure
    error: float
    epsilon: float
    certificate: Certificate
    stats: Mapping[str, int]

    def __post_init__(self):
        if not 0.0 <= self.error <= 1.0 + 1e-12:
            raise NumericalIntegrityError(f"error {self.error} outside [0, 1]")

    @property
    def n(self) -> int:
        return self.measure.n

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "error": self.error,
            "atoms": list(self.measure.locations),
            "weights": list(self.measure.weights),
            "certificates": self.certificate.to_json(),
        }


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise ValueError("epsilon must be positive and finite")
    return epsilon


# ---------------------------------------------------------------------------
# certificates: direct window checks, no bisection

def _weight_condition(spec, xs, P, epsilon, level) -> bool:
    n = len(xs)
    ext = (-INF,) + tuple(xs) + (INF,)
    shift = level / epsilon
    for j in range(n + 1):
        pj = P[j]
        lo = cdf_left(spec, ext[j + 1] - shift) - level
        hi = cdf(spec, ext[j] + shift) + level
        if not (lo <= pj <= hi):
            return False
    return True


def _location_condition(spec, xs, P, epsilon, level) -> bool:
    shift = level / epsilon
    for j in range(1, len(xs) + 1):
        lo = quantile_left(spec, P[j] - level) - shift
        hi = quantile(spec, P[j - 1] + level) + shift
        if not (lo <= xs[j - 1] <= hi):
            return False
    return True


def certify(spec: DistributionSpec, result: ApproxResult | AtomicMeasure,
            epsilon: float | None = None, level: float | None = None,
            slack: float = 0.0) -> Certificate:
    """Evaluate both optimality window conditions at a level (pure check).

    ``result`` may be a solver result (defaults: its epsilon and error) or a
    bare measure (then ``epsilon`` and ``level`` are required).  ``slack``
    loosens the level, as solvers do when validating their own output.
    """
    if isinstance(result, ApproxResult):
        measure = result.measure
        epsilon = result.epsilon if epsilon is None else epsilon
        level = result.error if level is None else level
    else:
        measure = result
        if epsilon is None or level is None:
            raise ValueError("bare measures need explicit epsilon and level")
    epsilon = _check_epsilon(epsilon)
    xs = measure.locations
    P = (0.0,) + measure.cumulative
    lv = float(level) + slack
    return Certificate(level=float(level),
                       weight_condition=_weight_condition(spec, xs, P, epsilon, lv),
                       location_condition=_location_condition(spec, xs, P, epsilon, lv))


# ---------------------------------------------------------------------------
# best weights for fixed locations

def best_weights_given_locations(spec: DistributionSpec, locations: Sequence[float],
                                 epsilon: float = 1.0) -> ApproxResult:
    """Optimal weights (deterministic window midpoints) for fixed atoms."""
    epsilon = _check_epsilon(epsilon)
    xs = tuple(float(x) for x in locations)
    if not xs or any(b < a for a, b in zip(xs, xs[1:])):
        raise ValueError("locations must be non-empty and sorted")
    if any(math.isinf(x) or math.isnan(x) for x in xs):
        raise ValueError("locations must be finite")
    n = len(xs)
    f = scale_values(cdf_map(spec), 1.0 / epsilon)

    calls = 0
    fits = [tube_radius_detailed(f, (-INF, xs[0]), 0.0)]
    for j in range(n - 1):
        fits.append(tube_radius_min_detailed(f, (xs[j], xs[j + 1])))
    fits.append(tube_radius_detailed(f, (xs[-1], INF), 1.0 / epsilon))
    calls = sum(fit.predicate_calls for fit in fits)
    level = epsilon * max(fit.value for fit in fits)

    shift = level / epsilon
    P = [0.0]
    for j in range(1, n):
        lo = max(P[-1], cdf_left(spec, xs[j] - shift) - level, 0.0)
        hi = min(1.0, cdf(spec, xs[j - 1] + shift) + level)
        if lo > hi + 1e-9:
            raise NumericalIntegrityError(
                f"empty weight window at atom {j}: [{lo}, {hi}]")
        P.append(0.5 * (lo + min(hi, 1.0)) if lo <= hi else lo)
    P.append(1.0)
    weights = [P[j + 1] - P[j] for j in range(n)]
    measure = AtomicMeasure(xs, weights, normalization_slack=1e-9)
    cert = Certificate(level=level,
                       weight_condition=_weight_condition(
                           spec, xs, (0.0,) + measure.cumulative, epsilon, level + CERT_SLACK))
    if not cert.weight_condition:
        raise NumericalIntegrityError("weight windows failed to certify")
    stats = {"tube_bisections": len(fits), "predicate_calls": calls}
    return ApproxResult(measure, level, epsilon, cert, stats)


# ---------------------------------------------------------------------------
# best locations for fixed weights (vectorized over the partition)

def _tube_min_batch(spec, epsilon, lo, hi, tol=LEVEL_TOL):
    """Window radii of the scaled quantile map on intervals [lo_i, hi_i]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    zero = (epsilon * quantile_left_array(spec, hi)
            <= epsilon * quantile_array(spec, lo))
    y_lo = np.zeros_like(lo)
    y_hi = 0.5 * (hi - lo) + 1e-300  # feasible by the half-length bound
    for _ in range(90):
        if float(np.max(y_hi - y_lo)) <= tol:
            break
        mid = 0.5 * (y_lo + y_hi)
        left = epsilon * quantile_left_array(spec, hi - mid) - mid
        right = epsilon * quantile_array(spec, lo + mid) + mid
        feas = left <= right
        y_hi = np.where(feas, mid, y_hi)
        y_lo = np.where(feas, y_lo, mid)
    return np.where(zero, 0.0, y_hi)


def _locations_from_windows(spec, P, level, epsilon):
    P = np.asarray(P, dtype=float)
    shift = level / epsilon
    lo = quantile_left_array(spec, P[1:] - level) - shift
    hi = quantile_array(spec, P[:-1] + level) + shift
    if np.any(np.isneginf(lo) & np.isposinf(hi)):
        raise NumericalIntegrityError("unbounded location window on both sides")
    mids = np.where(np.isneginf(lo), hi, np.where(np.isposinf(hi), lo, 0.5 * (lo + hi)))
    xs = np.maximum.accumulate(mids)  # monotone rearrangement stays in the windows
    finite_hi = hi[np.isfinite(hi)]
    if np.any(xs[np.isfinite(hi)] > finite_hi + 1e-9):
        raise NumericalIntegrityError("sorted locations left their windows")
    return xs


def best_locations_given_weights(spec: DistributionSpec, weights: Sequence[float],
                                 epsilon: float = 1.0,
                                 tol: float = LEVEL_TOL) -> ApproxResult:
    """Optimal atom locations (window midpoints) for fixed weights.

    Zero weights are allowed: their zero-length intervals contribute no
    error and the free atom sits at its window midpoint.
    """
    epsilon = _check_epsilon(epsilon)
    w = [float(v) for v in weights]
    if not w:
        raise ValueError("need at least one weight")
    if any(v < 0 for v in w):
        raise ValueError("weights must be non-negative")
    total = math.fsum(w)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"weights sum to {total}, not 1")
    n = len(w)
    P = np.zeros(n + 1)
    np.cumsum(np.asarray(w) / total, out=P[1:])
    P[-1] = 1.0

    radii = _tube_min_batch(spec, epsilon, P[:-1], P[1:], tol=tol)
    level = float(np.max(radii))
    xs = _locations_from_windows(spec, P, level, epsilon)
    measure = AtomicMeasure(xs, w, normalization_slack=1e-9)
    cert = Certificate(level=level,
                       location_condition=_location_condition(
                           spec, tuple(xs), (0.0,) + measure.cumulative, epsilon,
                           level + CERT_SLACK))
    if not cert.location_condition:
        raise NumericalIntegrityError("location windows failed to certify")
    stats = {"tube_bisections": n, "predicate_calls": 90 * n}
    return ApproxResult(measure, level, epsilon, cert, stats)


def best_uniform(spec: DistributionSpec, n: int, epsilon: float = 1.0,
                 tol: float = LEVEL_TOL) -> ApproxResult:
    """Best equal-weight approximation with ``n`` atoms."""
    if n < 1:
        raise ValueError("n must be at least 1")
    result = best_locations_given_weights(spec, [1.0 / n] * n, epsilon, tol=tol)
    if result.error > 0.5 / n + 1e-10:
        raise NumericalIntegrityError(
            f"equal-weight error {result.error} exceeds its 1/(2n) bound")
    return result


def uniform_error(spec: DistributionSpec, n: int, epsilon: float = 1.0,
                  tol: float = LEVEL_TOL) -> float:
    """Error of the best equal-weight approximation (no atom construction)."""
    epsilon = _check_epsilon(epsilon)
    if n < 1:
        raise ValueError("n must be at least 1")
    P = np.arange(n + 1) / n
    return float(np.max(_tube_min_batch(spec, epsilon, P[:-1], P[1:], tol=tol)))


def uniform_error_sweep(spec: DistributionSpec, ns: Sequence[int],
                        epsilon: float = 1.0, tol: float = LEVEL_TOL) -> np.ndarray:
    """``uniform_error`` over many sizes at once."""
    return np.asarray([uniform_error(spec, int(n), epsilon, tol=tol) for n in ns])


# ---------------------------------------------------------------------------
# best unconstrained approximation

def _greedy_cover(spec, epsilon, n, level):
    """Push each cumulative weight as far as the window radius allows.

    Returns the cumulative vector; the level is feasible when it ends at 1.
    """
    P = [0.0]
    for _ in range(n):
        prev = P[-1]
        if prev >= 1.0:
            P.append(1.0)
            continue
        anchor = quantile(spec, prev + level)
        if anchor == INF:
            P.append(1.0)
            continue
        reach = cdf(spec, anchor + 2.0 * level / epsilon) if anchor > -INF else 0.0
        P.append(min(1.0, level + reach))
    return P


def unconstrained_error(spec: DistributionSpec, n: int, epsilon: float = 1.0,
                        tol: float = LEVEL_TOL) -> tuple[float, list[float], dict]:
    """Optimal error level by bisection on greedy-covering feasibility.

    Returns (level, cumulative weights at that level, solver counters).
    """
    epsilon = _check_epsilon(epsilon)
    if n < 1:
        raise ValueError("n must be at least 1")
    calls = 0

    def feasible(level):
        nonlocal calls
        calls += 1
        P = _greedy_cover(spec, epsilon, n, level)
        return P[-1] >= 1.0, P

    ok, P = feasible(0.0)
    if ok:
        return 0.0, P, {"outer_iterations": 0, "feasibility_calls": calls}
    lo, hi = 0.0, 0.5
    ok, P = feasible(hi)
    if not ok:
        raise NumericalIntegrityError(
            "level 1/2 infeasible; the half-length bound is violated")
    iters = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        ok, Pm = feasible(mid)
        iters += 1
        if ok:
            hi, P = mid, Pm
        else:
            lo = mid
    return hi, P, {"outer_iterations": iters, "feasibility_calls": calls}


def best_unconstrained(spec: DistributionSpec, n: int, epsilon: float = 1.0,
                       tol: float = LEVEL_TOL) -> ApproxResult:
    """Best ``n``-atom approximation over both locations and weights.

    Both optimality window conditions are re-verified on the returned pair
    at slack ``CERT_SLACK``; failure raises :class:`NumericalIntegrityError`.
    """
    epsilon = _check_epsilon(epsilon)
    level, P, stats = unconstrained_error(spec, n, epsilon, tol=tol)
    P[-1] = 1.0
    weights = [P[j + 1] - P[j] for j in range(n)]
    xs = _locations_from_windows(spec, P, level, epsilon)
    measure = AtomicMeasure(xs, weights, normalization_slack=1e-9)
    Pfull = (0.0,) + measure.cumulative
    cert = Certificate(
        level=level,
        weight_condition=_weight_condition(spec, tuple(xs), Pfull, epsilon,
                                           level + CERT_SLACK),
        location_condition=_location_condition(spec, tuple(xs), Pfull, epsilon,
                                               level + CERT_SLACK))
    if not (cert.weight_condition and cert.location_condition):
        raise NumericalIntegrityError(
            f"optimality certificates failed at level {level}: {cert}")
    if level > 0.5 + 1e-10:
        raise NumericalIntegrityError(f"unconstrained error {level} exceeds 1/2")
    return ApproxResult(measure, level, epsilon, cert, stats)
