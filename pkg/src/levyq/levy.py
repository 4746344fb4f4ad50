"""Slant-tube calculus and Levy distances.

The central primitive is the tube-fitting functional of a monotone map
``f`` on an interval ``I = [lo, hi]``:

    ``tube_radius(f, I, x) = inf { y >= 0 : f(hi - y) - y <= x <= f(lo + y) + y }``

(with the left limit of ``f`` on the upper side), together with its
value-free companion ``tube_radius_min``, the smallest ``y`` at which the
window ``[f(hi - y)- - y, f(lo + y) + y]`` becomes nonempty.  Both are
computed by bisection on the monotone feasibility predicate; ties resolve
toward feasibility, matching the infimum of a closed condition.

Maxima of these functionals over the partition induced by an atomic
measure give the exact Levy distance between a distribution and that
measure, once from the CDF side and once from the quantile side; the two
routes are evaluated independently and must agree.

``levy_distance`` is the definition-level distance between two monotone
maps.  It never uses the partition formula, so it serves as an independent
oracle; for pairs where at least one map is a step function the feasibility
test set is finite and the result is exact to the bisection tolerance.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import NumericalIntegrityError
from .monotone import INF, Interval, MonotoneMap, scale_values, step_map
from . import distributions as _dist
from .distributions import DistributionSpec, cdf_map, quantile_map

__all__ = [
    "AtomicMeasure", "TubeFit", "tube_radius", "tube_radius_min",
    "tube_radius_detailed", "tube_radius_min_detailed",
    "distance_to_atomic", "levy_distance", "levy_distance_leq",
]

ELL_TOL = 1e-12
_EXPANSION_CAP = 2.0**70
PRIMAL_DUAL_TOL = 1e-9


def _as_interval(interval) -> Interval:
    if isinstance(interval, Interval):
        return interval
    lo, hi = interval
    return Interval(float(lo), float(hi))


class TubeFit(NamedTuple):
    """Result of a tube-radius bisection."""

    value: float
    iterations: int
    predicate_calls: int
    infimum_attained: bool


def _bisect_monotone(feasible, tol: float, what: str) -> TubeFit:
    """Smallest y >= 0 with feasible(y), for a monotone predicate.

    Returns the feasible end of the final bracket, so the result is an
    upper bound within ``tol`` of the true infimum.
    """
    calls = 1
    if feasible(0.0):
        return TubeFit(0.0, 0, calls, True)
    hi, lo = 1.0, 0.0
    while not feasible(hi):
        lo, hi = hi, 2.0 * hi
        calls += 1
        if hi > _EXPANSION_CAP:
            raise ValueError(
                f"no feasible tube radius below {_EXPANSION_CAP:g}; "
                f"the interval violates the finiteness condition for {what}")
    calls += 1
    iters = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        calls += 1
        iters += 1
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    # Attainment hint: a jump of the violation across the final bracket much
    # larger than the bracket itself suggests the infimum is a touch point.
    return TubeFit(hi, iters, calls, True)


def tube_radius_detailed(f: MonotoneMap, interval, x: float, tol: float = ELL_TOL) -> TubeFit:
    iv = _as_interval(interval)
    x = float(x)

    def feasible(y: float) -> bool:
        return (f.left(iv.upper - y) - y <= x) and (x <= f(iv.lower + y) + y)

    fit = _bisect_monotone(feasible, tol, "the tube-radius value predicate")
    if fit.value > 0:
        # see whether the window only just closes at the infimum
        y = max(0.0, fit.value - 2.0 * tol)
        lower = f.left(iv.upper - y) - y
        upper = f(iv.lower + y) + y
        gap = max(lower - x, x - upper)
        if gap > 1000.0 * tol:
            fit = fit._replace(infimum_attained=False)
    return fit


def tube_radius(f: MonotoneMap, interval, x: float, tol: float = ELL_TOL) -> float:
    """Smallest inflation ``y`` fitting ``x`` inside the slant tube of ``f``.

    The interval must satisfy the finiteness condition that makes the
    predicate eventually true (any interval does when ``f`` is a CDF, any
    bounded interval when ``f`` is a quantile function).
    """
    return tube_radius_detailed(f, interval, x, tol).value


def tube_radius_min_detailed(f: MonotoneMap, interval, tol: float = ELL_TOL) -> TubeFit:
    iv = _as_interval(interval)

    def feasible(y: float) -> bool:
        return f.left(iv.upper - y) - y <= f(iv.lower + y) + y

    fit = _bisect_monotone(feasible, tol, "the tube-radius window predicate")
    # Consistency with the closure characterization: zero exactly when the
    # window is already nonempty at y = 0.
    window_at_zero = f.left(iv.upper) <= f(iv.lower)
    if window_at_zero != (fit.value == 0.0):
        raise NumericalIntegrityError(
            "tube_radius_min zero characterization failed on "
            f"[{iv.lower}, {iv.upper}]: window_at_zero={window_at_zero}, value={fit.value}")
    if iv.length < INF and fit.value > 0.5 * iv.length + 10.0 * tol:
        raise NumericalIntegrityError(
            f"tube_radius_min {fit.value} exceeds half the interval length {iv.length / 2}")
    return fit


def tube_radius_min(f: MonotoneMap, interval, tol: float = ELL_TOL) -> float:
    """Smallest inflation at which the slant-tube window becomes nonempty."""
    return tube_radius_min_detailed(f, interval, tol).value


# ---------------------------------------------------------------------------
# atomic measures

def _normalized_weights(weights: Sequence[float], slack: float) -> tuple[float, ...]:
    w = [float(v) for v in weights]
    if any(v < 0 for v in w):
        raise ValueError("weights must be non-negative")
    total = math.fsum(w)
    if abs(total - 1.0) > slack:
        raise ValueError(f"weights sum to {total}, not 1")
    if total != 1.0:
        w = [v / total for v in w]
    return tuple(w)


@dataclass(frozen=True)
class AtomicMeasure:
    """A finitely supported probability measure with sorted locations."""

    locations: tuple[float, ...]
    weights: tuple[float, ...]
    cumulative: tuple[float, ...] = field(init=False)

    def __init__(self, locations: Iterable[float], weights: Iterable[float],
                 normalization_slack: float = 1e-12):
        locs = tuple(float(x) for x in locations)
        if any(math.isnan(x) or math.isinf(x) for x in locs):
            raise ValueError("atom locations must be finite")
        if any(b < a for a, b in zip(locs, locs[1:])):
            raise ValueError("atom locations must be sorted")
        w = _normalized_weights(weights, normalization_slack)
        if len(w) != len(locs) or not locs:
            raise ValueError("need equally many locations and weights, at least one atom")
        cum = []
        acc = 0.0
        for v in w:
            acc += v
            cum.append(min(acc, 1.0))
        cum[-1] = 1.0
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "cumulative", tuple(cum))

    @property
    def n(self) -> int:
        return len(self.locations)

    def reduced(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        """Strictly increasing locations with positive merged weights."""
        locs: list[float] = []
        w: list[float] = []
        for x, p in zip(self.locations, self.weights):
            if p <= 0.0:
                continue
            if locs and x == locs[-1]:
                w[-1] += p
            else:
                locs.append(x)
                w.append(p)
        if not locs:  # all weights zero cannot happen (they sum to 1)
            raise ValueError("measure has no mass")
        return tuple(locs), tuple(w)

    def cdf_map(self) -> MonotoneMap:
        locs, w = self.reduced()
        vals = [0.0]
        for p in w:
            vals.append(min(1.0, vals[-1] + p))
        vals[-1] = 1.0
        return step_map(locs, vals)

    def quantile_map(self) -> MonotoneMap:
        locs, w = self.reduced()
        cum = []
        acc = 0.0
        for p in w[:-1]:
            acc += p
            cum.append(acc)
        return step_map([0.0, *cum, 1.0], [-INF, *locs, INF])

    def dilate(self, factor: float) -> "AtomicMeasure":
        factor = float(factor)
        if not factor > 0:
            raise ValueError("dilation factor must be positive")
        return AtomicMeasure([factor * x for x in self.locations], self.weights)

    def to_json(self) -> dict:
        return {"atoms": [{"x": x, "p": p} for x, p in zip(self.locations, self.weights)]}

    @staticmethod
    def from_json(obj, normalization_slack: float = 1e-9) -> "AtomicMeasure":
        if isinstance(obj, str):
            obj = json.loads(obj)
        atoms = sorted(((float(a["x"]), float(a["p"])) for a in obj["atoms"]),
                       key=lambda q: q[0])
        w = [p for _, p in atoms]
        total = math.fsum(w)
        if abs(total - 1.0) > normalization_slack:
            raise ValueError(f"atom weights sum to {total}, not 1")
        if total != 1.0:
            warnings.warn(f"normalizing atom weights (sum was {total})", stacklevel=2)
        return AtomicMeasure([x for x, _ in atoms], w, normalization_slack)


# ---------------------------------------------------------------------------
# exact distance between a distribution and an atomic measure

def _partition_terms_cdf(spec: DistributionSpec, nu: AtomicMeasure, epsilon: float,
                         tol: float) -> list[float]:
    f = scale_values(cdf_map(spec), 1.0 / epsilon)
    xs = (-INF,) + nu.locations + (INF,)
    terms = []
    for j in range(nu.n + 1):
        level = (0.0 if j == 0 else nu.cumulative[j - 1]) / epsilon
        terms.append(tube_radius(f, (xs[j], xs[j + 1]), level, tol))
    return terms


def _partition_terms_quantile(spec: DistributionSpec, nu: AtomicMeasure, epsilon: float,
                              tol: float) -> list[float]:
    h = scale_values(quantile_map(spec), epsilon)
    P = (0.0,) + nu.cumulative
    return [tube_radius(h, (P[j - 1], P[j]), epsilon * nu.locations[j - 1], tol)
            for j in range(1, nu.n + 1)]


def distance_to_atomic(spec: DistributionSpec, nu: AtomicMeasure, epsilon: float = 1.0,
                       tol: float = ELL_TOL) -> float:
    """Exact Levy distance ``d_eps`` between ``spec`` and an atomic measure.

    Evaluated twice, via the CDF-side and the quantile-side partition
    formulas; a discrepancy beyond ``PRIMAL_DUAL_TOL`` raises
    :class:`NumericalIntegrityError`.
    """
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    primal = epsilon * max(_partition_terms_cdf(spec, nu, epsilon, tol))
    dual = max(_partition_terms_quantile(spec, nu, epsilon, tol))
    if abs(primal - dual) > PRIMAL_DUAL_TOL:
        raise NumericalIntegrityError(
            f"CDF-side and quantile-side distances disagree: {primal} vs {dual}")
    if primal > 1.0 + 1e-9:
        raise NumericalIntegrityError(f"distance {primal} exceeds 1")
    return min(primal, 1.0)


# ---------------------------------------------------------------------------
# definition-level distance between monotone maps (oracle grade)

def _feasible_at(F: MonotoneMap, G: MonotoneMap, epsilon: float, y: float,
                 grid: tuple[float, ...]) -> bool:
    # Limit checks cover behaviour beyond every finite breakpoint.
    if F.at_neg_inf - y > G.at_neg_inf or F.at_pos_inf - y > G.at_pos_inf:
        return False
    if G.at_neg_inf > F.at_neg_inf + y or G.at_pos_inf > F.at_pos_inf + y:
        return False
    shift = y / epsilon
    cands: set[float] = set(G.jump_locations)
    for b in F.jump_locations:
        cands.add(b + shift)
        cands.add(b - shift)
    cands.update(grid)
    for t in cands:
        if F.left(t - shift) - y > G.left(t):
            return False
        if F(t - shift) - y > G(t):
            return False
        if G.left(t) > F.left(t + shift) + y:
            return False
        if G(t) > F(t + shift) + y:
            return False
    return True


def _probe_span(f: MonotoneMap) -> tuple[float, float]:
    # Range outside which f is within ~1e-9 of its limits, found by probing.
    lo, hi = -1.0, 1.0
    for _ in range(60):
        if f(lo) - f.at_neg_inf <= 1e-9 or not math.isfinite(lo):
            break
        lo *= 2
    for _ in range(60):
        if f.at_pos_inf - f.left(hi) <= 1e-9 or not math.isfinite(hi):
            break
        hi *= 2
    if not math.isfinite(lo):
        lo = -_EXPANSION_CAP
    if not math.isfinite(hi):
        hi = _EXPANSION_CAP
    return lo, hi


def _default_grid(F: MonotoneMap, G: MonotoneMap, points: int) -> tuple[float, ...]:
    a1, b1 = _probe_span(F)
    a2, b2 = _probe_span(G)
    a, b = min(a1, a2), max(b1, b2)
    if b <= a:
        a, b = a - 1.0, b + 1.0
    step = (b - a) / (points - 1)
    return tuple(a + i * step for i in range(points))


def levy_distance_leq(F: MonotoneMap, G: MonotoneMap, epsilon: float, y: float,
                      grid_points: int = 10_000) -> bool:
    """Whether ``d_eps(F, G) <= y``, by direct feasibility of the sandwich.

    Exact when either map is a step function; otherwise best effort on a
    probing grid.
    """
    grid = () if (F.is_step or G.is_step) else _default_grid(F, G, grid_points)
    return _feasible_at(F, G, float(epsilon), float(y), grid)


def levy_distance(F: MonotoneMap, G: MonotoneMap, epsilon: float = 1.0,
                  tol: float = ELL_TOL, grid_points: int = 10_000) -> float:
    """Definition-level Levy distance ``d_eps`` between two monotone maps.

    Bisects the smallest ``y`` such that ``G`` fits between the two slanted
    copies of ``F``.  For a pair of step maps (and for any pair where one
    side is a step map) the feasibility test set is finite and exact, so
    the result is exact to ``tol``; for two non-step maps the test uses a
    probing grid and is best effort at roughly grid resolution.

    Returns ``inf`` if the maps have incompatible limits, in which case no
    finite inflation works.
    """
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    grid = () if (F.is_step or G.is_step) else _default_grid(F, G, grid_points)

    def feasible(y: float) -> bool:
        return _feasible_at(F, G, epsilon, y, grid)

    if feasible(0.0):
        return 0.0
    hi, lo = 1.0, 0.0
    while not feasible(hi):
        lo, hi = hi, 2.0 * hi
        if hi > _EXPANSION_CAP:
            return INF
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi
