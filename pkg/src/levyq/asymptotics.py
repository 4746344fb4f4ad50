"""Limit laws for the scaled approximation errors and point densities.

All results are packaged as :class:`AsymptoticReport` objects carrying the
computed values, the named contributions they decompose into, and the
method that produced each number (closed form, quadrature, or series).

The two central facts implemented here, for a measure with quantile
function ``g`` and inverse measure ``g``-Stieltjes:

* equal weights: ``n * error`` has limsup equal to the larger of the
  saturated essential sup of the inverse measure's density and the
  arithmetic term contributed by the singular atoms, and its liminf is at
  least the density term alone;
* free weights: ``n * error`` always converges, to the integral of the
  saturated inverse density; the same value is reachable from the measure's
  own density, which this module uses as an internal cross-check.

The saturation map is ``x -> x / (2 + 2|x|)`` with limits ``+-1/2``; the
arithmetic index of an exact rational ``q`` is ``2 * min{ n >= 0 :
(2n+1) q is an integer }`` (infinite when the reduced denominator is
even), and saturating it yields the worst-case distance of ``n*q`` to the
integers along subsequences.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import NumericalIntegrityError, UnsupportedSpecError
from .monotone import INF
from .quadrature import integrate_panels
from . import distributions as _dist
from .distributions import (DistributionSpec, InverseMeasureDescriptor, ac_density,
                            inverse_measure, quantile, quantile_curvature_at_1,
                            quantile_derivative, support)

__all__ = [
    "AsymptoticReport", "saturation", "odd_denominator_index", "saturation_of_index",
    "polylog_half", "uniform_error_limits", "best_error_limit", "best_error_limit_value",
    "uniform_error_refined", "best_error_second_order", "point_density",
    "point_density_cdf", "admissible_uniform_limsup",
]

QUAD_TOL = 1e-11
PRIMAL_DUAL_TOL = 1e-8
_TAIL_LEVELS = 46  # dyadic tail depth for integrals over unbounded supports


# ---------------------------------------------------------------------------
# elementary maps

def saturation(x):
    """The bounded increasing map ``x / (2 + 2|x|)``, with limits ``+-1/2``.

    Accepts scalars or arrays; infinite inputs map to ``+-1/2`` exactly.
    """
    if np.ndim(x) == 0:
        xf = float(x)
        if xf == INF:
            return 0.5
        if xf == -INF:
            return -0.5
        return xf / (2.0 + 2.0 * abs(xf))
    arr = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore"):
        out = arr / (2.0 + 2.0 * np.abs(arr))
    out = np.where(np.isposinf(arr), 0.5, out)
    return np.where(np.isneginf(arr), -0.5, out)


def odd_denominator_index(q) -> float:
    """``2 * min{ n >= 0 : (2n+1) q is an integer }`` for exact rational ``q``.

    Equals ``d - 1`` for reduced odd denominator ``d`` and ``+inf`` when the
    reduced denominator is even.  Floats are refused: the index is nowhere
    continuous, so a rounded location would silently change the answer.
    """
    if isinstance(q, float):
        raise TypeError("odd_denominator_index needs an exact rational (Fraction or int)")
    q = Fraction(q)
    den = q.denominator
    return INF if den % 2 == 0 else float(den - 1)


def saturation_of_index(q) -> float:
    """``saturation(odd_denominator_index(q))``: the singular-atom contribution."""
    return saturation(odd_denominator_index(q))


def polylog_half(z: float) -> float:
    """Polylogarithm of order 1/2 by direct series, for ``|z| < 1``."""
    z = float(z)
    if not abs(z) < 1:
        raise ValueError("polylog_half requires |z| < 1")
    if z == 0.0:
        return 0.0
    terms = []
    power = 1.0
    for k in range(1, 100_000 + 1):
        power *= z
        term = power / math.sqrt(k)
        terms.append(term)
        if abs(term) < 1e-16:
            break
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class AsymptoticReport:
    """A set of named limit values with provenance.

    ``kind`` is one of ``uniform-limsup``, ``uniform-liminf-bound``,
    ``best-limit``, ``second-order``, ``point-density-sample``.  ``values``
    holds the headline numbers, ``components`` the named contributions they
    are assembled from, and ``provenance`` maps each value to the method
    that produced it (``closed-form``, ``quadrature``, or ``series``).
    """

    kind: str
    values: Mapping[str, float]
    components: Mapping[str, float] = field(default_factory=dict)
    provenance: Mapping[str, str] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def value(self, name: str) -> float:
        return self.values[name]

    def to_json(self) -> dict:
        def safe(v):
            if v == INF:
                return "inf"
            if v == -INF:
                return "-inf"
            return v
        return {
            "kind": self.kind,
            "values": {k: safe(v) for k, v in self.values.items()},
            "components": {k: safe(v) for k, v in self.components.items()},
            "provenance": dict(self.provenance),
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# equal-weight limits

def uniform_error_limits(spec: DistributionSpec, epsilon: float = 1.0,
                         descriptor: InverseMeasureDescriptor | None = None) -> AsymptoticReport:
    """Limsup of ``n * error`` for equal-weight approximations, plus the
    density-only lower bound for the liminf.

    Needs the singular part of the inverse measure to consist of finitely
    many atoms at exact rational locations; the two Cantor families are
    special-cased to their known value 1/2.
    """
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if spec.family in ("cantor", "inverse_cantor"):
        notes = ("limsup fixed by the dyadic/Cantor atom structure",)
        if spec.family == "cantor":
            notes += ("liminf of n*error is 0 for this family",)
        else:
            notes += ("liminf of n*error lies in [1/216, 1/3]; exact value open",)
        values = {"limsup": 0.5, "liminf_lower_bound": 0.0}
        return AsymptoticReport("uniform-limsup", values,
                                components={"ac": 0.0, "singular": 0.5},
                                provenance={"limsup": "closed-form",
                                            "liminf_lower_bound": "closed-form"},
                                notes=notes)

    desc = descriptor if descriptor is not None else inverse_measure(spec)
    if desc.singular_continuous:
        raise UnsupportedSpecError(
            "singular-continuous inverse parts are not supported here")
    if desc.truncated_mass > 0:
        raise UnsupportedSpecError(
            "infinitely many inverse-measure atoms are not supported here")

    if desc.ac_sup_exact:
        ac_val = saturation(epsilon * desc.ac_sup)
        ac_method = "closed-form"
    else:
        ts = np.linspace(1e-9, 1 - 1e-9, 100_000)
        sup = max(float(desc.ac_density(t)) for t in ts)
        ac_val = saturation(epsilon * sup)
        ac_method = "sampled-approximate"

    sing_val = 0.0
    for q, _mass in desc.atoms:
        if isinstance(q, float):
            raise UnsupportedSpecError(
                "singular atom locations must be exact rationals for the arithmetic term")
        sing_val = max(sing_val, saturation_of_index(q))

    limsup = max(ac_val, sing_val)
    return AsymptoticReport(
        "uniform-limsup",
        values={"limsup": limsup, "liminf_lower_bound": ac_val},
        components={"ac": ac_val, "singular": sing_val},
        provenance={"limsup": ac_method, "liminf_lower_bound": ac_method})


def admissible_uniform_limsup(limsup: float, liminf_lower_bound: float,
                              tol: float = 1e-9) -> bool:
    """Whether a limsup value is consistent with the allowed value set.

    Values below 1/3 are always admissible; at or above 1/3 the sequence
    either converges (limsup equals the density term) or the limsup equals
    ``saturation(2m)`` for some positive integer ``m`` (the set
    ``{1/3, 2/5, 3/7, ...} + {1/2}``).
    """
    if limsup < 1.0 / 3.0 - tol:
        return True
    if abs(limsup - liminf_lower_bound) <= tol:
        return True  # converging case
    if abs(limsup - 0.5) <= tol:
        return True
    if limsup >= 0.5:
        return False
    m = limsup / (1.0 - 2.0 * limsup)
    return abs(m - round(m)) <= 4.0 * tol * (1 + m * m) and round(m) >= 1


# ---------------------------------------------------------------------------
# free-weight limit

def _x_panels(spec: DistributionSpec) -> list[float]:
    # Panel boundaries spanning the support: dyadic quantiles thin the tails
    # and the jump/kink locations of the density are explicit breakpoints.
    levels = [2.0 ** -k for k in range(1, _TAIL_LEVELS)]
    levels += [1.0 - 2.0 ** -k for k in range(1, _TAIL_LEVELS)]
    pts = set()
    for lvl in levels:
        q = quantile(spec, lvl)
        if math.isfinite(q):
            pts.add(q)
    lo, hi = support(spec)
    for v in (lo, hi):
        if math.isfinite(v):
            pts.add(v)
    for loc, _l, _r in spec._fam.cdf_jumps(spec.params):
        pts.add(loc * spec.scale)
    return sorted(pts)


def _closed_form_best(spec: DistributionSpec, epsilon: float) -> tuple[float, str] | None:
    # Dilation folds into an effective epsilon: the inverse density of the
    # dilated measure is the original's times the scale.
    eff = epsilon * spec.scale
    p = spec.params
    if spec.family == "exponential":
        a = float(p[0])
        return eff * math.log1p(a / eff) / (2.0 * a), "closed-form"
    if spec.family == "benford":
        b = float(p[0])
        lb = math.log(b)
        return (math.log1p(eff * b * lb) - math.log1p(eff * lb)) / (2.0 * lb), "closed-form"
    if spec.family == "pareto" and float(p[0]) == 1.0:
        return _pareto1_closed(eff), "closed-form"
    if spec.family == "normal":
        var_eff = float(p[1]) * spec.scale ** 2
        sigma = math.sqrt(var_eff)
        z = -1.0 / (epsilon * sigma * math.sqrt(2.0 * math.pi))
        return -epsilon * sigma * math.sqrt(math.pi / 2.0) * polylog_half(z), "series"
    if spec.family == "uniform":
        a, b = float(p[0]), float(p[1])
        return saturation(eff * (b - a)), "closed-form"
    if spec.family == "atom_uniform_mixture":
        a, b = float(p[0]), float(p[1])
        if b == 1.0:
            return 0.0, "closed-form"
        return (1.0 - a) * saturation(eff * (b - 1.0) / (1.0 - a)), "closed-form"
    if spec.family in ("two_point", "cantor", "inverse_cantor"):
        return 0.0, "closed-form"
    return None


def _pareto1_closed(eff: float) -> float:
    # int_0^1 eff / (2 s^2 + 2 eff) ds = (sqrt(eff) / 2) * atan(1 / sqrt(eff));
    # equals pi/8 at eff = 1
    r = math.sqrt(eff)
    return 0.5 * r * math.atan(1.0 / r)


@functools.lru_cache(maxsize=512)
def _best_limit_cached(spec: DistributionSpec, epsilon: float) -> AsymptoticReport:
    desc = inverse_measure(spec)
    atom_locs = []
    if not desc.truncated_mass:
        atom_locs = [float(q) for q, _ in desc.atoms]
    t_panels = [0.0, *atom_locs, 1.0]
    primal = integrate_panels(lambda t: saturation(epsilon * desc.ac_density(t)),
                              t_panels, tol=QUAD_TOL)
    dual = epsilon * integrate_panels(
        lambda x: saturation(ac_density(spec, x) / epsilon), _x_panels(spec), tol=QUAD_TOL)
    if abs(primal - dual) > PRIMAL_DUAL_TOL:
        raise NumericalIntegrityError(
            f"quantile-side and CDF-side limits disagree: {primal} vs {dual}")
    closed = _closed_form_best(spec, epsilon)
    values = {"limit": primal}
    components = {"primal": primal, "dual": dual}
    provenance = {"limit": "quadrature"}
    notes = ()
    if closed is not None:
        components["closed_form"] = closed[0]
        notes = (f"closed form available via {closed[1]}",)
    return AsymptoticReport("best-limit", values, components, provenance, notes)


def best_error_limit(spec: DistributionSpec, epsilon: float = 1.0) -> AsymptoticReport:
    """Limit of ``n * error`` for unconstrained best approximations.

    Computed by quadrature from the inverse measure's density and verified
    against the dual integral over the measure's own density; the two must
    agree to ``PRIMAL_DUAL_TOL``.
    """
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return _best_limit_cached(spec, epsilon)


def best_error_limit_value(spec: DistributionSpec, epsilon: float = 1.0) -> float:
    return best_error_limit(spec, epsilon).value("limit")


# ---------------------------------------------------------------------------
# second-order refinements

_REFINED_FAMILIES = ("exponential", "benford", "pareto", "normal")


def uniform_error_refined(spec: DistributionSpec, epsilon: float, n: int) -> AsymptoticReport:
    """Second-order prediction of ``n * error`` for equal weights at finite ``n``.

    Supported for the four smooth families with convex, eventually steep
    quantiles; the normal family uses its dedicated ``sqrt(log n) / n``
    form, the others the curvature correction at the steep end.
    """
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    if spec.family not in _REFINED_FAMILIES:
        raise UnsupportedSpecError(
            f"second-order uniform refinement needs one of {_REFINED_FAMILIES}, "
            f"not {spec.family}: the expansion assumes a convex smooth quantile")
    if spec.family == "normal":
        var_eff = float(spec.params[1]) * spec.scale ** 2
        corr = math.sqrt(math.log(n)) / (2.0 * epsilon * math.sqrt(2.0 * var_eff)) / n
        value = 0.5 - corr
        return AsymptoticReport(
            "second-order", {"prediction": value},
            components={"c": 0.5, "correction": corr, "n": float(n)},
            provenance={"prediction": "closed-form"})
    desc = inverse_measure(spec)
    c = saturation(epsilon * desc.ac_sup)
    if c >= 0.5:
        e_n = 1.0 / quantile_derivative(spec, 1.0 - 1.0 / (2.0 * n), 1)
    else:
        g1 = quantile_derivative(spec, 1.0, 1)
        g2 = quantile_curvature_at_1(spec)
        if g2 is None:
            raise UnsupportedSpecError(
                f"{spec.family} lacks the boundary curvature needed below saturation")
        e_n = g2 / (2.0 * g1 * g1 * n)
    value = c - (2.0 * c * c / epsilon) * e_n
    return AsymptoticReport(
        "second-order", {"prediction": value},
        components={"c": c, "e_n": e_n, "n": float(n)},
        provenance={"prediction": "closed-form"})


def best_error_second_order(spec: DistributionSpec, epsilon: float = 1.0) -> tuple[float, float]:
    """Constants ``(c1, c2)`` of the free-weight expansion
    ``n * error = c1 + c1^2 c2 / 12 * n^-2 + o(n^-2)``.

    ``c2`` comes from quadrature of the curvature integrand; the normal
    family's integrand is non-integrable and reports ``c2 = -inf``.
    """
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    c1 = best_error_limit_value(spec, epsilon)
    if spec.family == "normal":
        return c1, -INF
    if spec.family not in ("exponential", "benford", "pareto", "uniform"):
        raise UnsupportedSpecError(
            f"second-order constants need analytic quantile derivatives; "
            f"{spec.family} does not provide them")

    def integrand(t: float) -> float:
        t = min(max(t, 1e-15), 1.0 - 1e-15)
        g1 = quantile_derivative(spec, t, 1)
        g2 = quantile_derivative(spec, t, 2)
        g3 = quantile_derivative(spec, t, 3)
        e1 = epsilon * g1
        num = 2.0 * (1.0 + e1) * g2 * g2 - (2.0 + e1) * g1 * g3
        den = (1.0 + e1) ** 2 * g1 * g1
        return num / den

    # dyadic panels toward t = 1 tame the integrable endpoint singularity
    panels = [0.0] + [1.0 - 2.0 ** -k for k in range(1, 48)] + [1.0]
    c2 = integrate_panels(integrand, panels, tol=QUAD_TOL)
    return c1, c2


# ---------------------------------------------------------------------------
# asymptotic point density

@functools.lru_cache(maxsize=512)
def _pd_denominator(spec: DistributionSpec, epsilon: float) -> float:
    denom = best_error_limit_value(spec, epsilon) / epsilon
    if denom <= 0.0:
        raise UnsupportedSpecError(
            "point density needs a nonzero absolutely continuous part")
    return denom


def point_density(spec: DistributionSpec, epsilon: float, x: float) -> float:
    """Density of the asymptotic distribution of optimal atom locations."""
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    denom = _pd_denominator(spec, epsilon)
    return saturation(ac_density(spec, float(x)) / epsilon) / denom


def point_density_cdf(spec: DistributionSpec, epsilon: float, xs: Sequence[float]) -> np.ndarray:
    """Cumulative masses of the asymptotic point distribution at sorted ``xs``."""
    epsilon = float(epsilon)
    denom = _pd_denominator(spec, epsilon)
    xs = [float(v) for v in xs]
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise ValueError("xs must be sorted")
    panels = _x_panels(spec)
    lo = panels[0]
    out = []
    acc = 0.0
    prev = lo

    def dens(x: float) -> float:
        return saturation(ac_density(spec, x) / epsilon) / denom

    for x in xs:
        if x <= prev:
            out.append(acc)
            continue
        inner = [p for p in panels if prev < p < x]
        acc += integrate_panels(dens, [prev, *inner, x], tol=1e-9)
        prev = x
        out.append(min(acc, 1.0))
    return np.asarray(out)
