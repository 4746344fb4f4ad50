"""Non-decreasing right-continuous maps on the extended real line.

A :class:`MonotoneMap` bundles a non-decreasing right-continuous function
``f`` with its left-limit function ``f(x-)``, its limits at the two
infinities, and (when finite and known) its jump discontinuities.  The
values ``+inf`` and ``-inf`` are first class: every map is total on the
extended reals, and all comparisons use the usual extended-real order.

The upper inverse used throughout the package is

    ``invert(f)(x) = sup { y : f(y) <= x }``    (sup of the empty set is -inf)

which keeps the family closed under inversion: the inverse is again
non-decreasing and right-continuous, and inverting twice restores ``f`` at
its continuity points.
"""

from __future__ import annotations

import bisect as _bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

__all__ = ["Jump", "MonotoneMap", "Interval", "identity_map", "step_map",
           "invert", "scale_values"]

INF = math.inf

# Horizon for bracket expansion: beyond this a bound counts as infinite.
_EXPANSION_LIMIT = 2.0**70


@dataclass(frozen=True)
class Jump:
    """A single discontinuity: location, value just below it, value at it."""

    location: float
    left: float
    right: float

    def __post_init__(self):
        if not self.left <= self.right:
            raise ValueError(f"jump at {self.location} has left {self.left} > right {self.right}")


@dataclass(frozen=True)
class Interval:
    """A closed interval on the extended real line."""

    lower: float
    upper: float

    def __post_init__(self):
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ValueError("interval bounds must not be NaN")
        if not self.lower <= self.upper:
            raise ValueError(f"interval has lower {self.lower} > upper {self.upper}")

    @property
    def length(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class MonotoneMap:
    """A non-decreasing right-continuous map with left limits.

    ``fn`` evaluates ``f(x)`` for finite ``x``; ``left_fn`` evaluates the
    left limit ``f(x-)`` (``None`` means ``f`` is continuous, so the two
    coincide).  ``at_neg_inf`` and ``at_pos_inf`` are the monotone limits;
    evaluating the map or its left limit at ``+-inf`` returns them.
    ``jumps`` optionally lists all discontinuities in increasing order;
    ``is_step`` marks maps that are constant between the listed jumps, for
    which several algorithms in this package have exact finite test sets.
    """

    fn: Callable[[float], float]
    left_fn: Callable[[float], float] | None = None
    at_neg_inf: float = -INF
    at_pos_inf: float = INF
    jumps: tuple[Jump, ...] = ()
    is_step: bool = False
    _jump_locs: tuple[float, ...] = field(init=False, repr=False, default=())

    def __post_init__(self):
        locs = tuple(j.location for j in self.jumps)
        if any(b <= a for a, b in zip(locs, locs[1:])):
            raise ValueError("jumps must be sorted by strictly increasing location")
        object.__setattr__(self, "_jump_locs", locs)

    def __call__(self, x: float) -> float:
        if x == INF:
            return self.at_pos_inf
        if x == -INF:
            return self.at_neg_inf
        return self.fn(x)

    def left(self, x: float) -> float:
        """Left limit ``f(x-)``; equals ``f(x)`` wherever ``f`` is continuous."""
        if x == INF:
            return self.at_pos_inf
        if x == -INF:
            return self.at_neg_inf
        if self.left_fn is not None:
            return self.left_fn(x)
        return self.fn(x)

    @property
    def jump_locations(self) -> tuple[float, ...]:
        return self._jump_locs


def identity_map() -> MonotoneMap:
    return MonotoneMap(fn=lambda x: x)


def step_map(locations: Sequence[float], values: Sequence[float]) -> MonotoneMap:
    """Right-continuous step function.

    ``values`` has one more entry than ``locations``: ``values[0]`` is the
    value left of ``locations[0]`` and ``values[i + 1]`` is the value on
    ``[locations[i], locations[i + 1])``.  Equal consecutive values are
    allowed and produce no jump at that location.
    """
    locs = [float(x) for x in locations]
    vals = [float(v) for v in values]
    if len(vals) != len(locs) + 1:
        raise ValueError("need exactly one more value than locations")
    if any(b <= a for a, b in zip(locs, locs[1:])):
        raise ValueError("locations must be strictly increasing")
    if any(b < a for a, b in zip(vals, vals[1:])):
        raise ValueError("values must be non-decreasing")

    def fn(x: float) -> float:
        return vals[_bisect.bisect_right(locs, x)]

    def left_fn(x: float) -> float:
        return vals[_bisect.bisect_left(locs, x)]

    jumps = tuple(Jump(x, lo, hi) for x, lo, hi in zip(locs, vals, vals[1:]) if hi > lo)
    return MonotoneMap(fn=fn, left_fn=left_fn, at_neg_inf=vals[0],
                       at_pos_inf=vals[-1], jumps=jumps, is_step=True)


def _invert_step(f: MonotoneMap) -> MonotoneMap:
    # Jumps and flats swap roles: the inverse of a step map is the step map
    # whose breakpoints are the original values and whose levels are the
    # original breakpoints.
    for prev, nxt in zip(f.jumps, f.jumps[1:]):
        if nxt.left != prev.right:
            raise ValueError("map is not piecewise constant between its listed jumps")
    locs = [j.location for j in f.jumps]
    vals = [f.jumps[0].left] + [j.right for j in f.jumps]
    inv_locs = list(vals)
    inv_vals = [-INF] + locs + [INF]
    while inv_locs and inv_locs[0] == -INF:
        inv_locs.pop(0)
        inv_vals.pop(0)
    while inv_locs and inv_locs[-1] == INF:
        inv_locs.pop()
        inv_vals.pop()
    return step_map(inv_locs, inv_vals)


def _sup_where(pred: Callable[[float], bool]) -> float:
    """sup of a down-set ``{y : pred(y)}``, located by expansion and bisection.

    ``pred`` must be monotone (true below some boundary, false above).
    Returns ``+-inf`` when the boundary lies beyond the expansion horizon.
    """
    if pred(_EXPANSION_LIMIT):
        return INF
    if not pred(-_EXPANSION_LIMIT):
        return -INF
    lo, hi = -_EXPANSION_LIMIT, _EXPANSION_LIMIT
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, abs(lo)):
            break
    return lo


def invert(f: MonotoneMap, tol: float = 1e-13) -> MonotoneMap:
    """Upper inverse ``x -> sup { y : f(y) <= x }``.

    Step maps with a consistent jump list are inverted exactly.  Other maps
    are inverted by bisection, accurate to ``tol`` where the inverse is
    finite.  The inverse's own jump list is not reconstructed; its left
    limits are exact only where the input map was strictly increasing.
    """
    if f.is_step and f.jumps:
        return _invert_step(f)

    def inv(x: float) -> float:
        if math.isnan(x):
            raise ValueError("cannot invert at NaN")
        if x == INF:
            return at_pos
        if x == -INF:
            return at_neg
        if f.at_neg_inf > x:
            return -INF
        if f.at_pos_inf <= x:
            return INF
        # Expand to f(hi) > x, then down to f(lo) <= x, then bisect the
        # boundary of the down-set {y : f(y) <= x}.
        hi, lo = 1.0, None
        while f(hi) <= x:
            lo = hi
            hi *= 2
            if hi > _EXPANSION_LIMIT:
                return INF
        if lo is None:
            lo = -1.0
            while f(lo) > x:
                lo *= 2
                if -lo > _EXPANSION_LIMIT:
                    return -INF
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if f(mid) <= x:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    at_pos = _sup_where(lambda y: f(y) < INF)
    at_neg = _sup_where(lambda y: f(y) == -INF)
    return MonotoneMap(fn=inv, at_neg_inf=at_neg, at_pos_inf=at_pos)


def scale_values(f: MonotoneMap, c: float) -> MonotoneMap:
    """The map ``x -> c * f(x)`` for a positive constant ``c``."""
    if not c > 0:
        raise ValueError("scale factor must be positive")

    left_fn = f.left_fn
    jumps = tuple(Jump(j.location, c * j.left, c * j.right) for j in f.jumps)
    return MonotoneMap(fn=lambda x: c * f.fn(x),
                       left_fn=None if left_fn is None else (lambda x: c * left_fn(x)),
                       at_neg_inf=c * f.at_neg_inf, at_pos_inf=c * f.at_pos_inf,
                       jumps=jumps, is_step=f.is_step)
