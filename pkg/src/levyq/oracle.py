"""Independent brute-force verification of the solvers.

``brute_force_best`` minimizes the definition-level distance over a
product grid of sorted atom locations and sorted cumulative weights.  It
never touches the partition formulas the solvers are built on, so the two
code paths share nothing beyond the distribution's CDF.

The scan is an exhaustive multilevel sweep with provably safe skipping:
the distance is Lipschitz (constant ``epsilon`` per atom location,
constant 1 per cumulative weight, both in sup norm), so a grid cell whose
center is already infeasible at

    ``best_so_far + epsilon * cell_radius_x + cell_radius_p``

cannot contain the optimum and is dropped; every surviving cell is split
in half per coordinate until the requested resolutions are reached.  Cells
live on an exact dyadic integer lattice (coordinate ``m`` odd at level
``k`` means ``lo + m * h0 / 2**(k+1)``), so deduplication across parents
is exact; centers are projected onto the sorted cone by sorting, which is
1-Lipschitz in sup norm and preserves the covering property.  The final
answer is within ``epsilon * x_resolution + p_resolution`` of the true
minimum (and never below it).
"""

from __future__ import annotations

import bisect as _bisect
import itertools
import math

from dataclasses import dataclass

import numpy as np

from .levy import AtomicMeasure
from .asymptotics import point_density_cdf
from .distributions import DistributionSpec, quantile
from .quantizer import best_unconstrained

__all__ = ["GridConfig", "brute_force_best", "empirical_point_check", "solver_atoms"]

_SPLITS = 8          # initial cells per axis
_CELL_CAP = 400_000  # live-cell safety cap
_PRUNE_MARGIN = 1e-9


@dataclass(frozen=True)
class GridConfig:
    """Search box and resolutions for the brute-force scan."""

    x_lo: float
    x_hi: float
    x_resolution: float
    p_resolution: float
    n: int

    def __post_init__(self):
        if self.n > 3 or self.n < 1:
            raise ValueError("brute force supports 1 to 3 atoms")
        if not (self.x_resolution > 0 and self.p_resolution > 0):
            raise ValueError("resolutions must be positive")
        if not self.x_lo < self.x_hi:
            raise ValueError("empty search box")
        if self.n * (self.x_hi - self.x_lo) / self.x_resolution > 1e7:
            raise ValueError("candidate cap exceeded: shrink the box or coarsen the grid")

    @staticmethod
    def default(spec: DistributionSpec, n: int, x_resolution: float = 1e-4,
                p_resolution: float = 1e-4) -> "GridConfig":
        lo = quantile(spec, 1e-3) - 0.5
        hi = quantile(spec, 1.0 - 1e-3) + 0.5
        if not math.isfinite(lo):
            lo = quantile(spec, 1e-6) - 1.0
        if not math.isfinite(hi):
            hi = quantile(spec, 1.0 - 1e-6) + 1.0
        return GridConfig(lo, hi, x_resolution, p_resolution, n)


class _Candidate:
    """Step CDF of an atom/weight tuple, with tie-aware level lookups."""

    __slots__ = ("xs", "lefts", "rights")

    def __init__(self, xs: tuple[float, ...], bounds: tuple[float, ...]):
        self.xs = xs
        n = len(xs)
        lefts = [0.0] * n
        rights = [0.0] * n
        i = 0
        while i < n:
            j = i
            while j + 1 < n and xs[j + 1] == xs[i]:
                j += 1
            for k in range(i, j + 1):
                lefts[k] = bounds[i]
                rights[k] = bounds[j + 1]
            i = j + 1
        self.lefts = lefts
        self.rights = rights

    def value(self, t: float) -> float:
        i = _bisect.bisect_right(self.xs, t)
        return self.rights[i - 1] if i else 0.0

    def left_value(self, t: float) -> float:
        i = _bisect.bisect_left(self.xs, t)
        return self.lefts[i] if i < len(self.xs) and self.xs[i] == t else self.value(t)


def _spec_evaluators(spec):
    fam, p, scale = spec._fam, spec.params, spec.scale

    def F(x: float) -> float:
        if x == math.inf:
            return 1.0
        if x == -math.inf:
            return 0.0
        return fam.cdf(p, x / scale)

    def F_left(x: float) -> float:
        if x == math.inf:
            return 1.0
        if x == -math.inf:
            return 0.0
        return fam.cdf_left(p, x / scale)

    return F, F_left


def _cand_feasible(F, F_left, eps, cand: _Candidate, jump_locs, y: float) -> bool:
    """Whether the candidate fits in the y-tube of the spec's CDF.

    Exact for step candidates: the only places the sandwich can fail are
    the candidate's own breakpoints and the spec's atoms shifted by the
    tube slope (plus the limits, which hold automatically for CDFs).
    """
    shift = y / eps
    for t, gl, gr in zip(cand.xs, cand.lefts, cand.rights):
        if F_left(t - shift) - y > gl:
            return False
        if F(t - shift) - y > gr:
            return False
        if gl > F_left(t + shift) + y:
            return False
        if gr > F(t + shift) + y:
            return False
    for b in jump_locs:
        t = b + shift
        if F_left(b) - y > cand.left_value(t):
            return False
        if F(b) - y > cand.value(t):
            return False
        t = b - shift
        if cand.left_value(t) > F_left(b) + y:
            return False
        if cand.value(t) > F(b) + y:
            return False
    return True


def _cand_distance(F, F_left, eps, cand, jump_locs, tol=1e-9) -> float:
    if _cand_feasible(F, F_left, eps, cand, jump_locs, 0.0):
        return 0.0
    lo, hi = 0.0, 1.0  # distances between probability CDFs never exceed 1
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _cand_feasible(F, F_left, eps, cand, jump_locs, mid):
            hi = mid
        else:
            lo = mid
    return hi


def _measure_of(xs: tuple[float, ...], bounds: tuple[float, ...]) -> AtomicMeasure:
    weights = [max(0.0, bounds[i + 1] - bounds[i]) for i in range(len(xs))]
    total = math.fsum(weights)
    weights = [w / total for w in weights]
    return AtomicMeasure(xs, weights)


def brute_force_best(spec: DistributionSpec, n: int, epsilon: float = 1.0,
                     cfg: GridConfig | None = None) -> tuple[AtomicMeasure, float]:
    """Grid minimizer of the definition-level distance, for ``n <= 3``.

    Returns the best measure found and its distance (bisected to 1e-9).
    The reported distance is at least the true optimum and exceeds it by
    at most ``epsilon * x_resolution + p_resolution``.
    """
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if cfg is None:
        cfg = GridConfig.default(spec, n)
    if cfg.n != n:
        raise ValueError("config.n disagrees with n")
    jump_locs = tuple(loc * spec.scale for loc, _l, _r in spec._fam.cdf_jumps(spec.params))
    F, F_left = _spec_evaluators(spec)

    h0x = (cfg.x_hi - cfg.x_lo) / _SPLITS
    h0p = 1.0 / _SPLITS
    kx = kp = 0  # refinement levels per coordinate group

    best_val = math.inf
    best = None

    def prune_pass(cell_iter, rx, rp):
        # Moving every atom by <= rx and every cumulative weight by <= rp
        # moves the distance by at most max(epsilon * rx, rp): both sandwich
        # constraints hold at that inflation simultaneously.
        nonlocal best_val, best
        slack = max(epsilon * rx, rp if n > 1 else 0.0) + _PRUNE_MARGIN
        kept = []
        for mx, mp in cell_iter:
            xs = tuple(cfg.x_lo + m * rx for m in mx)
            bounds = (0.0,) + tuple(m * rp for m in mp) + (1.0,)
            cand = _Candidate(xs, bounds)
            if best is not None and not _cand_feasible(F, F_left, epsilon, cand,
                                                       jump_locs, best_val + slack):
                continue
            # Exact distances only for strict improvers; flat near-optimal
            # plateaus then cost one feasibility test per cell, not a full
            # bisection.
            if best is None or _cand_feasible(F, F_left, epsilon, cand, jump_locs,
                                              best_val - 1e-12):
                val = _cand_distance(F, F_left, epsilon, cand, jump_locs)
                if val < best_val or best is None:
                    best_val, best = val, (xs, bounds)
            kept.append((mx, mp))
            if len(kept) > _CELL_CAP:
                raise ValueError("candidate cap exceeded")
        return kept

    # Cell centers live at odd multiples of the current half-step: the x
    # coordinate of index m at level kx is x_lo + m * h0x / 2**(kx + 1).
    odd = tuple(range(1, 2 * _SPLITS, 2))
    x_tuples = itertools.combinations_with_replacement(odd, n)
    p_tuples = list(itertools.combinations_with_replacement(odd, n - 1)) or [()]
    cells = prune_pass(((mx, mp) for mx in x_tuples for mp in p_tuples),
                       h0x / 2.0, h0p / 2.0)

    while True:
        rx = h0x / 2.0 ** (kx + 1)
        rp = h0p / 2.0 ** (kp + 1)
        may_x = rx > cfg.x_resolution
        may_p = rp > cfg.p_resolution and n > 1
        if not (may_x or may_p):
            break
        # Refine only the group that dominates the slack, so the prune
        # threshold halves each level against a small children multiplier.
        shrink_x = may_x and (not may_p or epsilon * rx >= rp)
        shrink_p = not shrink_x
        x_hi_idx = 2 * _SPLITS * 2 ** (kx + (1 if shrink_x else 0)) - 1
        p_hi_idx = 2 * _SPLITS * 2 ** (kp + (1 if shrink_p else 0)) - 1
        seen: dict[tuple, None] = {}
        for mx, mp in cells:
            if shrink_x:
                xkids = [tuple(sorted(min(x_hi_idx, max(1, 2 * m + d))
                                      for m, d in zip(mx, ds)))
                         for ds in itertools.product((-1, 1), repeat=n)]
                pkids = [mp]
            else:
                xkids = [mx]
                pkids = [tuple(sorted(min(p_hi_idx, max(1, 2 * m + d))
                                      for m, d in zip(mp, ds)))
                         for ds in itertools.product((-1, 1), repeat=n - 1)]
            for cx in xkids:
                for cp in pkids:
                    seen.setdefault((cx, cp))
            if len(seen) > 4 * _CELL_CAP:
                raise ValueError("candidate cap exceeded during refinement")
        if shrink_x:
            kx += 1
        else:
            kp += 1
        cells = prune_pass(sorted(seen),
                           h0x / 2.0 ** (kx + 1), h0p / 2.0 ** (kp + 1))
    xs, bounds = best
    return _measure_of(xs, bounds), best_val


def empirical_point_check(atoms, spec: DistributionSpec, epsilon: float = 1.0,
                          n_intervals: int = 1000) -> float:
    """Largest deviation between atom frequencies and the asymptotic law.

    Compares the fraction of ``atoms`` at or below each of ``n_intervals``
    probe points against the asymptotic point distribution's mass there.
    Raises for measures without an absolutely continuous part.
    """
    atoms = np.sort(np.asarray(atoms, dtype=float))
    lo = quantile(spec, 1e-4)
    hi = quantile(spec, 1.0 - 1e-4)
    if not math.isfinite(lo):
        lo = quantile(spec, 1e-9)
    if not math.isfinite(hi):
        hi = quantile(spec, 1.0 - 1e-9)
    qs = np.linspace(lo, hi, n_intervals)
    target = point_density_cdf(spec, epsilon, qs)
    emp = np.searchsorted(atoms, qs, side="right") / len(atoms)
    return float(np.max(np.abs(emp - target)))


def solver_atoms(spec: DistributionSpec, n: int, epsilon: float = 1.0) -> np.ndarray:
    """Atom locations of the best unconstrained approximation (convenience)."""
    return np.asarray(best_unconstrained(spec, n, epsilon).measure.locations)
