"""Adaptive quadrature with Richardson acceptance.

Plain recursive Simpson subdivision: a panel is accepted when halving it
changes the estimate by less than 15 times the local tolerance, and the
Richardson correction of the accepted panel is kept.  Integrands are
ordinary scalar callables; they must be bounded on the panel (callers feed
saturating integrands here, so endpoint blowups of raw densities never
reach the integrator).
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

from .errors import NumericalIntegrityError

__all__ = ["integrate", "integrate_panels"]

_MAX_DEPTH = 52


def _simpson(fa: float, fm: float, fb: float, width: float) -> float:
    return width * (fa + 4.0 * fm + fb) / 6.0


def _adapt(fn, a, fa, b, fb, m, fm, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = fn(lm), fn(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol or depth >= _MAX_DEPTH:
        # At max depth the panel is ~2^-52 of the original interval; accept
        # unless the local residual is absolutely large (true divergence).
        if depth >= _MAX_DEPTH and abs(delta) > 1e-7:
            raise NumericalIntegrityError(
                f"quadrature failed to converge on [{a}, {b}] (residual {delta:g})")
        return left + right + delta / 15.0
    return (_adapt(fn, a, fa, m, fm, lm, flm, left, tol / 2, depth + 1)
            + _adapt(fn, m, fm, b, fb, rm, frm, right, tol / 2, depth + 1))


def integrate(fn: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """Integral of ``fn`` over the finite interval ``[a, b]``."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration bounds must be finite")
    if a == b:
        return 0.0
    m = 0.5 * (a + b)
    fa, fm, fb = fn(a), fn(m), fn(b)
    for v in (fa, fm, fb):
        if math.isnan(v):
            raise NumericalIntegrityError(f"integrand returned NaN on [{a}, {b}]")
    return _adapt(fn, a, fa, b, fb, m, fm, _simpson(fa, fm, fb, b - a), tol, 0)


def integrate_panels(fn: Callable[[float], float], breakpoints: Sequence[float],
                     tol: float = 1e-10) -> float:
    """Integral over consecutive panels, tolerance split across panels."""
    pts = sorted(set(float(p) for p in breakpoints))
    if len(pts) < 2:
        return 0.0
    n = len(pts) - 1
    return math.fsum(integrate(fn, a, b, tol / n) for a, b in zip(pts, pts[1:]) if b > a)
