"""Probability measures on the line and their monotone-function views.

Every distribution is a :class:`DistributionSpec`: a family tag, exact
parameters (rationals are kept exact where arithmetic downstream needs
them), and a positive dilation scale.  The public operations expose the
CDF ``F`` and its left limits, the upper-inverse quantile function ``g``,
dilation, and the Lebesgue decomposition of the inverse measure (the
Stieltjes measure generated by ``g`` on ``[0, 1]``).

Conventions, used consistently everywhere:

* ``quantile(spec, t) = sup { y : F(y) <= t }``.  In particular
  ``quantile(spec, 1) = +inf`` for every distribution (``F <= 1`` holds
  everywhere), and ``quantile_left(spec, 0) = -inf``.  The supremum of the
  support is ``quantile_left(spec, 1)``.
* ``cdf`` and ``quantile`` are total on the extended reals.
* For the Cantor family the dyadic atoms of the inverse measure follow the
  upper-inverse convention: the atom at ``i / 2**m`` has mass ``3**-m``.
"""

from __future__ import annotations

import bisect as _bisect
import csv as _csv
import io
import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import ndtr as _ndtr, ndtri as _ndtri

from .errors import UnsupportedSpecError
from .monotone import INF, Jump, MonotoneMap, step_map

__all__ = [
    "DistributionSpec", "InverseMeasureDescriptor",
    "exponential", "benford", "pareto", "normal", "uniform", "two_point",
    "atom_uniform_mixture", "cantor", "inverse_cantor", "empirical",
    "cdf", "cdf_left", "quantile", "quantile_left", "dilate",
    "inverse_measure", "ac_density", "support",
    "cdf_map", "quantile_map",
    "parse_spec", "spec_to_json", "empirical_from_csv",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
CANTOR_DEPTH_DEFAULT = 20


# ---------------------------------------------------------------------------
# normal special functions: scipy's ndtr/ndtri plus one Newton polish so the
# inverse is self-consistent with the cdf to machine precision

def _norm_cdf(z: float) -> float:
    return float(_ndtr(z))

def _norm_ppf(t: float) -> float:
    z = float(_ndtri(t))
    pdf = math.exp(-0.5 * z * z) / _SQRT_2PI
    if pdf > 0:
        z -= (float(_ndtr(z)) - t) / pdf
    return z

def _norm_ppf_array(t: np.ndarray) -> np.ndarray:
    z = _ndtri(t)
    with np.errstate(over="ignore", invalid="ignore"):
        pdf = np.exp(-0.5 * z * z) / _SQRT_2PI
        step = np.where(pdf > 0, (_ndtr(z) - t) / np.where(pdf > 0, pdf, 1.0), 0.0)
    return z - step


# ---------------------------------------------------------------------------
# Cantor function and its upper inverse, evaluated exactly on rationals

def _cantor_cdf_exact(q: Fraction) -> float:
    """Cantor function at ``q`` in [0, 1] via 52 exact ternary digits."""
    num, den = q.numerator, q.denominator
    acc, w = 0.0, 0.5
    for _ in range(52):
        num *= 3
        d, num = divmod(num, den)
        if d == 1:
            return acc + w  # inside (or at the edge of) a removed gap
        acc += (d // 2) * w
        w *= 0.5
        if num == 0:
            break
    return acc


def _cantor_inverse_exact(q: Fraction) -> tuple[float, float]:
    """(left limit, value) of the upper inverse of the Cantor function.

    For dyadic ``q = i / 2**m`` (odd ``i``) the value is the right end of the
    gap on which the Cantor function equals ``q`` and the left limit is the
    gap's left end; the difference ``3**-m`` is the inverse measure's atom.
    """
    num, den = q.numerator, q.denominator
    acc, w = 0.0, 1.0
    for _ in range(80):
        w /= 3.0
        num *= 2
        b, num = divmod(num, den)
        acc += (2 * b) * w
        if num == 0:  # terminating binary expansion, last digit is 1
            return acc - w, acc
        if w < 1e-18:
            break
    return acc, acc


# ---------------------------------------------------------------------------
# family implementations

def _as_float(v) -> float:
    return float(v)


class _Family:
    name: str = ""
    param_names: tuple[str, ...] = ()

    def validate(self, p: tuple) -> None:
        pass

    # scalar views on the unscaled distribution; x finite, t in [0, 1)
    # (t in (0, 1] for the left variants)
    def cdf(self, p: tuple, x: float) -> float:
        raise NotImplementedError

    def cdf_left(self, p: tuple, x: float) -> float:
        return self.cdf(p, x)

    def quantile(self, p: tuple, t: float) -> float:
        raise NotImplementedError

    def quantile_left(self, p: tuple, t: float) -> float:
        return self.quantile(p, t) if t < 1 else self.support(p)[1]

    # vector views; default to elementwise evaluation
    def cdf_array(self, p: tuple, x: np.ndarray) -> np.ndarray:
        return np.array([self.cdf(p, float(v)) for v in np.ravel(x)]).reshape(np.shape(x))

    def cdf_left_array(self, p: tuple, x: np.ndarray) -> np.ndarray:
        return np.array([self.cdf_left(p, float(v)) for v in np.ravel(x)]).reshape(np.shape(x))

    def quantile_array(self, p: tuple, t: np.ndarray) -> np.ndarray:
        return np.array([self.quantile(p, float(v)) if v < 1 else INF
                         for v in np.ravel(t)]).reshape(np.shape(t))

    def quantile_left_array(self, p: tuple, t: np.ndarray) -> np.ndarray:
        return np.array([self.quantile_left(p, float(v)) for v in np.ravel(t)]).reshape(np.shape(t))

    # density of the absolutely continuous part of the measure itself
    def pdf(self, p: tuple, x: float) -> float:
        return 0.0

    def support(self, p: tuple) -> tuple[float, float]:
        raise NotImplementedError

    def cdf_jumps(self, p: tuple) -> tuple[tuple[float, float, float], ...]:
        """Atoms of the measure as (location, F left value, F value)."""
        return ()

    def cdf_is_step(self) -> bool:
        return False

    # Lebesgue decomposition of the inverse measure (unscaled)
    def inv_ac_density(self, p: tuple, t: float) -> float:
        return 0.0

    def inv_ac_sup(self, p: tuple) -> tuple[float, bool]:
        return 0.0, True

    def inv_atoms(self, p: tuple) -> Sequence[tuple[Fraction, float]]:
        return ()

    def inv_singular_continuous(self, p: tuple) -> bool:
        return False

    # quantile derivatives for the second-order error expansions
    has_quantile_derivatives = False

    def gd(self, p: tuple, t: float, order: int) -> float:
        raise UnsupportedSpecError(f"{self.name} does not provide quantile derivatives")

    def g2_left_at_1(self, p: tuple) -> float | None:
        return None


class _Exponential(_Family):
    name = "exponential"
    param_names = ("a",)
    has_quantile_derivatives = True

    def validate(self, p):
        if not _as_float(p[0]) > 0:
            raise ValueError("exponential rate must be positive")

    def cdf(self, p, x):
        a = _as_float(p[0])
        return -math.expm1(-a * x) if x > 0 else 0.0

    def quantile(self, p, t):
        a = _as_float(p[0])
        return -math.log1p(-t) / a

    def cdf_array(self, p, x):
        a = _as_float(p[0])
        return np.where(x > 0, -np.expm1(-a * np.asarray(x, dtype=float)), 0.0)

    cdf_left_array = cdf_array

    def quantile_array(self, p, t):
        a = _as_float(p[0])
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return -np.log1p(-t) / a

    quantile_left_array = quantile_array

    def pdf(self, p, x):
        a = _as_float(p[0])
        return a * math.exp(-a * x) if x >= 0 else 0.0

    def support(self, p):
        return 0.0, INF

    def inv_ac_density(self, p, t):
        a = _as_float(p[0])
        return INF if t >= 1 else 1.0 / (a * (1.0 - t))

    def inv_ac_sup(self, p):
        return INF, True

    def gd(self, p, t, order):
        a = _as_float(p[0])
        s = 1.0 - t
        if order == 1:
            return 1.0 / (a * s)
        if order == 2:
            return 1.0 / (a * s * s)
        return 2.0 / (a * s ** 3)


class _Benford(_Family):
    name = "benford"
    param_names = ("b",)
    has_quantile_derivatives = True

    def validate(self, p):
        if not _as_float(p[0]) > 1:
            raise ValueError("benford base must exceed 1")

    def cdf(self, p, x):
        b = _as_float(p[0])
        if x < 1:
            return 0.0
        if x >= b:
            return 1.0
        return math.log(x) / math.log(b)

    def quantile(self, p, t):
        return _as_float(p[0]) ** t

    def cdf_array(self, p, x):
        b = _as_float(p[0])
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.log(np.maximum(x, 1.0)) / math.log(b)
        return np.clip(v, 0.0, 1.0)

    cdf_left_array = cdf_array

    def quantile_array(self, p, t):
        b = _as_float(p[0])
        return b ** np.asarray(t, dtype=float)

    quantile_left_array = quantile_array

    def pdf(self, p, x):
        b = _as_float(p[0])
        return 1.0 / (x * math.log(b)) if 1 <= x <= b else 0.0

    def support(self, p):
        return 1.0, _as_float(p[0])

    def inv_ac_density(self, p, t):
        b = _as_float(p[0])
        return b ** t * math.log(b)

    def inv_ac_sup(self, p):
        b = _as_float(p[0])
        return b * math.log(b), True

    def gd(self, p, t, order):
        b = _as_float(p[0])
        return b ** t * math.log(b) ** order

    def g2_left_at_1(self, p):
        b = _as_float(p[0])
        return b * math.log(b) ** 2


class _Pareto(_Family):
    name = "pareto"
    param_names = ("alpha",)
    has_quantile_derivatives = True

    def validate(self, p):
        if not _as_float(p[0]) > 0:
            raise ValueError("pareto exponent must be positive")

    def cdf(self, p, x):
        alpha = _as_float(p[0])
        return 1.0 - x ** (-alpha) if x > 1 else 0.0

    def quantile(self, p, t):
        alpha = _as_float(p[0])
        return (1.0 - t) ** (-1.0 / alpha)

    def cdf_array(self, p, x):
        alpha = _as_float(p[0])
        x = np.asarray(x, dtype=float)
        return np.where(x > 1, 1.0 - np.maximum(x, 1.0) ** (-alpha), 0.0)

    cdf_left_array = cdf_array

    def quantile_array(self, p, t):
        alpha = _as_float(p[0])
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return (1.0 - t) ** (-1.0 / alpha)

    quantile_left_array = quantile_array

    def pdf(self, p, x):
        alpha = _as_float(p[0])
        return alpha * x ** (-alpha - 1.0) if x >= 1 else 0.0

    def support(self, p):
        return 1.0, INF

    def inv_ac_density(self, p, t):
        alpha = _as_float(p[0])
        return INF if t >= 1 else (1.0 - t) ** (-1.0 / alpha - 1.0) / alpha

    def inv_ac_sup(self, p):
        return INF, True

    def gd(self, p, t, order):
        alpha = _as_float(p[0])
        s = 1.0 - t
        c, e = 1.0 / alpha, 1.0 / alpha + 1.0
        for _ in range(order - 1):
            c *= e
            e += 1.0
        return c * s ** (-e)


class _Normal(_Family):
    name = "normal"
    param_names = ("mean", "var")

    def validate(self, p):
        if not _as_float(p[1]) > 0:
            raise ValueError("normal variance must be positive")

    def cdf(self, p, x):
        m, v = _as_float(p[0]), _as_float(p[1])
        return _norm_cdf((x - m) / math.sqrt(v))

    def quantile(self, p, t):
        if t <= 0:
            return -INF
        m, v = _as_float(p[0]), _as_float(p[1])
        return m + math.sqrt(v) * _norm_ppf(t)

    def cdf_array(self, p, x):
        m, v = _as_float(p[0]), _as_float(p[1])
        return _ndtr((np.asarray(x, dtype=float) - m) / math.sqrt(v))

    cdf_left_array = cdf_array

    def quantile_array(self, p, t):
        m, v = _as_float(p[0]), _as_float(p[1])
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).copy()
        out = np.full(flat.shape, -INF)
        pos = flat > 0
        out[pos] = m + math.sqrt(v) * _norm_ppf_array(flat[pos])
        return out.reshape(t.shape)

    quantile_left_array = quantile_array

    def pdf(self, p, x):
        m, v = _as_float(p[0]), _as_float(p[1])
        z = (x - m) / math.sqrt(v)
        return math.exp(-0.5 * z * z) / (_SQRT_2PI * math.sqrt(v))

    def support(self, p):
        return -INF, INF

    def inv_ac_density(self, p, t):
        v = _as_float(p[1])
        if t <= 0 or t >= 1:
            return INF
        z = _norm_ppf(t)
        return math.sqrt(v) * _SQRT_2PI * math.exp(0.5 * z * z)

    def inv_ac_sup(self, p):
        return INF, True


class _Uniform(_Family):
    name = "uniform"
    param_names = ("a", "b")
    has_quantile_derivatives = True

    def validate(self, p):
        if not _as_float(p[0]) < _as_float(p[1]):
            raise ValueError("uniform needs a < b")

    def cdf(self, p, x):
        a, b = _as_float(p[0]), _as_float(p[1])
        return min(1.0, max(0.0, (x - a) / (b - a)))

    def quantile(self, p, t):
        a, b = _as_float(p[0]), _as_float(p[1])
        return a + t * (b - a)

    def cdf_array(self, p, x):
        a, b = _as_float(p[0]), _as_float(p[1])
        return np.clip((np.asarray(x, dtype=float) - a) / (b - a), 0.0, 1.0)

    cdf_left_array = cdf_array

    def quantile_array(self, p, t):
        a, b = _as_float(p[0]), _as_float(p[1])
        return a + np.asarray(t, dtype=float) * (b - a)

    quantile_left_array = quantile_array

    def pdf(self, p, x):
        a, b = _as_float(p[0]), _as_float(p[1])
        return 1.0 / (b - a) if a <= x <= b else 0.0

    def support(self, p):
        return _as_float(p[0]), _as_float(p[1])

    def inv_ac_density(self, p, t):
        a, b = _as_float(p[0]), _as_float(p[1])
        return b - a

    def inv_ac_sup(self, p):
        a, b = _as_float(p[0]), _as_float(p[1])
        return b - a, True

    def gd(self, p, t, order):
        a, b = _as_float(p[0]), _as_float(p[1])
        return b - a if order == 1 else 0.0

    def g2_left_at_1(self, p):
        return 0.0


class _AtomUniformMixture(_Family):
    """Atom of mass ``a`` at -1 plus uniform mass ``1 - a`` spread on [1, b].

    ``b == 1`` is the degenerate limit with the uniform block collapsed to a
    point mass at 1.
    """

    name = "atom_uniform_mixture"
    param_names = ("a", "b")

    def validate(self, p):
        a, b = _as_float(p[0]), _as_float(p[1])
        if not (0 <= a < 1):
            raise ValueError("mixture atom mass must lie in [0, 1)")
        if not b >= 1:
            raise ValueError("mixture upper end must be >= 1")

    def cdf(self, p, x):
        a, b = _as_float(p[0]), _as_float(p[1])
        if x < -1:
            return 0.0
        if x < 1:
            return a
        if b == 1 or x >= b:
            return 1.0
        return a + (1.0 - a) * (x - 1.0) / (b - 1.0)

    def cdf_left(self, p, x):
        a, b = _as_float(p[0]), _as_float(p[1])
        if x <= -1:
            return 0.0
        if x <= 1:
            return a
        if b == 1 or x > b:
            return 1.0
        return a + (1.0 - a) * (x - 1.0) / (b - 1.0)

    def cdf_array(self, p, x):
        a, b = _as_float(p[0]), _as_float(p[1])
        x = np.asarray(x, dtype=float)
        body = 1.0 if b == 1 else a + (1.0 - a) * np.clip((x - 1.0) / (b - 1.0), 0.0, 1.0)
        return np.where(x < -1, 0.0, np.where(x < 1, a, body))

    def cdf_left_array(self, p, x):
        a, b = _as_float(p[0]), _as_float(p[1])
        x = np.asarray(x, dtype=float)
        body = 1.0 if b == 1 else a + (1.0 - a) * np.clip((x - 1.0) / (b - 1.0), 0.0, 1.0)
        return np.where(x <= -1, 0.0, np.where(x <= 1, a, body))

    def quantile(self, p, t):
        a, b = _as_float(p[0]), _as_float(p[1])
        if t < a:
            return -1.0
        if b == 1:
            return 1.0
        return 1.0 + (b - 1.0) * (t - a) / (1.0 - a)

    def quantile_left(self, p, t):
        a, b = _as_float(p[0]), _as_float(p[1])
        if t <= a:
            return -1.0
        if b == 1:
            return 1.0
        return 1.0 + (b - 1.0) * (t - a) / (1.0 - a)

    def quantile_array(self, p, t):
        a, b = _as_float(p[0]), _as_float(p[1])
        t = np.asarray(t, dtype=float)
        body = 1.0 if b == 1 else 1.0 + (b - 1.0) * np.maximum(t - a, 0.0) / (1.0 - a)
        return np.where(t < a, -1.0, body)

    def quantile_left_array(self, p, t):
        a, b = _as_float(p[0]), _as_float(p[1])
        t = np.asarray(t, dtype=float)
        body = 1.0 if b == 1 else 1.0 + (b - 1.0) * np.maximum(t - a, 0.0) / (1.0 - a)
        return np.where(t <= a, -1.0, body)

    def pdf(self, p, x):
        a, b = _as_float(p[0]), _as_float(p[1])
        if b == 1:
            return 0.0
        return (1.0 - a) / (b - 1.0) if 1 <= x <= b else 0.0

    def support(self, p):
        a, b = _as_float(p[0]), _as_float(p[1])
        return (1.0 if a == 0 else -1.0), b

    def cdf_jumps(self, p):
        a, b = _as_float(p[0]), _as_float(p[1])
        jumps = []
        if a > 0:
            jumps.append((-1.0, 0.0, a))
        if b == 1:
            jumps.append((1.0, a, 1.0))
        return tuple(jumps)

    def inv_ac_density(self, p, t):
        a, b = _as_float(p[0]), _as_float(p[1])
        if b == 1:
            return 0.0
        return (b - 1.0) / (1.0 - a) if t > a else 0.0

    def inv_ac_sup(self, p):
        a, b = _as_float(p[0]), _as_float(p[1])
        return (0.0, True) if b == 1 else ((b - 1.0) / (1.0 - a), True)

    def inv_atoms(self, p):
        a = p[0]
        return ((a, 2.0),) if _as_float(a) > 0 else ()


class _TwoPoint(_AtomUniformMixture):
    """Masses ``a`` at -1 and ``1 - a`` at 1."""

    name = "two_point"
    param_names = ("a",)

    def validate(self, p):
        a = _as_float(p[0])
        if not (0 < a < 1):
            raise ValueError("two_point mass must lie strictly inside (0, 1)")

    def _lift(self, p):
        return (p[0], 1.0)

    def cdf(self, p, x):
        return super().cdf(self._lift(p), x)

    def cdf_left(self, p, x):
        return super().cdf_left(self._lift(p), x)

    def cdf_array(self, p, x):
        return super().cdf_array(self._lift(p), x)

    def cdf_left_array(self, p, x):
        return super().cdf_left_array(self._lift(p), x)

    def quantile(self, p, t):
        return super().quantile(self._lift(p), t)

    def quantile_left(self, p, t):
        return super().quantile_left(self._lift(p), t)

    def quantile_array(self, p, t):
        return super().quantile_array(self._lift(p), t)

    def quantile_left_array(self, p, t):
        return super().quantile_left_array(self._lift(p), t)

    def pdf(self, p, x):
        return 0.0

    def support(self, p):
        return -1.0, 1.0

    def cdf_jumps(self, p):
        a = _as_float(p[0])
        return ((-1.0, 0.0, a), (1.0, a, 1.0))

    def cdf_is_step(self):
        return True

    def inv_ac_density(self, p, t):
        return 0.0

    def inv_ac_sup(self, p):
        return 0.0, True

    def inv_atoms(self, p):
        return ((p[0], 2.0),)


class _Empirical(_Family):
    """Finitely supported measure given by sorted (location, mass) pairs."""

    name = "empirical"
    param_names = ("points",)

    def validate(self, p):
        points = p[0]
        if not points:
            raise ValueError("empirical needs at least one atom")
        locs = [_as_float(x) for x, _ in points]
        if any(b <= a for a, b in zip(locs, locs[1:])):
            raise ValueError("empirical locations must be strictly increasing")
        if any(_as_float(m) <= 0 for _, m in points):
            raise ValueError("empirical masses must be positive")
        total = sum(_as_float(m) for _, m in points)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"empirical masses sum to {total}, not 1")

    def _data(self, p):
        points = p[0]
        locs = [_as_float(x) for x, _ in points]
        cums: list = []
        running = Fraction(0)
        exact = all(isinstance(m, (Fraction, int)) for _, m in points)
        if exact:
            for _, m in points:
                running += Fraction(m)
            scale_back = running
            running = Fraction(0)
            for _, m in points:
                running += Fraction(m)
                cums.append(running / scale_back)
        else:
            total = float(sum(_as_float(m) for _, m in points))
            acc = 0.0
            for _, m in points:
                acc += _as_float(m) / total
                cums.append(acc)
            cums[-1] = 1.0
        return locs, cums, exact

    def cdf(self, p, x):
        locs, cums, _ = self._data(p)
        i = _bisect.bisect_right(locs, x)
        return 0.0 if i == 0 else float(cums[i - 1])

    def cdf_left(self, p, x):
        locs, cums, _ = self._data(p)
        i = _bisect.bisect_left(locs, x)
        return 0.0 if i == 0 else float(cums[i - 1])

    def quantile(self, p, t):
        locs, cums, _ = self._data(p)
        levels = [float(c) for c in cums[:-1]]
        return locs[_bisect.bisect_right(levels, t)]

    def quantile_left(self, p, t):
        locs, cums, _ = self._data(p)
        levels = [float(c) for c in cums[:-1]]
        return locs[_bisect.bisect_left(levels, t)]

    def quantile_array(self, p, t):
        locs, cums, _ = self._data(p)
        levels = np.array([float(c) for c in cums[:-1]])
        idx = np.searchsorted(levels, np.asarray(t, dtype=float), side="right")
        return np.asarray(locs, dtype=float)[idx]

    def quantile_left_array(self, p, t):
        locs, cums, _ = self._data(p)
        levels = np.array([float(c) for c in cums[:-1]])
        idx = np.searchsorted(levels, np.asarray(t, dtype=float), side="left")
        return np.asarray(locs, dtype=float)[idx]

    def cdf_array(self, p, x):
        locs, cums, _ = self._data(p)
        vals = np.concatenate([[0.0], np.asarray([float(c) for c in cums])])
        idx = np.searchsorted(np.asarray(locs, dtype=float), np.asarray(x, dtype=float), side="right")
        return vals[idx]

    def cdf_left_array(self, p, x):
        locs, cums, _ = self._data(p)
        vals = np.concatenate([[0.0], np.asarray([float(c) for c in cums])])
        idx = np.searchsorted(np.asarray(locs, dtype=float), np.asarray(x, dtype=float), side="left")
        return vals[idx]

    def support(self, p):
        locs = [_as_float(x) for x, _ in p[0]]
        return locs[0], locs[-1]

    def cdf_jumps(self, p):
        locs, cums, _ = self._data(p)
        out = []
        prev = 0.0
        for x, c in zip(locs, cums):
            out.append((x, prev, float(c)))
            prev = float(c)
        return tuple(out)

    def cdf_is_step(self):
        return True

    def inv_atoms(self, p):
        locs, cums, exact = self._data(p)
        out = []
        for i in range(len(locs) - 1):
            gap = locs[i + 1] - locs[i]
            level = cums[i] if exact else float(cums[i])
            out.append((level, gap))
        return tuple(out)


class _CantorAtoms(Sequence):
    """Lazy increasing enumeration of the inverse-Cantor atoms.

    Entry ``k`` (0-based) is the dyadic rational ``(k + 1) / 2**depth`` in
    lowest terms with mass ``3**-(depth - j)`` where ``2**j`` divides
    ``k + 1``; every dyadic in (0, 1) with denominator up to ``2**depth``
    appears exactly once, in increasing order.
    """

    def __init__(self, depth: int, scale: float = 1.0):
        self.depth = depth
        self.scale = scale
        self._n = 2 ** depth - 1

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, k):
        if isinstance(k, slice):
            return tuple(self[i] for i in range(*k.indices(self._n)))
        if k < 0:
            k += self._n
        if not 0 <= k < self._n:
            raise IndexError(k)
        i = k + 1
        j = (i & -i).bit_length() - 1  # dyadic valuation of i
        return Fraction(i, 2 ** self.depth), self.scale * 3.0 ** (j - self.depth)


class _Cantor(_Family):
    name = "cantor"
    param_names = ()

    def cdf(self, p, x):
        if x <= 0:
            return 0.0
        if x >= 1:
            return 1.0
        return _cantor_cdf_exact(Fraction(x))

    def quantile(self, p, t):
        if t <= 0:
            return 0.0
        return _cantor_inverse_exact(Fraction(t))[1]

    def quantile_left(self, p, t):
        if t >= 1:
            return 1.0
        return _cantor_inverse_exact(Fraction(t))[0]

    def support(self, p):
        return 0.0, 1.0

    def inv_atoms(self, p):
        return _CantorAtoms(CANTOR_DEPTH_DEFAULT)


class _InverseCantor(_Family):
    name = "inverse_cantor"
    param_names = ()

    def cdf(self, p, x):
        if x <= 0:
            return 0.0
        if x >= 1:
            return 1.0
        return _cantor_inverse_exact(Fraction(x))[1]

    def cdf_left(self, p, x):
        if x <= 0:
            return 0.0
        if x >= 1:
            return 1.0
        return _cantor_inverse_exact(Fraction(x))[0]

    def quantile(self, p, t):
        if t <= 0:
            return 0.0
        if t >= 1:
            return 1.0
        return _cantor_cdf_exact(Fraction(t))

    def quantile_left(self, p, t):
        return self.quantile(p, min(t, 1.0))

    def support(self, p):
        return 0.0, 1.0

    def cdf_jumps(self, p):
        # truncated enumeration; the map is not a step function
        out = []
        for q, mass in _CantorAtoms(10):
            left = _cantor_inverse_exact(q)[0]
            out.append((float(q), left, left + mass))
        return tuple(out)

    def inv_singular_continuous(self, p):
        return True


_FAMILIES: dict[str, _Family] = {
    f.name: f for f in (
        _Exponential(), _Benford(), _Pareto(), _Normal(), _Uniform(),
        _TwoPoint(), _AtomUniformMixture(), _Cantor(), _InverseCantor(),
        _Empirical(),
    )
}


# ---------------------------------------------------------------------------
# the public spec type and its factories

@dataclass(frozen=True)
class DistributionSpec:
    """A probability measure: family tag, parameters, dilation scale."""

    family: str
    params: tuple = ()
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise UnsupportedSpecError(f"unknown family {self.family!r}")
        if not (isinstance(self.scale, (int, float)) and self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError("scale must be a positive finite number")
        _FAMILIES[self.family].validate(self.params)

    @property
    def _fam(self) -> _Family:
        return _FAMILIES[self.family]

    def param_dict(self) -> dict:
        return dict(zip(self._fam.param_names, self.params))

    def __str__(self):
        inner = ", ".join(str(v) for v in self.params) if self.family != "empirical" \
            else f"{len(self.params[0])} atoms"
        s = f"{self.family}({inner})"
        if self.scale != 1.0:
            s += f"*{self.scale:g}"
        return s


def _num(v) -> float | Fraction:
    if isinstance(v, (Fraction, int)):
        return v if isinstance(v, Fraction) else v
    return float(v)


def exponential(a) -> DistributionSpec:
    return DistributionSpec("exponential", (_num(a),))


def benford(b) -> DistributionSpec:
    return DistributionSpec("benford", (_num(b),))


def pareto(alpha) -> DistributionSpec:
    return DistributionSpec("pareto", (_num(alpha),))


def normal(mean, var) -> DistributionSpec:
    return DistributionSpec("normal", (_num(mean), _num(var)))


def uniform(a, b) -> DistributionSpec:
    return DistributionSpec("uniform", (_num(a), _num(b)))


def two_point(a) -> DistributionSpec:
    return DistributionSpec("two_point", (_num(a),))


def atom_uniform_mixture(a, b) -> DistributionSpec:
    return DistributionSpec("atom_uniform_mixture", (_num(a), _num(b)))


def cantor() -> DistributionSpec:
    return DistributionSpec("cantor", ())


def inverse_cantor() -> DistributionSpec:
    return DistributionSpec("inverse_cantor", ())


def empirical(points: Iterable[tuple]) -> DistributionSpec:
    pts = tuple(sorted(((_num(x), _num(m)) for x, m in points), key=lambda q: float(q[0])))
    merged: list[tuple] = []
    for x, m in pts:
        if merged and float(merged[-1][0]) == float(x):
            merged[-1] = (merged[-1][0], merged[-1][1] + m)
        else:
            merged.append((x, m))
    return DistributionSpec("empirical", (tuple(merged),))


# ---------------------------------------------------------------------------
# core operations

def cdf(spec: DistributionSpec, x) -> float:
    """Distribution function ``F(x)``, total on the extended reals."""
    xf = float(x)
    if math.isnan(xf):
        raise ValueError("cdf argument must not be NaN")
    if xf == INF:
        return 1.0
    if xf == -INF:
        return 0.0
    arg = x if (isinstance(x, Fraction) and spec.scale == 1.0) else xf / spec.scale
    return spec._fam.cdf(spec.params, arg)


def cdf_left(spec: DistributionSpec, x) -> float:
    """Left limit ``F(x-)``, the mass strictly below ``x``."""
    xf = float(x)
    if math.isnan(xf):
        raise ValueError("cdf_left argument must not be NaN")
    if xf == INF:
        return 1.0
    if xf == -INF:
        return 0.0
    arg = x if (isinstance(x, Fraction) and spec.scale == 1.0) else xf / spec.scale
    return spec._fam.cdf_left(spec.params, arg)


def quantile(spec: DistributionSpec, t) -> float:
    """Upper inverse ``sup { y : F(y) <= t }``; equals ``+inf`` at ``t >= 1``."""
    tf = float(t)
    if math.isnan(tf):
        raise ValueError("quantile argument must not be NaN")
    if tf < 0:
        return -INF
    if tf >= 1:
        return INF
    arg = t if isinstance(t, Fraction) else tf  # exact rationals stay exact (Cantor)
    return spec.scale * spec._fam.quantile(spec.params, arg)


def quantile_left(spec: DistributionSpec, t) -> float:
    """Left limit of the quantile function; ``quantile_left(spec, 1)`` is sup supp."""
    tf = float(t)
    if math.isnan(tf):
        raise ValueError("quantile_left argument must not be NaN")
    if tf <= 0:
        return -INF
    if tf > 1:
        return INF
    arg = t if isinstance(t, Fraction) else tf
    return spec.scale * spec._fam.quantile_left(spec.params, arg)


def ac_density(spec: DistributionSpec, x: float) -> float:
    """Density of the absolutely continuous part of the measure at ``x``."""
    return spec._fam.pdf(spec.params, float(x) / spec.scale) / spec.scale


def support(spec: DistributionSpec) -> tuple[float, float]:
    lo, hi = spec._fam.support(spec.params)
    return spec.scale * lo, spec.scale * hi


def dilate(spec: DistributionSpec, factor: float) -> DistributionSpec:
    """Pushforward under ``x -> factor * x`` (positive factors only)."""
    factor = float(factor)
    if not (factor > 0 and math.isfinite(factor)):
        raise ValueError("dilation factor must be positive and finite")
    return DistributionSpec(spec.family, spec.params, spec.scale * factor)


# vector views used by the sweep-oriented solvers -----------------------------

def cdf_array(spec: DistributionSpec, x: np.ndarray) -> np.ndarray:
    return spec._fam.cdf_array(spec.params, np.asarray(x, dtype=float) / spec.scale)


def quantile_array(spec: DistributionSpec, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = spec.scale * spec._fam.quantile_array(spec.params, np.clip(t, 0.0, 1.0))
    out = np.where(t < 0, -INF, out)
    return np.where(t >= 1, INF, out)


def quantile_left_array(spec: DistributionSpec, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = spec.scale * spec._fam.quantile_left_array(spec.params, np.clip(t, 0.0, 1.0))
    out = np.where(t <= 0, -INF, out)
    return np.where(t > 1, INF, out)


# monotone-map views ----------------------------------------------------------

def cdf_map(spec: DistributionSpec) -> MonotoneMap:
    """The CDF as a :class:`MonotoneMap` with exact left limits and jumps."""
    s = spec.scale
    jumps = tuple(Jump(s * loc, lo, hi) for loc, lo, hi in spec._fam.cdf_jumps(spec.params))
    return MonotoneMap(fn=lambda x: cdf(spec, x), left_fn=lambda x: cdf_left(spec, x),
                       at_neg_inf=0.0, at_pos_inf=1.0, jumps=jumps,
                       is_step=spec._fam.cdf_is_step())


def quantile_map(spec: DistributionSpec) -> MonotoneMap:
    """The quantile function as a :class:`MonotoneMap` on the extended line."""
    if spec._fam.cdf_is_step():
        jmp = spec._fam.cdf_jumps(spec.params)
        locs = [0.0] + [hi for _, _, hi in jmp[:-1]] + [1.0]
        vals = [-INF] + [spec.scale * loc for loc, _, _ in jmp] + [INF]
        return step_map(locs, vals)
    jumps = []
    q0 = quantile(spec, 0.0)
    if q0 > -INF:
        jumps.append(Jump(0.0, -INF, q0))
    desc_atoms = spec._fam.inv_atoms(spec.params)
    if not isinstance(desc_atoms, _CantorAtoms):
        for q, _mass in desc_atoms:
            qa = float(q)
            jumps.append(Jump(qa, quantile_left(spec, qa), quantile(spec, qa)))
    g1 = quantile_left(spec, 1.0)
    if g1 < INF:
        jumps.append(Jump(1.0, g1, INF))
    return MonotoneMap(fn=lambda t: quantile(spec, t), left_fn=lambda t: quantile_left(spec, t),
                       at_neg_inf=-INF, at_pos_inf=INF, jumps=tuple(jumps))


# inverse-measure decomposition ------------------------------------------------

@dataclass(frozen=True)
class InverseMeasureDescriptor:
    """Lebesgue decomposition of the inverse measure on (0, 1).

    ``ac_density(t)`` is the almost-everywhere derivative of the quantile
    function (it may return ``+inf``); ``atoms`` lists the singular atoms as
    (location, mass) with exact rational locations where the family provides
    them; ``total_mass`` is the diameter of the support.  For the Cantor
    family the atom list is truncated at a generation depth and
    ``truncated_mass`` reports the mass left out; ``singular_continuous``
    marks the one built-in whose singular part has no atoms at all.
    """

    ac_density: Callable[[float], float]
    ac_sup: float
    ac_sup_exact: bool
    atoms: Sequence[tuple]
    total_mass: float
    singular_continuous: bool = False
    truncated_mass: float = 0.0

    def __post_init__(self):
        sample = self.atoms[:64] if len(self.atoms) > 64 else self.atoms
        prev = 0.0
        for q, mass in sample:
            qf = float(q)
            if not (0 < qf < 1):
                raise ValueError("inverse-measure atoms must lie strictly inside (0, 1)")
            if qf <= prev:
                raise ValueError("inverse-measure atoms must be strictly increasing")
            if not mass > 0:
                raise ValueError("inverse-measure atom masses must be positive")
            prev = qf


def inverse_measure(spec: DistributionSpec, cantor_depth: int = CANTOR_DEPTH_DEFAULT) -> InverseMeasureDescriptor:
    """Decompose the inverse measure of ``spec`` into density plus atoms."""
    fam, p, s = spec._fam, spec.params, spec.scale
    if spec.family == "cantor":
        return InverseMeasureDescriptor(
            ac_density=lambda t: 0.0, ac_sup=0.0, ac_sup_exact=True,
            atoms=_CantorAtoms(cantor_depth, scale=s), total_mass=s,
            truncated_mass=s * (2.0 / 3.0) ** cantor_depth)
    sup_val, sup_exact = fam.inv_ac_sup(p)
    atoms = tuple((q, s * m) for q, m in fam.inv_atoms(p))
    lo, hi = support(spec)
    return InverseMeasureDescriptor(
        ac_density=lambda t: s * fam.inv_ac_density(p, float(t)),
        ac_sup=s * sup_val, ac_sup_exact=sup_exact, atoms=atoms,
        total_mass=hi - lo, singular_continuous=fam.inv_singular_continuous(p))


# quantile derivatives for the refined error expansions -------------------------

def quantile_derivative(spec: DistributionSpec, t: float, order: int = 1) -> float:
    """``order``-th derivative of the quantile function on (0, 1)."""
    if not spec._fam.has_quantile_derivatives:
        raise UnsupportedSpecError(
            f"{spec.family} does not provide analytic quantile derivatives")
    return spec.scale * spec._fam.gd(spec.params, float(t), order)


def quantile_curvature_at_1(spec: DistributionSpec) -> float | None:
    """Left limit of the quantile's second derivative at 1, when finite."""
    v = spec._fam.g2_left_at_1(spec.params)
    return None if v is None else spec.scale * v


# ---------------------------------------------------------------------------
# parsing and serialization

_SHORTHAND_ALIASES = {
    "exp": "exponential", "exponential": "exponential", "benford": "benford",
    "pareto": "pareto", "normal": "normal", "gaussian": "normal",
    "uniform": "uniform", "two_point": "two_point",
    "atom_uniform_mixture": "atom_uniform_mixture", "mixture": "atom_uniform_mixture",
    "cantor": "cantor", "inverse_cantor": "inverse_cantor",
    "empirical": "empirical",
}

_SHORTHAND_RE = re.compile(r"^\s*([A-Za-z_]+)\s*(?:\(\s*([^()]*)\s*\))?\s*$")


def _parse_number(tok) -> float | Fraction:
    if isinstance(tok, str):
        tok = tok.strip()
        if "/" in tok:
            return Fraction(tok)
        f = float(tok)
        return int(f) if f.is_integer() and "e" not in tok.lower() and "." not in tok else f
    if isinstance(tok, (list, tuple)) and len(tok) == 2:
        return Fraction(int(tok[0]), int(tok[1]))
    if isinstance(tok, bool):
        raise ValueError("boolean is not a parameter value")
    if isinstance(tok, int):
        return tok
    return float(tok)


def _spec_from_dict(obj: dict) -> DistributionSpec:
    if "family" not in obj:
        raise ValueError("spec object needs a 'family' key")
    family = _SHORTHAND_ALIASES.get(str(obj["family"]).lower())
    if family is None:
        raise UnsupportedSpecError(f"unknown family {obj['family']!r}")
    params_in = obj.get("params", {}) or {}
    scale = float(obj.get("scale", 1.0))
    if family == "empirical":
        points = [(_parse_number(x), _parse_number(m)) for x, m in params_in["points"]]
        spec = empirical(points)
    else:
        fam = _FAMILIES[family]
        try:
            params = tuple(_parse_number(params_in[name]) for name in fam.param_names)
        except KeyError as missing:
            raise ValueError(f"family {family} needs parameter {missing}") from None
        spec = DistributionSpec(family, params)
    return dilate(spec, scale) if scale != 1.0 else spec


def parse_spec(text) -> DistributionSpec:
    """Parse a spec from a dict, a JSON object string, ``@file``, or shorthand.

    Shorthand looks like ``exp(1)``, ``normal(0, 1)``, ``two_point(1/3)``,
    ``cantor``.  Fractions written ``p/q`` stay exact, which matters for the
    arithmetic limit laws.
    """
    if isinstance(text, DistributionSpec):
        return text
    if isinstance(text, dict):
        return _spec_from_dict(text)
    text = text.strip()
    if text.startswith("@"):
        path = text[1:]
        if path.endswith(".csv"):
            return empirical_from_csv(path)
        with open(path, "r", encoding="utf-8") as fh:
            return _spec_from_dict(json.load(fh))
    if text.startswith("{"):
        return _spec_from_dict(json.loads(text))
    m = _SHORTHAND_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse spec {text!r}")
    name, args = m.group(1).lower(), m.group(2)
    family = _SHORTHAND_ALIASES.get(name)
    if family == "empirical":
        raise ValueError("empirical specs need JSON or CSV input")
    if family is None:
        raise UnsupportedSpecError(f"unknown family {name!r}")
    values = tuple(_parse_number(tok) for tok in args.split(",")) if args else ()
    fam = _FAMILIES[family]
    if len(values) != len(fam.param_names):
        raise ValueError(
            f"{family} takes {len(fam.param_names)} parameter(s) {fam.param_names}, got {len(values)}")
    return DistributionSpec(family, values)


def _json_number(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


def spec_to_json(spec: DistributionSpec) -> dict:
    """JSON-serializable form accepted back by :func:`parse_spec`."""
    if spec.family == "empirical":
        params = {"points": [[_json_number(x), _json_number(m)] for x, m in spec.params[0]]}
    else:
        params = {name: _json_number(v) for name, v in spec.param_dict().items()}
    out = {"family": spec.family, "params": params}
    if spec.scale != 1.0:
        out["scale"] = spec.scale
    return out


def empirical_from_csv(path_or_text: str) -> DistributionSpec:
    """Load an empirical spec from two-column CSV rows ``location, mass``.

    Accepts either a file path or inline CSV text (detected by a newline).
    """
    if "\n" in path_or_text:
        rows = list(_csv.reader(io.StringIO(path_or_text)))
    else:
        with open(path_or_text, "r", encoding="utf-8", newline="") as f:
            rows = list(_csv.reader(f))
    points = []
    for i, row in enumerate(rows):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            x, m = _parse_number(row[0]), _parse_number(row[1])
        except (ValueError, IndexError):
            if i == 0:
                continue  # header row
            raise ValueError(f"bad CSV row {row!r}")
        points.append((x, m))
    return empirical(points)
