import numpy as np
import pytest

from levyq import (atom_uniform_mixture, benford, cantor, empirical, exponential,
                   inverse_cantor, normal, pareto, two_point, uniform)
from fractions import Fraction


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def continuous_specs():
    return [exponential(1), exponential(2), benford(2), benford(10),
            pareto(0.5), pareto(1), normal(0, 1), normal(1, 4), uniform(0, 1),
            uniform(-2, 3)]


def atomic_specs():
    return [two_point(Fraction(3, 10)), two_point(Fraction(1, 2)),
            empirical([(-1.0, Fraction(1, 4)), (0.5, Fraction(1, 4)), (2.0, Fraction(1, 2))])]


def mixed_specs():
    return [atom_uniform_mixture(Fraction(1, 3), 2),
            atom_uniform_mixture(Fraction(2, 5), 4),
            atom_uniform_mixture(0, 3)]


def all_specs():
    return continuous_specs() + atomic_specs() + mixed_specs() + [cantor(), inverse_cantor()]


@pytest.fixture
def spec_zoo():
    return all_specs()


def random_atomic(rng, n=None, lo=-3.0, hi=3.0):
    from levyq import AtomicMeasure
    if n is None:
        n = int(rng.integers(1, 6))
    locs = np.sort(rng.uniform(lo, hi, size=n))
    w = rng.dirichlet(np.ones(n))
    return AtomicMeasure(locs, w)
