import json
import math
from fractions import Fraction

import numpy as np
import pytest

from levyq import (AtomicMeasure, ApproxResult, best_locations_given_weights,
                   best_uniform, best_unconstrained, best_weights_given_locations,
                   certify, distance_to_atomic, empirical, exponential, benford,
                   pareto, normal, two_point, uniform, uniform_error,
                   uniform_error_sweep, unconstrained_error)

from conftest import continuous_specs


def _exp_uniform_residual(a, eps, n, level):
    return n * level * (math.exp(2 * a * level / eps) + 1) - 1


def _exp_best_residual(a, eps, n, level):
    return level * math.exp(2 * n * a * level / eps) - level - math.tanh(a * level / eps)


# --- best weights for fixed locations ----------------------------------------

def test_given_locations_uniform_single_atom():
    r = best_weights_given_locations(uniform(0, 1), [0.5], 1.0)
    assert r.error == pytest.approx(0.25, abs=1e-11)
    assert r.measure.weights == (1.0,)
    assert r.certificate.weight_condition


def test_given_locations_exact_two_point():
    r = best_weights_given_locations(two_point(0.5), [-1.0, 1.0], 1.0)
    assert r.error < 1e-11
    assert r.measure.weights[0] == pytest.approx(0.5, abs=1e-9)


def test_given_locations_random_certified(rng):
    spec = exponential(1)
    for _ in range(20):
        xs = np.sort(rng.uniform(0.0, 3.0, size=int(rng.integers(1, 5))))
        r = best_weights_given_locations(spec, xs, 1.0)
        assert r.certificate.weight_condition
        # the claimed error is the actual distance
        assert distance_to_atomic(spec, r.measure, 1.0) == pytest.approx(r.error, abs=1e-9)


def test_given_locations_beats_other_weights(rng):
    spec = exponential(1)
    xs = [0.3, 1.0, 2.2]
    r = best_weights_given_locations(spec, xs, 1.0)
    for _ in range(25):
        w = rng.dirichlet(np.ones(3))
        d = distance_to_atomic(spec, AtomicMeasure(xs, w), 1.0)
        assert d >= r.error - 1e-9


# --- best locations for fixed weights ----------------------------------------

def test_given_weights_point_mass_collapses():
    pm = empirical([(2.5, 1)])
    r = best_locations_given_weights(pm, [0.3, 0.3, 0.4], 1.0)
    assert r.error == 0.0
    assert all(x == pytest.approx(2.5, abs=1e-12) for x in r.measure.locations)


def test_given_weights_uniform_exact():
    for n in (1, 2, 7, 13):
        r = best_locations_given_weights(uniform(0, 1), [1.0 / n] * n, 1.0)
        assert r.error == pytest.approx(1 / (4 * n), abs=1e-12)


def test_given_weights_exponential_window_containment():
    n, eps = 4, 1.0
    level = uniform_error(exponential(1), n, eps)
    r = best_locations_given_weights(exponential(1), [1.0 / n] * n, eps)
    for j, x in enumerate(r.measure.locations, 1):
        lo = -math.log(1 - j / n + level) - level / eps
        hi = -math.log(1 - (j - 1) / n - level) + level / eps
        assert lo - 1e-9 <= x <= hi + 1e-9
    assert r.certificate.location_condition


def test_given_weights_zero_weight_allowed():
    r = best_locations_given_weights(uniform(0, 1), [0.5, 0.0, 0.5], 1.0)
    assert r.error == pytest.approx(0.125, abs=1e-11)
    assert r.measure.locations == tuple(sorted(r.measure.locations))


def test_given_weights_beats_other_locations(rng):
    spec = exponential(1)
    w = [0.2, 0.5, 0.3]
    r = best_locations_given_weights(spec, w, 1.0)
    for _ in range(25):
        xs = np.sort(rng.uniform(0.0, 4.0, size=3))
        assert distance_to_atomic(spec, AtomicMeasure(xs, w), 1.0) >= r.error - 1e-9


# --- best uniform -------------------------------------------------------------

def test_best_uniform_exponential_equation():
    for n in (2, 8, 64):
        for a, eps in ((1.0, 1.0), (2.0, 0.5)):
            level = uniform_error(exponential(a), n, eps)
            assert abs(_exp_uniform_residual(a, eps, n, level)) < 1e-8


def test_best_uniform_benford_equation():
    for n in (2, 8, 64):
        for b in (2.0, 10.0):
            level = uniform_error(benford(b), n, 1.0)
            assert abs(b ** (1 - level) - b ** (1 + level - 1 / n) - 2 * level) < 1e-8


def test_best_uniform_matches_distance():
    r = best_uniform(exponential(1), 4, 1.0)
    assert distance_to_atomic(exponential(1), r.measure, 1.0) == pytest.approx(r.error, abs=1e-9)


def test_uniform_error_sweep_consistency():
    ns = [1, 2, 4, 8]
    sweep = uniform_error_sweep(exponential(1), ns, 1.0)
    for n, v in zip(ns, sweep):
        assert v == pytest.approx(uniform_error(exponential(1), n, 1.0), abs=1e-12)


# --- best unconstrained ---------------------------------------------------------

def test_best_unconstrained_exponential_equation_and_weights():
    for n in (2, 8, 64):
        for a, eps in ((1.0, 1.0), (2.0, 0.5)):
            level, P, _stats = unconstrained_error(exponential(a), n, eps)
            assert abs(_exp_best_residual(a, eps, n, level)) < 1e-8
            for j in range(n + 1):
                want = (1 - math.exp(-2 * a * level * j / eps)) / (1 - math.exp(-2 * a * level * n / eps))
                assert P[j] == pytest.approx(want, abs=1e-8)


def test_best_unconstrained_benford_equation():
    for n in (2, 8, 64):
        for b in (2.0, 10.0):
            level, _P, _stats = unconstrained_error(benford(b), n, 1.0)
            lb = math.log(b)
            resid = b ** (2 * n * level) * (level + math.sinh(level * lb)) \
                - level - b * math.sinh(level * lb)
            assert abs(resid) < 1e-8


def test_best_unconstrained_uniform_exact_atoms():
    for n in (1, 3, 10, 20):
        r = best_unconstrained(uniform(0, 1), n, 1.0)
        assert r.error == pytest.approx(1 / (4 * n), abs=1e-11)
        for j, x in enumerate(r.measure.locations, 1):
            assert x == pytest.approx((2 * j - 1) / (2 * n), abs=1e-9)


def test_best_unconstrained_certificates_and_distance():
    r = best_unconstrained(exponential(1), 5, 1.0)
    assert r.certificate.weight_condition and r.certificate.location_condition
    assert distance_to_atomic(exponential(1), r.measure, 1.0) == pytest.approx(r.error, abs=1e-9)


def test_best_unconstrained_exact_representation():
    r = best_unconstrained(two_point(0.3), 2, 1.0)
    assert r.error == 0.0
    red_locs, red_w = r.measure.reduced()
    assert red_locs == (-1.0, 1.0)
    assert red_w[0] == pytest.approx(0.3, abs=1e-12)


def test_best_unconstrained_two_point_single_atom():
    # one atom for masses (0.3, 0.7): the optimum costs the smaller mass
    r = best_unconstrained(two_point(0.3), 1, 1.0)
    assert r.error == pytest.approx(0.3, abs=1e-11)


# --- certify -------------------------------------------------------------------

def test_certify_replays_solver_output():
    r = best_unconstrained(exponential(1), 4, 1.0)
    c = certify(exponential(1), r)
    assert c.weight_condition and c.location_condition


def test_certify_flags_perturbations():
    spec = exponential(1)
    r = best_unconstrained(spec, 4, 1.0)
    w = list(r.measure.weights)
    w[1] += 0.05
    w[2] -= 0.05
    bad = AtomicMeasure(r.measure.locations, w)
    assert not certify(spec, bad, 1.0, r.error, slack=1e-8).weight_condition
    xs = list(r.measure.locations)
    xs[0] -= 0.5
    bad2 = AtomicMeasure(sorted(xs), r.measure.weights)
    assert not certify(spec, bad2, 1.0, r.error, slack=1e-8).location_condition


# --- structural properties ------------------------------------------------------

def test_sandwich_and_monotonicity():
    for spec in (exponential(1), benford(10), pareto(1), normal(0, 1), uniform(0, 1)):
        prev_u = prev_b = 1.0
        for n in (1, 2, 3, 4, 8, 16):
            eu = uniform_error(spec, n, 1.0)
            eb = unconstrained_error(spec, n, 1.0)[0]
            assert eb <= eu + 1e-12
            assert eu <= prev_u + 1e-12 and eb <= prev_b + 1e-12
            assert n * eu <= 0.5 + 1e-9
            prev_u, prev_b = eu, eb


def test_strict_sandwich_exponential_benford():
    for spec in (exponential(1), benford(10)):
        for n in (2, 3, 4, 8):
            assert unconstrained_error(spec, n, 1.0)[0] < uniform_error(spec, n, 1.0)


def test_point_mass_error_zero_for_all_n():
    pm = empirical([(1.5, 1)])
    for n in (1, 2, 5):
        assert best_uniform(pm, n, 1.0).error == 0.0
        assert best_unconstrained(pm, n, 1.0).error == 0.0


def test_nondegenerate_scaled_error_has_positive_floor():
    # n * error does not tend to zero off point masses: check a tail window
    for spec in (exponential(1), uniform(0, 1), two_point(Fraction(1, 3))):
        tail = [n * uniform_error(spec, n, 1.0) for n in range(500, 513)]
        assert max(tail) > 0.2, spec


def test_error_result_serialization():
    r = best_unconstrained(exponential(1), 3, 1.0)
    blob = json.loads(json.dumps(r.to_json()))
    assert blob["n"] == 3
    assert blob["epsilon"] == 1.0
    assert len(blob["atoms"]) == 3 and len(blob["weights"]) == 3
    assert set(blob["certificates"]) == {"level", "weight_condition", "location_condition"}


def test_invalid_inputs_rejected():
    with pytest.raises(ValueError):
        best_uniform(exponential(1), 0, 1.0)
    with pytest.raises(ValueError):
        best_unconstrained(exponential(1), 2, -1.0)
    with pytest.raises(ValueError):
        best_weights_given_locations(exponential(1), [1.0, 0.5], 1.0)
    with pytest.raises(ValueError):
        best_locations_given_weights(exponential(1), [0.5, 0.6], 1.0)


def test_solver_stats_present():
    r = best_unconstrained(exponential(1), 4, 1.0)
    assert r.stats["feasibility_calls"] > 0
    assert r.stats["outer_iterations"] > 0
