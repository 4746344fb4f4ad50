import json
import math
from fractions import Fraction

import numpy as np
import pytest

from levyq import (UnsupportedSpecError, ac_density, atom_uniform_mixture, benford,
                   cantor, cdf, cdf_left, cdf_map, dilate, empirical,
                   empirical_from_csv, exponential, inverse_cantor, inverse_measure,
                   normal, pareto, parse_spec, quantile, quantile_left,
                   spec_to_json, support, two_point, uniform)
from levyq.distributions import cdf_array, quantile_array, quantile_left_array
from levyq.quadrature import integrate_panels

from conftest import all_specs, continuous_specs


def test_cdf_anchor_values():
    assert cdf(exponential(1), 0.0) == 0.0
    assert cdf(pareto(1), 2.0) == 0.5
    assert cdf(two_point(0.3), 0.0) == 0.3


def test_cdf_left_anchor_values():
    tp = two_point(0.3)
    assert cdf_left(tp, 1.0) == 0.3
    assert cdf_left(tp, 1.5) == 1.0
    e1 = exponential(1)
    assert cdf_left(e1, 1.0) == cdf(e1, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-15)


def test_quantile_anchor_values():
    assert quantile(benford(10), 0.5) == pytest.approx(math.sqrt(10), abs=1e-12)
    assert quantile(uniform(0, 1), 0.25) == 0.25
    # sup convention puts the jump value on the right atom
    assert quantile(two_point(0.3), 0.3) == 1.0


def test_quantile_sup_convention_against_direct_sup():
    # brute-force sup{y : F(y) <= t} on a fine grid
    spec = two_point(0.3)
    ys = np.linspace(-3, 3, 60001)
    for t in (0.1, 0.3, 0.65):
        feasible = ys[[cdf(spec, float(v)) <= t for v in ys]]
        assert abs(quantile(spec, t) - feasible.max()) < 1e-4


def test_quantile_extended_conventions():
    for spec in all_specs():
        assert quantile(spec, 1.0) == math.inf
        assert quantile(spec, 1.5) == math.inf
        assert quantile(spec, -0.1) == -math.inf
        assert quantile_left(spec, 0.0) == -math.inf
        lo, hi = support(spec)
        assert quantile_left(spec, 1.0) == pytest.approx(hi, abs=1e-9)


def test_cdf_quantile_idempotence_interior(rng):
    for spec in continuous_specs():
        for t in rng.uniform(0.05, 0.95, size=40):
            x = quantile(spec, float(t))
            assert cdf(spec, x) == pytest.approx(t, abs=1e-9)
            t2 = cdf(spec, x)
            assert quantile(spec, t2) == pytest.approx(x, rel=1e-8, abs=1e-8)


def test_cdf_left_below_cdf_everywhere(rng):
    for spec in all_specs():
        jumps = {j.location for j in cdf_map(spec).jumps}
        for x in rng.uniform(-4, 6, size=200):
            lo, hi = cdf_left(spec, float(x)), cdf(spec, float(x))
            assert lo <= hi + 1e-15
            if spec.family != "inverse_cantor" and all(abs(x - j) > 1e-9 for j in jumps):
                assert lo == pytest.approx(hi, abs=1e-12)


def test_monotonicity_random_ordered_pairs(rng):
    for spec in all_specs():
        pairs = rng.uniform(-5, 7, size=(1000, 2))
        pairs.sort(axis=1)
        for a, b in pairs:
            assert cdf(spec, float(a)) <= cdf(spec, float(b)) + 1e-15
        ts = rng.uniform(0, 1, size=(1000, 2))
        ts.sort(axis=1)
        for a, b in ts:
            assert quantile(spec, float(a)) <= quantile(spec, float(b)) + 1e-12


def test_normal_quantile_accuracy():
    anchors = {
        0.975: (1.959963984540054, 1e-12),
        0.5: (0.0, 1e-15),
        0.0013498980316300933: (-3.0, 1e-9),
        0.9986501019683699: (3.0, 1e-9),
    }
    n01 = normal(0, 1)
    for t, (z, tol) in anchors.items():
        assert quantile(n01, t) == pytest.approx(z, abs=tol)


def test_cantor_cdf_exact_rationals():
    c = cantor()
    assert cdf(c, Fraction(1, 3)) == 0.5
    assert cdf(c, Fraction(2, 9)) == 0.25
    assert cdf(c, Fraction(1, 9)) == 0.25
    assert cdf(c, 0.5) == 0.5
    assert cdf(c, Fraction(1, 4)) == pytest.approx(1 / 3, abs=1e-15)
    assert quantile(c, 0.5) == pytest.approx(2 / 3, abs=1e-15)
    assert quantile_left(c, 0.5) == pytest.approx(1 / 3, abs=1e-15)


def test_inverse_cantor_views():
    ic = inverse_cantor()
    assert cdf(ic, 0.5) == pytest.approx(2 / 3, abs=1e-15)
    assert cdf_left(ic, 0.5) == pytest.approx(1 / 3, abs=1e-15)
    assert cdf(ic, 0.25) == pytest.approx(2 / 9, abs=1e-15)
    assert quantile(ic, float(Fraction(1, 3))) == pytest.approx(0.25, abs=1e-9)


def test_dilate_families():
    e = exponential(2)
    d = dilate(e, 2.0)  # behaves like exponential(1)
    for x in (0.5, 1.0, 3.0):
        assert cdf(d, x) == pytest.approx(cdf(exponential(1), x), abs=1e-14)
    u = dilate(uniform(0, 1), 2.0)
    for x in (0.5, 1.0, 1.5):
        assert cdf(u, x) == pytest.approx(cdf(uniform(0, 2), x), abs=1e-14)
    with pytest.raises(ValueError):
        dilate(e, 0.0)
    with pytest.raises(ValueError):
        dilate(e, -1.0)


def test_dilate_round_trip(rng):
    for spec in all_specs():
        for eps in (0.25, 1.7):
            rt = dilate(dilate(spec, eps), 1.0 / eps)
            for x in rng.uniform(-3, 5, size=25):
                assert cdf(rt, float(x)) == pytest.approx(cdf(spec, float(x)), abs=1e-12)


def test_dilate_pushforward_identity(rng):
    for spec in all_specs():
        d = dilate(spec, 3.0)
        for x in rng.uniform(-3, 4, size=25):
            assert cdf(d, 3.0 * float(x)) == pytest.approx(cdf(spec, float(x)), abs=1e-13)


def test_inverse_measure_exponential():
    desc = inverse_measure(exponential(1))
    assert desc.atoms == ()
    for t in (0.1, 0.5, 0.9):
        assert desc.ac_density(t) == pytest.approx(1 / (1 - t), abs=1e-12)
    assert desc.ac_sup == math.inf and desc.ac_sup_exact


def test_inverse_measure_mixture():
    a, b = Fraction(1, 3), 2.0
    desc = inverse_measure(atom_uniform_mixture(a, b))
    assert desc.atoms == ((a, 2.0),)
    assert desc.ac_density(0.9) == pytest.approx((b - 1) / (1 - float(a)), abs=1e-12)
    assert desc.ac_density(0.2) == 0.0
    # a = 0 has no atom
    assert inverse_measure(atom_uniform_mixture(0, 3)).atoms == ()


def test_inverse_measure_cantor_atoms():
    desc = inverse_measure(cantor())
    assert len(desc.atoms) == 2 ** 20 - 1
    q, m = desc.atoms[2 ** 19 - 1]
    assert q == Fraction(1, 2) and m == pytest.approx(3.0 ** -1, abs=1e-16)
    q, m = desc.atoms[2 ** 18 - 1]
    assert q == Fraction(1, 4) and m == pytest.approx(3.0 ** -2, abs=1e-16)
    # masses by generation: atom at odd i / 2^k has mass 3^-k
    q, m = desc.atoms[2]
    assert q == Fraction(3, 2 ** 20) and m == pytest.approx(3.0 ** -20, rel=1e-12)
    assert desc.truncated_mass == pytest.approx((2 / 3) ** 20, rel=1e-12)


def test_inverse_measure_total_mass_identity():
    # integral of the density plus atom masses equals the support diameter
    for spec in [benford(10), uniform(0, 1), uniform(-2, 3),
                 atom_uniform_mixture(Fraction(1, 3), 2), two_point(Fraction(1, 2)),
                 empirical([(0.0, Fraction(1, 2)), (3.0, Fraction(1, 2))])]:
        desc = inverse_measure(spec)
        lo, hi = support(spec)
        total = integrate_panels(desc.ac_density,
                                 [0.0, *[float(q) for q, _ in desc.atoms], 1.0],
                                 tol=1e-11) + sum(m for _, m in desc.atoms)
        assert total == pytest.approx(hi - lo, abs=1e-8), spec


def test_inverse_measure_singular_continuous_flag():
    desc = inverse_measure(inverse_cantor())
    assert desc.singular_continuous and desc.atoms == ()
    assert not inverse_measure(cantor()).singular_continuous


def test_ac_density_matches_quantile_derivative():
    # chain rule: density(quantile(t)) * quantile'(t) = 1 for smooth families
    from levyq import quantile as q
    from levyq.distributions import quantile_derivative
    for spec in [exponential(1), benford(10), pareto(1), uniform(0, 1)]:
        for t in (0.2, 0.5, 0.8):
            x = q(spec, t)
            assert ac_density(spec, x) * quantile_derivative(spec, t, 1) == pytest.approx(1.0, rel=1e-10)


def test_parse_spec_shorthand_and_json():
    s = parse_spec("exp(1)")
    assert s.family == "exponential" and s.params == (1,)
    s = parse_spec("two_point(1/3)")
    assert s.params == (Fraction(1, 3),)
    s = parse_spec("mixture(2/5, 3)")
    assert s.family == "atom_uniform_mixture" and s.params == (Fraction(2, 5), 3)
    s = parse_spec("cantor")
    assert s.family == "cantor"
    s = parse_spec('{"family": "normal", "params": {"mean": 0, "var": 1}}')
    assert s.family == "normal"
    s = parse_spec({"family": "pareto", "params": {"alpha": 1}, "scale": 2.0})
    assert s.scale == 2.0
    with pytest.raises(UnsupportedSpecError):
        parse_spec("zeta(3)")
    with pytest.raises(ValueError):
        parse_spec("exp()")
    with pytest.raises(ValueError):
        parse_spec("exp(1, 2)")


def test_spec_json_round_trip():
    for spec in all_specs():
        again = parse_spec(json.dumps(spec_to_json(spec)))
        assert again == spec, spec


def test_empirical_from_csv_inline_and_fractions():
    spec = empirical_from_csv("location,mass\n0.0,1/4\n1.0,3/4\n")
    assert cdf(spec, 0.5) == 0.25
    assert spec.params[0][0][1] == Fraction(1, 4)
    with pytest.raises(ValueError):
        empirical_from_csv("0.0,0.9\n")  # masses do not sum to 1


def test_empirical_merges_duplicates():
    spec = empirical([(1.0, 0.25), (1.0, 0.25), (2.0, 0.5)])
    assert cdf(spec, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert len(spec.params[0]) == 2


def test_array_views_match_scalars(rng):
    for spec in all_specs():
        if spec.family in ("cantor", "inverse_cantor"):
            continue
        ts = rng.uniform(0.01, 0.99, size=37)
        assert np.allclose(quantile_array(spec, ts),
                           [quantile(spec, float(t)) for t in ts], atol=1e-12)
        assert np.allclose(quantile_left_array(spec, ts),
                           [quantile_left(spec, float(t)) for t in ts], atol=1e-12)
        xs = rng.uniform(-3, 5, size=37)
        assert np.allclose(cdf_array(spec, xs),
                           [cdf(spec, float(x)) for x in xs], atol=1e-12)


def test_validation_rejects_bad_parameters():
    for bad in [lambda: exponential(0), lambda: benford(1), lambda: pareto(-1),
                lambda: normal(0, 0), lambda: uniform(1, 1), lambda: two_point(0),
                lambda: two_point(1), lambda: atom_uniform_mixture(1, 2),
                lambda: atom_uniform_mixture(0.5, 0.5),
                lambda: empirical([(0.0, 0.4)])]:
        with pytest.raises(ValueError):
            bad()
