import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlength.deform import (
    AnnulusFamily,
    CollarInterpolation,
    RadialFamily,
    RepresentationPath,
    collar_lengths,
    constant_path,
    disc_segment_bound,
    generator_lengths,
    lambda_of_t,
    metric_is_positive_definite,
    mu,
    mu_log,
    radial_map,
    representation_path,
    shrinking_annulus_family,
    smootherstep,
    standard_path,
    with_translation_length,
    write_family_trace,
)
from hyperlength.groups import (
    CertificationError,
    perpendicular_pair,
    truncated_spectrum,
)
from hyperlength.metrics import circle_length, symmetric_annulus
from hyperlength.moebius import (
    conjugate,
    fixed_points,
    hyperbolic,
    rotation,
    translation_length,
)
from hyperlength.spectrum import compare

T_GRID = np.linspace(0, 1, 101)


def unit_circle(n=256):
    return np.exp(2j * np.pi * np.arange(n) / n)


def test_radial_examples():
    z = np.array([0.3 + 0.1j, -0.5j, 0.0])
    assert np.allclose(radial_map(RadialFamily("phi", 0.0), z), z, rtol=1e-15, atol=0)
    assert abs(radial_map(RadialFamily("phi_star", 0.0), 0.5)) == pytest.approx(1.0, abs=1e-15)
    near_edge = [abs(radial_map(RadialFamily("phi", 1.0), 1 - 10.0 ** -k)) for k in (2, 4, 6)]
    assert near_edge == sorted(near_edge) and near_edge[-1] > 1e5


def test_image_radius():
    assert RadialFamily("phi", 0).image_radius == 1.0
    assert RadialFamily("phi", 0.5).image_radius == math.inf
    assert RadialFamily("phi_star", 0).image_radius == math.inf
    assert RadialFamily("phi_star", 1).image_radius == pytest.approx(1.0)
    assert RadialFamily("phi_star", 0.5).image_radius == pytest.approx(math.tan(math.pi / 3))


def test_radial_validation():
    with pytest.raises(ValueError):
        RadialFamily("psi", 0.5)
    with pytest.raises(ValueError):
        RadialFamily("phi", 1.5)
    with pytest.raises(ValueError):
        radial_map(RadialFamily("phi", 0.5), 1.0)


@pytest.mark.parametrize("variant", ["phi", "phi_star"])
def test_profiles_strictly_increasing_on_grid(variant):
    r = np.linspace(0, 1, 10 ** 4, endpoint=False)
    for t in np.linspace(0, 1, 11):
        fam = RadialFamily(variant, t)
        assert np.all(np.diff(fam.profile(r)) > 0)
        assert np.all(fam.profile_derivative(r) > 0)


@pytest.mark.parametrize("variant", ["phi", "phi_star"])
def test_profile_derivative_matches_finite_differences(variant):
    fam = RadialFamily(variant, 0.4)
    r = np.linspace(0.05, 0.9, 9)
    h = 1e-6
    fd = (fam.profile(r + h) - fam.profile(r - h)) / (2 * h)
    assert np.allclose(fam.profile_derivative(r), fd, rtol=1e-7)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["phi", "phi_star"]), st.floats(0, 1),
       st.complex_numbers(max_magnitude=0.99), st.complex_numbers(max_magnitude=0.99))
def test_radial_map_is_injective(variant, t, z, w):
    fam = RadialFamily(variant, t)
    if abs(z - w) > 1e-9:
        assert radial_map(fam, z) != radial_map(fam, w)
    if z != 0:
        # angle preserved
        assert abs(np.angle(radial_map(fam, z) / z)) < 1e-12


def test_mu_examples():
    assert mu(math.exp(math.pi)) == pytest.approx(math.pi, abs=1e-12)
    values = [mu(2.0 ** k) for k in range(1, 11)]
    assert all(a > b for a, b in itertools.pairwise(values))
    assert mu_log(1000.0) < 0.01
    assert mu(math.exp(4 * math.pi)) <= disc_segment_bound(3 * math.pi)
    with pytest.raises(ValueError):
        mu(0.5)
    with pytest.raises(ValueError):
        disc_segment_bound(math.pi)


def test_mu_matches_circle_length_in_canonical_chart():
    for r in (math.exp(1.0), math.exp(math.pi), 50.0):
        # unit circle of A(1/r, r) is |z| = 1/r in A(1/r^2, 1)
        assert circle_length(symmetric_annulus(r), 1 / r) == pytest.approx(mu(r), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(2 * math.pi * 1.0001, 200.0), st.floats(1.0, 1.0))
def test_mu_below_segment_bound_for_admissible_pairs(alpha, scale):
    # any r with log r > alpha is admissible
    for log_r in (alpha * 1.0001, alpha * 1.5, alpha * 10):
        assert mu_log(log_r * scale) <= disc_segment_bound(alpha)


def test_smootherstep():
    u = np.linspace(-0.5, 1.5, 201)
    s = smootherstep(u)
    assert s[0] == 0 and s[-1] == 1
    assert np.all(np.diff(s) >= 0)


def collar():
    return CollarInterpolation(math.exp(6.0), math.exp(4 * math.pi / 3.2))


def test_collar_validation():
    with pytest.raises(ValueError):
        CollarInterpolation(2.0, 3.0)
    with pytest.raises(ValueError):
        CollarInterpolation(10.0, 2.0, outer=20.0)


def test_cutoff_shape():
    c = collar()
    z = np.exp(np.linspace(-5.9, 5.9, 400))
    chi = c.cutoff(z)
    x = np.abs(np.log(z))
    assert np.all(chi[x <= math.log(c.r_prime)] == 1.0)
    assert np.all(chi[x >= math.log(c.outer)] == 0.0)
    inside = (x > math.log(c.r_prime)) & (x < math.log(c.outer))
    order = np.argsort(x[inside])
    assert np.all(np.diff(chi[inside][order]) <= 0)


def test_collar_length_at_zero_is_h_length():
    c = collar()
    z = 1.5 * unit_circle()
    rows = collar_lengths(c, z, [0.0])
    reference = CollarInterpolation(c.r, c.r_prime, h=c.h, rho=c.h)
    assert rows[0][1] == pytest.approx(reference.riemannian_length(z, 1.0), rel=1e-14)
    assert rows[0][2] is None


def test_collar_lengths_continuous_in_t():
    c = collar()
    z = 1.2 * unit_circle() + 0.3
    lengths = np.array([v for _, v, _ in collar_lengths(c, z, T_GRID)])
    jumps = np.abs(np.diff(lengths))
    slope = np.max(jumps) / (T_GRID[1] - T_GRID[0])
    assert np.max(jumps) < 10 * (T_GRID[1] - T_GRID[0]) * slope
    # H_t is affine in t, and length is concave in the metric
    second = lengths[:-2] - 2 * lengths[1:-1] + lengths[2:]
    assert np.all(second <= 1e-12)


def test_collar_bound_at_t_one():
    c = CollarInterpolation(math.exp(5 * math.pi), math.exp(4 * math.pi))
    rows = collar_lengths(c, unit_circle(), [0.0, 0.5, 1.0])
    assert [b for _, _, b in rows[:2]] == [None, None]
    assert rows[2][2] == pytest.approx(math.pi / 4, abs=1e-12)
    # unit circle has length 2 pi in the cylinder metric
    assert rows[2][1] == pytest.approx(2 * math.pi, rel=1e-4)
    off_class = collar_lengths(c, 0.5 * unit_circle() + 2.0, [1.0])
    assert off_class[0][2] is None


def test_metric_positive_definite():
    c = collar()
    rng = np.random.default_rng(0)
    z = np.exp(rng.uniform(-5.9, 5.9, 500) + 1j * rng.uniform(0, 2 * np.pi, 500))
    assert metric_is_positive_definite(c, z, T_GRID)


def test_curve_leaving_chart_rejected():
    with pytest.raises(ValueError):
        collar().riemannian_length(1000.0 * unit_circle(), 0.5)


def test_with_translation_length_keeps_axis():
    g = conjugate(hyperbolic(2.0), rotation(0.7, 0.2 + 1.3j))
    h = with_translation_length(g, 5.0)
    assert translation_length(h) == pytest.approx(5.0, abs=1e-12)
    assert np.allclose(fixed_points(h), fixed_points(g), rtol=1e-10)


def test_representation_path_examples():
    path = standard_path()
    assert representation_path(path, 0.0) is path.base
    for t in T_GRID:
        rep = representation_path(path, float(t))
        assert generator_lengths(rep) == pytest.approx([6.0 + t, 6.0], abs=1e-10)
    a = truncated_spectrum(representation_path(path, 0.0), 1)
    b = truncated_spectrum(representation_path(path, 1.0), 1)
    assert sorted(a.lengths) == pytest.approx([6.0, 6.0], abs=1e-10)
    assert sorted(b.lengths) == pytest.approx([6.0, 7.0], abs=1e-10)
    result = compare(a, b)
    assert result.verdict == "distinct" and result.gap >= 1 - 1e-6


def test_representation_path_failure_is_reported():
    path = RepresentationPath(perpendicular_pair(6.0), [lambda t: 6.0 - 5.9 * t, lambda t: 6.0])
    with pytest.raises(CertificationError, match="t=1"):
        representation_path(path, 1.0)
    with pytest.raises(ValueError):
        RepresentationPath(perpendicular_pair(6.0), [lambda t: 6.0])


def test_constant_path_has_constant_spectrum():
    path = constant_path()
    a = truncated_spectrum(representation_path(path, 0.0), 3)
    b = truncated_spectrum(representation_path(path, 1.0), 3)
    assert compare(a, b).verdict == "indistinguishable_at_truncation"


def test_lambda_on_annulus_family():
    rows = lambda_of_t(shrinking_annulus_family(), 1, T_GRID)
    values = np.array([v for _, v in rows])
    assert values[0] == pytest.approx(1.0, abs=1e-12)
    assert values[-1] == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(values, 1 / (1 + T_GRID), atol=1e-12)
    assert np.all(np.diff(values) < 0)
    with pytest.raises(ValueError):
        lambda_of_t(AnnulusFamily(lambda t: 2.0), 1, [0.5])


def test_lambda_on_representation_path():
    rows = lambda_of_t(standard_path(), (1,), T_GRID)
    values = np.array([v for _, v in rows])
    assert np.allclose(values, 6 + T_GRID, atol=1e-10)
    assert np.all(np.diff(values) > 0)
    with pytest.raises(TypeError):
        lambda_of_t(object(), 1, [0.0])


def test_family_trace_csv(tmp_path):
    path = tmp_path / "trace.csv"
    write_family_trace(lambda_of_t(shrinking_annulus_family(), 1, [0, 0.5, 1]), path)
    assert path.read_text().splitlines() == ["t,value", "0,1", "0.5,0.666666666667", "1,0.5"]
