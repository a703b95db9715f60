import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar
from sklearn.base import clone

from hyperlength.curves import (
    ClosedPolyline,
    CurveShortener,
    DegenerateCurveError,
    NonHyperbolicError,
    is_simple,
    length_and_gradient,
    shorten,
    stable_length,
    winding_number,
)
from hyperlength.metrics import (
    Annulus,
    Disc,
    DomainError,
    Plane,
    PuncturedDisc,
    circle_length,
    curve_length,
    from_symmetric,
    symmetric_annulus,
)


def core_oracle(r):
    # independent 1-D minimization of the closed-form circle length
    surface = Annulus(r)
    lo = math.log(r)
    res = minimize_scalar(lambda s: circle_length(surface, math.exp(s)),
                          bounds=(lo * 0.999, lo * 0.001), method="bounded",
                          options={"xatol": 1e-12})
    return res.fun, math.exp(res.x)


def test_polyline_validation():
    with pytest.raises(ValueError):
        ClosedPolyline(np.exp(2j * np.pi * np.arange(5) / 5) * 0.5, Disc())
    with pytest.raises(DomainError):
        ClosedPolyline.circle(Annulus(0.3), 0.2, 16)
    c = ClosedPolyline.circle(Disc(), 0.5, 16)
    with pytest.raises(ValueError):
        c.vertices[0] = 0


def test_winding_examples():
    s = PuncturedDisc()
    assert winding_number(ClosedPolyline.circle(s, 0.5, 64)) == 1
    assert winding_number(ClosedPolyline.circle(s, 0.5, 64, reverse=True)) == -1
    assert winding_number(ClosedPolyline.circle(s, 0.1, 64, center=0.5)) == 0


def test_winding_rejects_vertex_on_centre():
    c = ClosedPolyline.circle(Disc(), 0.2, 16, center=0.2)
    with pytest.raises(ValueError):
        winding_number(c, c.vertices[5])


@settings(max_examples=50, deadline=None)
@given(st.integers(-3, 3).filter(bool), st.integers(16, 64))
def test_winding_of_multiply_covered_circle(k, n):
    theta = 2 * np.pi * k * np.arange(n) / n
    if n < 4 * abs(k):
        return
    assert winding_number(0.5 * np.exp(1j * theta)) == k


def test_simplicity_diagnostic():
    assert is_simple(ClosedPolyline.circle(Disc(), 0.5, 32))
    t = 2 * np.pi * np.arange(64) / 64
    eight = 0.4 * np.sin(t) + 0.3j * np.sin(2 * t) + 0.01j
    assert not is_simple(eight)


def test_gradient_matches_finite_differences():
    surface = Annulus(0.05)
    rng = np.random.default_rng(3)
    z = 0.3 * np.exp(2j * np.pi * np.arange(24) / 24) * (1 + 0.1 * rng.uniform(size=24))
    _, g = length_and_gradient(surface, z)
    h = 1e-7
    for k in (0, 7, 19):
        for direction in (1, 1j):
            zp, zm = z.copy(), z.copy()
            zp[k] += h * direction
            zm[k] -= h * direction
            fd = (length_and_gradient(surface, zp)[0] - length_and_gradient(surface, zm)[0]) / (2 * h)
            exact = g[k].real if direction == 1 else g[k].imag
            assert fd == pytest.approx(exact, rel=1e-5, abs=1e-8)


def test_discrete_length_matches_curve_length():
    c = ClosedPolyline.circle(Annulus(0.1), 0.4, 100, center=0.02)
    assert length_and_gradient(c.surface, np.array(c.vertices))[0] == pytest.approx(
        curve_length(c.surface, c), rel=1e-14)


def test_repeated_vertex_is_degenerate():
    z = 0.5 * np.exp(2j * np.pi * np.arange(16) / 16)
    z[3] = z[2]
    with pytest.raises(DegenerateCurveError):
        length_and_gradient(Disc(), z)


def test_shorten_annulus_example():
    r = math.exp(-2 * math.pi ** 2)
    result = shorten(ClosedPolyline.circle(Annulus(r), 0.5, 64))
    assert result.status == "converged"
    assert result.final_length == pytest.approx(1.0, abs=1e-4)
    assert np.max(np.abs(np.abs(result.final_curve.vertices) / math.sqrt(r) - 1)) < 1e-4


def test_shorten_punctured_disc_escapes():
    result = shorten(ClosedPolyline.circle(PuncturedDisc(), 0.5, 64))
    assert result.status == "escaped_to_puncture"
    assert min(result.length_trace) < 0.2
    assert np.min(np.abs(result.final_curve.vertices)) < 1e-6


def test_shorten_contractible_loop_collapses():
    result = shorten(ClosedPolyline.circle(Annulus(0.1), 0.05, 32, center=0.5))
    assert result.status == "converged"
    assert result.final_length < 1e-3
    assert winding_number(result.final_curve) == 0


def test_shorten_rejects_plane():
    with pytest.raises(NonHyperbolicError):
        shorten(ClosedPolyline.circle(Plane(), 0.5, 16))


@pytest.mark.parametrize("r", [math.exp(-math.pi), math.exp(-2 * math.pi), math.exp(-2 * math.pi ** 2)])
def test_oracle_agreement(r):
    oracle, radius = core_oracle(r)
    assert oracle == pytest.approx(2 * math.pi ** 2 / -math.log(r), rel=1e-9)
    assert radius == pytest.approx(math.sqrt(r), rel=1e-4)
    start = ClosedPolyline.circle(Annulus(r), r ** 0.25, 48, center=0.1 * r ** 0.25)
    value, attained = stable_length(start)
    assert attained
    assert value == pytest.approx(oracle, abs=1e-4)


@pytest.mark.parametrize("surface,radius,winding", [
    (Annulus(0.05), 0.6, 1),
    (Annulus(0.05), 0.6, -1),
    (PuncturedDisc(), 0.5, 1),
])
def test_every_iterate_keeps_its_winding(surface, radius, winding):
    seen = []
    start = ClosedPolyline.circle(surface, radius, 40, reverse=winding < 0)
    shorten(start, max_iterations=300,
            callback=lambda it, z: seen.append(winding_number(z)))
    assert seen and set(seen) == {winding}


def test_length_trace_is_nonincreasing():
    result = shorten(ClosedPolyline.circle(Annulus(0.02), 0.7, 64, center=0.1), max_iterations=500)
    trace = np.asarray(result.length_trace)
    assert np.all(np.diff(trace) <= 0)


def test_discretization_independence():
    r = math.exp(-2 * math.pi)
    a = shorten(ClosedPolyline.circle(Annulus(r), 0.3, 32)).final_length
    b = shorten(ClosedPolyline.circle(Annulus(r), 0.3, 128)).final_length
    assert a == pytest.approx(b, abs=1e-4)


def test_upper_bound_chain_for_symmetric_annulus():
    alpha_prime, alpha = 4 * math.pi, 3 * math.pi
    r = math.exp(alpha_prime)
    surface = symmetric_annulus(r)
    start = ClosedPolyline(from_symmetric(np.exp(2j * np.pi * np.arange(64) / 64), r), surface)
    value, _ = stable_length(start)
    bound = curve_length(Disc(), np.linspace(0, 2 * math.pi / alpha, 65))
    assert bound == pytest.approx(2 * math.atanh(2 * math.pi / alpha), abs=1e-12)
    assert bound == pytest.approx(math.log(5), abs=1e-12)
    assert value <= bound
    assert value == pytest.approx(math.pi / 4, abs=1e-4)


def test_stable_length_examples():
    assert stable_length(ClosedPolyline.circle(PuncturedDisc(), 0.5, 64)) == (0.0, False)
    value, attained = stable_length(ClosedPolyline.circle(Annulus(0.1), 0.05, 32, center=0.5))
    assert value < 1e-3 and not attained


def test_trace_csv(tmp_path):
    result = shorten(ClosedPolyline.circle(Annulus(0.1), 0.5, 32), max_iterations=5)
    path = tmp_path / "trace.csv"
    result.write_trace(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,length"
    assert len(lines) == len(result.length_trace) + 1
    assert result.status == "max_iterations"


def test_shortening_is_deterministic():
    start = ClosedPolyline.circle(Annulus(0.05), 0.5, 48, center=0.05)
    a, b = shorten(start, max_iterations=200), shorten(start, max_iterations=200)
    assert a.length_trace == b.length_trace
    assert np.array_equal(a.final_curve.vertices, b.final_curve.vertices)


def test_estimator_api():
    est = CurveShortener(max_iterations=400)
    assert est.get_params()["max_iterations"] == 400
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    r = math.exp(-math.pi)
    est.fit(ClosedPolyline.circle(Annulus(r), 0.5, 32))
    assert est.status_ == "converged"
    assert est.length_ == pytest.approx(2 * math.pi, abs=1e-4)
    out = est.transform([ClosedPolyline.circle(Annulus(r), 0.4, 32)])
    assert out.shape == (1, 1) and out[0, 0] == pytest.approx(2 * math.pi, abs=1e-4)
    with pytest.raises(TypeError):
        est.fit(np.zeros(10))
