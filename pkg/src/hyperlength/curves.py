"""Closed polylines in model domains and homotopy-constrained shortening.

Shortening is preconditioned gradient descent on the discrete hyperbolic
length. On domains with a hole at the origin the descent runs in the
logarithmic chart ``w = log z``, where the core circles of the annulus and
the circles about the puncture of the punctured disc become straight lines
and the preconditioner sees the radial mode at its true stiffness. Each
step is capped at half the clearance to the boundary and rejected if it
would change a winding number, so every iterate stays in the homotopy
class of the input.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from sklearn.base import BaseEstimator

from hyperlength._validation import check_polyline_vertices
from hyperlength.metrics import (
    DomainError,
    ModelSurface,
    clearance,
    density,
    density_gradient,
    gauss_legendre,
)

Status = Literal["converged", "escaped_to_puncture", "max_iterations"]

MIN_VERTICES = 8


class DegenerateCurveError(ValueError):
    pass


class NonHyperbolicError(ValueError):
    """The surface carries the zero pseudometric; nothing can be shortened."""


@dataclass(frozen=True, eq=False)
class ClosedPolyline:
    """Closed polygon with vertices strictly inside ``surface``."""

    vertices: np.ndarray
    surface: ModelSurface

    def __post_init__(self):
        z = check_polyline_vertices(self.vertices, min_vertices=MIN_VERTICES)
        if not np.all(clearance(self.surface, z) > 0):
            raise DomainError(f"curve has vertices outside {self.surface}")
        z.setflags(write=False)
        object.__setattr__(self, "vertices", z)

    def __len__(self):
        return len(self.vertices)

    @classmethod
    def circle(cls, surface: ModelSurface, radius: float, n: int = 256,
               center: complex = 0j, reverse: bool = False) -> ClosedPolyline:
        theta = 2.0 * math.pi * np.arange(n) / n
        if reverse:
            theta = -theta
        return cls(center + radius * np.exp(1j * theta), surface)


def winding_number(curve, center: complex = 0j) -> int:
    z = np.asarray(getattr(curve, "vertices", curve), dtype=complex) - center
    if np.any(z == 0):
        raise ValueError(f"a vertex sits on the winding centre {center}")
    turn = float(np.angle(np.roll(z, -1) / z).sum())
    return round(turn / (2.0 * math.pi))


def _windings(z: np.ndarray, surface: ModelSurface) -> tuple[int, ...]:
    return tuple(winding_number(z, c) for c in surface.holes)


def is_simple(curve) -> bool:
    """Diagnostic self-intersection test over all pairs of non-adjacent segments."""
    z = np.asarray(getattr(curve, "vertices", curve), dtype=complex)
    n = len(z)
    a, b = z, np.roll(z, -1)

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    d1 = cross(b[i] - a[i], a[j] - a[i])
    d2 = cross(b[i] - a[i], b[j] - a[i])
    d3 = cross(b[j] - a[j], a[i] - a[j])
    d4 = cross(b[j] - a[j], b[i] - a[j])
    hits = (d1 * d2 < 0) & (d3 * d4 < 0)
    return not bool(np.any(hits))


def length_and_gradient(surface: ModelSurface, z: np.ndarray,
                        quadrature_order: int = 8) -> tuple[float, np.ndarray]:
    """Discrete hyperbolic length of the closed polygon ``z`` and its gradient.

    The gradient is packed as ``dL/dx + i dL/dy`` per vertex.
    """
    t, w = gauss_legendre(quadrature_order)
    d = np.roll(z, -1) - z
    seg = np.abs(d)
    if np.any(seg == 0):
        raise DegenerateCurveError("consecutive vertices coincide")
    pts = z[:, None] + t * d[:, None]
    mean_density = density(surface, pts) @ w
    grad_density = density_gradient(surface, pts)
    unit = d / seg
    from_start = -unit * mean_density + seg * (grad_density @ (w * (1.0 - t)))
    from_end = unit * mean_density + seg * (grad_density @ (w * t))
    length = math.fsum(seg * mean_density)
    return length, from_start + np.roll(from_end, 1)


def _resample(z: np.ndarray, n: int) -> np.ndarray:
    """``n`` points equally spaced in euclidean arc length, starting at ``z[0]``."""
    closed = np.append(z, z[0])
    s = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(closed)))])
    target = np.arange(n) * (s[-1] / n)
    return np.interp(target, s, closed.real) + 1j * np.interp(target, s, closed.imag)


def _smooth(rhs: np.ndarray, h: float) -> np.ndarray:
    """Solve ``(L / h + h I) u = rhs`` for the periodic path Laplacian ``L``."""
    n = len(rhs)
    k = np.arange(n)
    eig = (2.0 - 2.0 * np.cos(2.0 * math.pi * k / n)) / h + h
    return np.fft.ifft(np.fft.fft(rhs) / eig)


def _largest_capped_step(z, dw, limit, move, iterations: int = 40) -> float:
    """Largest step in (0, 1] keeping every vertex displacement within ``limit``."""

    def ok(alpha):
        return bool(np.all(np.abs(move(z, dw, alpha) - z) <= limit))

    if ok(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo if lo > 0 else hi


@dataclass
class ShorteningResult:
    final_curve: ClosedPolyline
    final_length: float
    status: Status
    length_trace: list[float] = field(default_factory=list)
    gradient_norm: float = math.nan
    iterations: int = 0

    def write_trace(self, path) -> None:
        """CSV with header ``iteration,length``."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["iteration", "length"])
            for i, v in enumerate(self.length_trace):
                writer.writerow([i, f"{v:.12g}"])


def shorten(curve: ClosedPolyline, step_tolerance: float = 1e-14,
            gradient_tolerance: float = 1e-8, max_iterations: int = 20000,
            *, n_vertices: int | None = None, resample_every: int = 25,
            escape_clearance: float = 1e-6, escape_window: int = 100,
            collapse_length: float = 1e-8, quadrature_order: int = 8,
            armijo: float = 1e-4, callback=None) -> ShorteningResult:
    """Shorten ``curve`` within its homotopy class.

    Stops with ``converged`` once the hyperbolic gradient (sup norm over
    vertices) drops below ``gradient_tolerance`` or the curve has collapsed
    below ``collapse_length``; with ``escaped_to_puncture`` once a vertex is
    within ``escape_clearance`` of a puncture and the length has decreased
    on each of the last ``escape_window`` iterations. ``step_tolerance``
    bounds the smallest trial step (hyperbolic units) the line search tries.
    ``callback(iteration, vertices)`` sees every accepted iterate.
    """
    surface = curve.surface
    if not surface.is_hyperbolic:
        raise NonHyperbolicError(f"{surface} has identically vanishing metric")
    n = max(len(curve), 1024) if n_vertices is None else int(n_vertices)
    if n < MIN_VERTICES:
        raise ValueError(f"n_vertices must be at least {MIN_VERTICES}")

    log_chart = bool(surface.holes)
    punctures = np.array(surface.punctures, dtype=complex)
    z = np.array(curve.vertices, dtype=complex)
    if len(z) != n:
        z = _resample(z, n)
    windings = _windings(z, surface)
    if windings != _windings(curve.vertices, surface):
        raise DegenerateCurveError("curve too coarse to resample without changing its class")

    def evaluate(z):
        length, g = length_and_gradient(surface, z, quadrature_order)
        lam = density(surface, z)
        if log_chart:
            # chain rule for z = exp(w); density in the w chart is lam |z|
            g = g * np.conj(z)
            lam = lam * np.abs(z)
        return length, g, lam

    def move(z, dw, alpha):
        return z * np.exp(alpha * dw) if log_chart else z + alpha * dw

    length, g, lam = evaluate(z)
    trace = [length]
    status: Status = "max_iterations"
    gnorm = math.inf
    streak = 0
    it = 0
    for it in range(1, max_iterations + 1):
        ghyp = g / lam
        gnorm = float(np.max(np.abs(ghyp)))
        if gnorm < gradient_tolerance or length < collapse_length:
            status = "converged"
            break

        h = length / n
        dhyp = -_smooth(ghyp, h)
        dw = dhyp / lam
        slope = float(np.real(np.vdot(g, dw)))
        limit = 0.5 * clearance(surface, z)
        alpha = _largest_capped_step(z, dw, limit, move)
        accepted = None
        while alpha * float(np.max(np.abs(dhyp))) >= step_tolerance:
            trial = move(z, dw, alpha)
            if (np.all(np.abs(trial - z) <= limit)
                    and _windings(trial, surface) == windings):
                try:
                    new_length, new_g, new_lam = evaluate(trial)
                except (DomainError, DegenerateCurveError):
                    new_length = math.inf
                if new_length <= length + armijo * alpha * slope:
                    accepted = trial
                    break
            alpha *= 0.5
        if accepted is None:
            # no representable decrease left along the descent direction
            if gnorm < math.sqrt(gradient_tolerance):
                status = "converged"
            break

        streak = streak + 1 if new_length < length else 0
        z, length, g, lam = accepted, new_length, new_g, new_lam

        if it % resample_every == 0:
            resampled = _resample(z, n)
            if _windings(resampled, surface) == windings:
                try:
                    r_length, r_g, r_lam = evaluate(resampled)
                except (DomainError, DegenerateCurveError):
                    r_length = math.inf
                if r_length <= length:
                    z, length, g, lam = resampled, r_length, r_g, r_lam
        trace.append(length)
        if callback is not None:
            callback(it, z)

        if len(punctures) and streak >= escape_window:
            gap = float(np.min(np.abs(z[:, None] - punctures[None, :])))
            if gap < escape_clearance:
                status = "escaped_to_puncture"
                break

    return ShorteningResult(
        final_curve=ClosedPolyline(z, surface),
        final_length=length,
        status=status,
        length_trace=trace,
        gradient_norm=gnorm,
        iterations=it,
    )


def stable_length(curve: ClosedPolyline, **kwargs) -> tuple[float, bool]:
    """Estimate the infimum of length over the homotopy class of ``curve``.

    Returns ``(value, attained)``; an escaping class reports ``(0.0, False)``.
    """
    result = shorten(curve, **kwargs)
    if result.status == "escaped_to_puncture":
        return 0.0, False
    if result.status == "converged" and result.final_length < kwargs.get("collapse_length", 1e-8):
        return result.final_length, False
    return result.final_length, result.status == "converged"


class CurveShortener(BaseEstimator):
    """Estimator wrapper around :func:`shorten`.

    ``fit`` shortens one closed polyline; ``transform`` maps a sequence of
    polylines to a column of their shortened lengths.
    """

    def __init__(self, step_tolerance=1e-14, gradient_tolerance=1e-8, max_iterations=20000,
                 n_vertices=None, resample_every=25, escape_clearance=1e-6,
                 escape_window=100, quadrature_order=8):
        self.step_tolerance = step_tolerance
        self.gradient_tolerance = gradient_tolerance
        self.max_iterations = max_iterations
        self.n_vertices = n_vertices
        self.resample_every = resample_every
        self.escape_clearance = escape_clearance
        self.escape_window = escape_window
        self.quadrature_order = quadrature_order

    def _run(self, curve):
        if not isinstance(curve, ClosedPolyline):
            raise TypeError(f"expected a ClosedPolyline, got {type(curve).__name__}")
        return shorten(curve, **self.get_params())

    def fit(self, X, y=None):
        self.result_ = self._run(X)
        self.curve_ = self.result_.final_curve
        self.length_ = self.result_.final_length
        self.status_ = self.result_.status
        self.length_trace_ = np.asarray(self.result_.length_trace)
        return self

    def transform(self, X):
        return np.array([[self._run(c).final_length] for c in X])
