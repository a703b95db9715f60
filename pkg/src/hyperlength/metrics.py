"""Closed-form hyperbolic densities on model domains and length quadrature.

All densities are normalized to curvature -1, so that the circle
``|z| = r`` in the punctured disc has length ``2 pi / log(1/r)``.
A density ``lam`` measures hyperbolic length per euclidean length:
the length of a curve ``gamma`` is the integral of ``lam(gamma) |gamma'|``.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import cache

import numpy as np

KINDS = ("disc", "punctured_disc", "annulus", "plane", "punctured_plane")


class DomainError(ValueError):
    """A point or curve lies outside (or on the boundary of) the model domain."""


@dataclass(frozen=True)
class ModelSurface:
    """One of the model domains in the complex plane.

    ``kind`` is ``disc``, ``punctured_disc``, ``annulus`` (``r < |z| < 1``),
    ``plane`` or ``punctured_plane``; ``inner`` is the inner radius of the
    annulus and ``None`` otherwise.
    """

    kind: str
    inner: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown surface kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "annulus":
            if self.inner is None or not 0.0 < self.inner < 1.0:
                raise ValueError(f"annulus inner radius must lie in (0, 1), got {self.inner!r}")
            object.__setattr__(self, "inner", float(self.inner))
        elif self.inner is not None:
            raise ValueError(f"{self.kind} takes no inner radius")

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind not in ("plane", "punctured_plane")

    @property
    def punctures(self) -> tuple[complex, ...]:
        """Isolated boundary points (the winding centres for homotopy bookkeeping)."""
        if self.kind in ("punctured_disc", "punctured_plane"):
            return (0j,)
        return ()

    @property
    def holes(self) -> tuple[complex, ...]:
        """Centres about which winding numbers classify closed curves."""
        return () if self.kind in ("disc", "plane") else (0j,)

    def __str__(self):
        return f"annulus({self.inner:.12g})" if self.kind == "annulus" else self.kind


def Disc() -> ModelSurface:
    return ModelSurface("disc")


def PuncturedDisc() -> ModelSurface:
    return ModelSurface("punctured_disc")


def Annulus(inner: float) -> ModelSurface:
    return ModelSurface("annulus", inner)


def Plane() -> ModelSurface:
    return ModelSurface("plane")


def PuncturedPlane() -> ModelSurface:
    return ModelSurface("punctured_plane")


def symmetric_annulus(r: float) -> ModelSurface:
    """The annulus ``1/r < |z| < r`` in canonical form ``A(1/r^2, 1)``.

    Points are carried over by :func:`from_symmetric`.
    """
    if not r > 1:
        raise ValueError(f"symmetric annulus needs r > 1, got {r!r}")
    return Annulus(r ** -2.0)


def from_symmetric(z, r: float):
    """Chart change ``z -> z / r`` from ``A(1/r, r)`` onto ``A(1/r^2, 1)``."""
    return np.asarray(z) / r


def clearance(surface: ModelSurface, z) -> np.ndarray:
    """Euclidean distance from ``z`` to the boundary and punctures of the domain.

    Negative or zero values mean the point is not in the open domain.
    """
    rho = np.abs(np.asarray(z, dtype=complex))
    kind = surface.kind
    if kind == "disc":
        return 1.0 - rho
    if kind == "punctured_disc":
        return np.minimum(rho, 1.0 - rho)
    if kind == "annulus":
        return np.minimum(rho - surface.inner, 1.0 - rho)
    if kind == "plane":
        return np.full(rho.shape, np.inf)
    return rho


def _check_inside(surface: ModelSurface, z: np.ndarray) -> None:
    bad = ~(clearance(surface, z) > 0)
    if np.any(bad):
        first = np.asarray(z).ravel()[np.flatnonzero(bad.ravel())[0]]
        raise DomainError(f"point {complex(first)} is outside {surface}")


def _radial(surface: ModelSurface, rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Radial profile ``f(rho)`` of the density and its derivative ``f'(rho)``."""
    kind = surface.kind
    if kind == "disc":
        q = 1.0 - rho * rho
        return 2.0 / q, 4.0 * rho / (q * q)
    if kind == "punctured_disc":
        ell = -np.log(rho)
        p = rho * ell
        return 1.0 / p, -(ell - 1.0) / (p * p)
    if kind == "annulus":
        width = -math.log(surface.inner)
        k = math.pi / width
        u = -np.log(rho) / width
        s, c = np.sin(math.pi * u), np.cos(math.pi * u)
        p = rho * s
        return k / p, -k * (s - k * c) / (p * p)
    zero = np.zeros_like(rho)
    return zero, zero


def density(surface: ModelSurface, z):
    """Hyperbolic density at ``z`` (scalar or array).

    Plane and punctured plane carry the identically vanishing pseudometric.
    """
    z = np.asarray(z, dtype=complex)
    _check_inside(surface, z)
    f, _ = _radial(surface, np.abs(z))
    return float(f) if f.ndim == 0 else f


def density_gradient(surface: ModelSurface, z):
    """Euclidean gradient of the density packed as ``d/dx + i d/dy``."""
    z = np.asarray(z, dtype=complex)
    _check_inside(surface, z)
    rho = np.abs(z)
    _, df = _radial(surface, rho)
    with np.errstate(invalid="ignore", divide="ignore"):
        g = np.where(rho > 0, df * z / np.where(rho > 0, rho, 1.0), 0.0)
    return complex(g) if g.ndim == 0 else g


@cache
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes in [0, 1] and weights summing to one."""
    if order < 1:
        raise ValueError("quadrature order must be positive")
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def segment_lengths(surface: ModelSurface, a, b, quadrature_order: int = 8) -> np.ndarray:
    """Hyperbolic lengths of the straight segments ``[a_k, b_k]``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    t, w = gauss_legendre(quadrature_order)
    pts = a[..., None] + t * (b - a)[..., None]
    return np.abs(b - a) * (density(surface, pts) @ w)


def _vertices(curve) -> tuple[np.ndarray, bool]:
    verts = getattr(curve, "vertices", None)
    if verts is not None:
        return np.asarray(verts, dtype=complex), True
    return np.asarray(curve, dtype=complex), False


def _distance_to_origin(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    dd = np.abs(d) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(dd > 0, -np.real(np.conj(a) * d) / np.where(dd > 0, dd, 1.0), 0.0)
    return np.abs(a + np.clip(t, 0.0, 1.0) * d)


def curve_length(surface: ModelSurface, curve, quadrature_order: int = 8) -> float:
    """Hyperbolic length of a polyline by composite Gauss-Legendre quadrature.

    ``curve`` is either a closed polyline (anything with ``vertices``) or a
    plain sequence of points, read as an open polyline.
    """
    z, closed = _vertices(curve)
    if z.ndim != 1 or len(z) < 2:
        raise ValueError("a polyline needs at least two vertices")
    b = np.roll(z, -1) if closed else z[1:]
    a = z if closed else z[:-1]
    if surface.holes:
        # segments may pass over the hole even when both endpoints avoid it
        gap = float(np.min(_distance_to_origin(a, b)))
        floor = surface.inner if surface.kind == "annulus" else 0.0
        if not gap > floor:
            raise DomainError(f"curve passes through the hole of {surface}")
    try:
        return float(segment_lengths(surface, a, b, quadrature_order).sum())
    except DomainError as exc:
        raise DomainError(f"curve leaves {surface}: {exc}") from None


def circle_length(surface: ModelSurface, radius: float) -> float:
    """Closed-form length of the circle ``|z| = radius`` about the origin."""
    return 2.0 * math.pi * radius * density(surface, complex(radius))


def core_length(surface: ModelSurface) -> float:
    """Length ``2 pi^2 / log(1/r)`` of the core geodesic ``|z| = sqrt(r)`` of an annulus."""
    if surface.kind != "annulus":
        raise ValueError("core length is defined for annuli only")
    return 2.0 * math.pi ** 2 / -math.log(surface.inner)


def curvature_residual(surface: ModelSurface, z: complex, step: float) -> float:
    """Gaussian curvature plus one, by a five-point Laplacian of ``log lam``.

    Zero for an exact curvature -1 metric, up to O(step^2) truncation.
    """
    z = complex(z)
    if not step > 0:
        raise ValueError("step must be positive")
    if not float(clearance(surface, z)) > 4.0 * step:
        raise DomainError(f"{z} is closer than 4*step to the boundary of {surface}")
    if not surface.is_hyperbolic:
        raise ValueError(f"{surface} carries no metric of negative curvature")
    pts = np.array([z, z + step, z - step, z + 1j * step, z - 1j * step])
    log_lam = np.log(density(surface, pts))
    laplacian = (log_lam[1:].sum() - 4.0 * log_lam[0]) / step ** 2
    curvature = -laplacian / math.exp(2.0 * log_lam[0])
    return float(curvature + 1.0)


@dataclass(frozen=True)
class HolomorphicMap:
    """A closed-form holomorphic map between model surfaces, with its derivative."""

    source: ModelSurface
    target: ModelSurface
    func: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    name: str = ""


def covering_map() -> HolomorphicMap:
    """Universal covering ``z -> exp(-(1+z)/(1-z))`` of the punctured disc by the disc."""

    def f(z):
        return np.exp(-(1 + z) / (1 - z))

    def df(z):
        return f(z) * -2.0 / (1 - z) ** 2

    return HolomorphicMap(Disc(), PuncturedDisc(), f, df, "covering")


def exp_map(alpha: float, log_r: float | None = None) -> HolomorphicMap:
    """``z -> exp(i alpha z)`` from the disc into ``A(1/r, r)``, ``log r >= alpha``.

    The target is reported in canonical form ``A(1/r^2, 1)``, so the map
    composed with the chart change is ``z -> exp(i alpha z) / r``.
    """
    log_r = alpha if log_r is None else log_r
    if not alpha > 0 or log_r < alpha:
        raise ValueError("need alpha > 0 and log r >= alpha")
    scale = math.exp(-log_r)

    def f(z):
        return np.exp(1j * alpha * z) * scale

    def df(z):
        return 1j * alpha * f(z)

    return HolomorphicMap(Disc(), Annulus(math.exp(-2.0 * log_r)), f, df, f"exp(i*{alpha:g}*z)")


def identity_map(surface: ModelSurface | None = None) -> HolomorphicMap:
    surface = surface or Disc()
    return HolomorphicMap(surface, surface, lambda z: z, np.ones_like, "identity")


def schwarz_pick_check(f: HolomorphicMap, grid) -> float:
    """Largest value of ``lam_Y(f(z)) |f'(z)| - lam_X(z)`` over the grid.

    Nonpositive for every holomorphic map between hyperbolic surfaces;
    zero where ``f`` is a local isometry.
    """
    z = np.asarray(grid, dtype=complex).ravel()
    w = f.func(z)
    try:
        pulled = density(f.target, w) * np.abs(f.derivative(z))
    except DomainError as exc:
        raise DomainError(f"image leaves the target domain: {exc}") from None
    return float(np.max(pulled - density(f.source, z)))
