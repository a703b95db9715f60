"""Explicit deformation families and the length quantities they move.

* radial families on the disc, stretching it onto the plane or squeezing
  the plane-like structure onto a bounded disc;
* the core length ``mu(r)`` of the symmetric annulus ``A(1/r, r)``;
* a collar metric interpolation ``H_t = (1 - t chi) h + t chi rho`` on an
  annular chart, with exact Riemannian lengths along the way;
* paths of Schottky representations that move translation lengths while
  keeping every axis fixed.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from hyperlength._validation import check_unit_interval
from hyperlength.curves import winding_number
from hyperlength.groups import (
    CertificationError,
    ConjugacyClassWord,
    SchottkyRepresentation,
    perpendicular_pair,
    ping_pong_certificate,
    word_length,
)
from hyperlength.metrics import gauss_legendre
from hyperlength.moebius import MoebiusTransform, translation_length

# -- radial families ---------------------------------------------------------


@dataclass(frozen=True)
class RadialFamily:
    """``phi``: ``r -> r + t tan(pi r / 2)``; ``phi_star``: ``r -> tan(pi r / (2 (1 + t)))``."""

    variant: Literal["phi", "phi_star"]
    t: float

    def __post_init__(self):
        if self.variant not in ("phi", "phi_star"):
            raise ValueError(f"unknown radial variant {self.variant!r}")
        object.__setattr__(self, "t", check_unit_interval(self.t, "t"))

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        if self.variant == "phi":
            return r + self.t * np.tan(0.5 * math.pi * r)
        return np.tan(0.5 * math.pi * r / (1.0 + self.t))

    def profile_derivative(self, r):
        r = np.asarray(r, dtype=float)
        if self.variant == "phi":
            return 1.0 + self.t * 0.5 * math.pi / np.cos(0.5 * math.pi * r) ** 2
        k = 0.5 * math.pi / (1.0 + self.t)
        return k / np.cos(k * r) ** 2

    @property
    def image_radius(self) -> float:
        """Radius of the image of the unit disc (``inf`` for the whole plane)."""
        if self.variant == "phi":
            return 1.0 if self.t == 0 else math.inf
        return math.inf if self.t == 0 else math.tan(0.5 * math.pi / (1.0 + self.t))


def radial_map(family: RadialFamily, z):
    """``z -> z rho(|z|) / |z|`` on the open unit disc, with ``0 -> 0``."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    if np.any(r >= 1):
        raise ValueError("radial maps are defined on the open unit disc")
    out = np.where(r > 0, np.exp(1j * np.angle(z)) * family.profile(r), 0.0)
    return complex(out) if out.ndim == 0 else out


# -- annulus core lengths ----------------------------------------------------


def mu(r: float) -> float:
    """Hyperbolic length ``pi^2 / log r`` of the unit circle in ``A(1/r, r)``."""
    if not r > 1:
        raise ValueError(f"mu needs r > 1, got {r!r}")
    return math.pi ** 2 / math.log(r)


def mu_log(log_r: float) -> float:
    """``mu`` parametrized by ``log r``, for radii beyond floating point range."""
    if not log_r > 0:
        raise ValueError("log r must be positive")
    return math.pi ** 2 / log_r


def disc_segment_bound(alpha: float) -> float:
    """Disc length ``2 artanh(2 pi / alpha)`` of ``[0, 2 pi / alpha]``, an upper bound for ``mu``."""
    if not alpha > 2 * math.pi:
        raise ValueError("alpha must exceed 2 pi")
    return 2.0 * math.atanh(2.0 * math.pi / alpha)


# -- collar interpolation ----------------------------------------------------


def smootherstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u ** 3 * (10.0 - 15.0 * u + 6.0 * u * u)


def anisotropic_metric(stretch: float = 4.0) -> Callable[[np.ndarray], np.ndarray]:
    """``diag(1, stretch) / |z|^2``: a metric on the chart not conformal to ``|dz|``."""

    def h(z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + (2, 2))
        s = 1.0 / np.abs(z) ** 2
        out[..., 0, 0] = s
        out[..., 1, 1] = stretch * s
        return out

    return h


def cylinder_metric(z) -> np.ndarray:
    """``|dz|^2 / |z|^2``, conformal to the standard structure of the annulus."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape + (2, 2))
    s = 1.0 / np.abs(z) ** 2
    out[..., 0, 0] = s
    out[..., 1, 1] = s
    return out


@dataclass
class CollarInterpolation:
    """Interpolated metrics on the annular chart ``A(1/r, r)``.

    ``chi`` is one on the inner collar ``A(1/r', r')``, zero for
    ``|log|z|| >= log outer`` and a quintic smoothstep in between.
    """

    r: float
    r_prime: float
    outer: float | None = None
    h: Callable[[np.ndarray], np.ndarray] = field(default_factory=anisotropic_metric)
    rho: Callable[[np.ndarray], np.ndarray] = cylinder_metric

    def __post_init__(self):
        if not self.r > self.r_prime > 1:
            raise ValueError("need r > r' > 1")
        if self.outer is None:
            self.outer = math.sqrt(self.r * self.r_prime)
        if not self.r_prime < self.outer < self.r:
            raise ValueError("cutoff support must end strictly between r' and r")

    def cutoff(self, z):
        x = np.abs(np.log(np.abs(np.asarray(z, dtype=complex))))
        a, b = math.log(self.r_prime), math.log(self.outer)
        return 1.0 - smootherstep((x - a) / (b - a))

    def metric(self, z, t: float) -> np.ndarray:
        chi = (t * self.cutoff(z))[..., None, None]
        return (1.0 - chi) * self.h(z) + chi * self.rho(z)

    def in_chart(self, z) -> bool:
        rho = np.abs(np.asarray(z, dtype=complex))
        return bool(np.all((rho > 1 / self.r) & (rho < self.r)))

    def in_collar(self, z) -> bool:
        rho = np.abs(np.asarray(z, dtype=complex))
        return bool(np.all((rho > 1 / self.r_prime) & (rho < self.r_prime)))

    def riemannian_length(self, vertices, t: float, quadrature_order: int = 8,
                          closed: bool = True) -> float:
        z = np.asarray(getattr(vertices, "vertices", vertices), dtype=complex)
        b = np.roll(z, -1) if closed else z[1:]
        a = z if closed else z[:-1]
        nodes, weights = gauss_legendre(quadrature_order)
        pts = a[:, None] + nodes * (b - a)[:, None]
        if not self.in_chart(pts):
            raise ValueError("curve leaves the collar chart")
        d = b - a
        v = np.stack([d.real, d.imag], axis=-1)[:, None, :]
        quad = np.einsum("sqi,sqij,sqj->sq", np.broadcast_to(v, pts.shape + (2,)),
                         self.metric(pts, t), np.broadcast_to(v, pts.shape + (2,)))
        return math.fsum(np.sqrt(quad) @ weights)


def collar_lengths(interp: CollarInterpolation, curve, t_grid: Sequence[float],
                   quadrature_order: int = 8) -> list[tuple[float, float, float | None]]:
    """``(t, length under H_t, upper bound)`` for each ``t``.

    The upper bound is only available at ``t = 1``: there ``(W, J_1)`` is the
    round annulus ``A(1/r', r')`` and its inclusion decreases hyperbolic
    length, so a curve in ``W`` freely homotopic to the unit circle has
    stable length at most ``mu(r')``.
    """
    z = np.asarray(getattr(curve, "vertices", curve), dtype=complex)
    core_class = interp.in_collar(z) and abs(winding_number(z)) == 1
    rows = []
    for t in t_grid:
        t = check_unit_interval(t, "t")
        bound = mu(interp.r_prime) if t == 1.0 and core_class else None
        rows.append((t, interp.riemannian_length(z, t, quadrature_order), bound))
    return rows


def metric_is_positive_definite(interp: CollarInterpolation, z, t_grid) -> bool:
    z = np.asarray(z, dtype=complex)
    for t in t_grid:
        if not np.all(np.linalg.eigvalsh(interp.metric(z, t)) > 0):
            return False
    return True


# -- representation paths ----------------------------------------------------


def with_translation_length(g: MoebiusTransform, length: float) -> MoebiusTransform:
    """The hyperbolic element with the axis and direction of ``g`` and the given length."""
    vals, vecs = np.linalg.eig(g.matrix)
    vals, vecs = vals.real, vecs.real
    order = np.argsort(-np.abs(vals))
    p = vecs[:, order]
    s = math.exp(length / 2)
    return MoebiusTransform.from_matrix(p @ np.diag([s, 1 / s]) @ np.linalg.inv(p))


@dataclass
class RepresentationPath:
    """A base representation and one translation-length schedule per generator."""

    base: SchottkyRepresentation
    schedule: Sequence[Callable[[float], float]]

    def __post_init__(self):
        if len(self.schedule) != self.base.k:
            raise ValueError("need one schedule per generator")


def standard_path() -> RepresentationPath:
    """Perpendicular axes, ``l1(t) = 6 + t`` and ``l2(t) = 6``."""
    return RepresentationPath(perpendicular_pair(6.0), [lambda t: 6.0 + t, lambda t: 6.0])


def constant_path(length: float = 6.0) -> RepresentationPath:
    return RepresentationPath(perpendicular_pair(length), [lambda t: length, lambda t: length])


def representation_path(path: RepresentationPath, t: float, certify: bool = True,
                        seed: int | None = 0) -> SchottkyRepresentation:
    """The representation at parameter ``t``, re-certified by ping-pong.

    Raises :class:`CertificationError` (with the witness in the message) if
    the certificate fails at ``t``.
    """
    t = check_unit_interval(t, "t")
    if t == 0.0:
        rep = path.base
    else:
        rep = SchottkyRepresentation([
            with_translation_length(g, float(ell(t))) for g, ell in zip(path.base.generators, path.schedule)
        ])
    if certify:
        cert = ping_pong_certificate(rep, seed=seed)
        if not cert:
            raise CertificationError(f"certification fails at t={t:.12g}: {cert.report}")
    return rep


@dataclass(frozen=True)
class AnnulusFamily:
    """Annuli ``A(r(t), 1)``; classes are winding numbers about the origin."""

    inner: Callable[[float], float]


def shrinking_annulus_family() -> AnnulusFamily:
    """``r(t) = exp(-2 pi^2 (1 + t))``, so the core length is ``1 / (1 + t)``."""
    return AnnulusFamily(lambda t: math.exp(-2.0 * math.pi ** 2 * (1.0 + t)))


def lambda_of_t(family, cls, t_grid: Sequence[float]) -> list[tuple[float, float]]:
    """Stable length of ``cls`` along the family.

    ``family`` is an :class:`AnnulusFamily` (``cls`` a winding number) or a
    :class:`RepresentationPath` (``cls`` a word).
    """
    rows = []
    for t in t_grid:
        t = check_unit_interval(t, "t")
        if isinstance(family, AnnulusFamily):
            r = family.inner(t)
            if not 0 < r < 1:
                raise ValueError(f"inner radius {r!r} at t={t} is not in (0, 1)")
            value = abs(int(cls)) * 2.0 * math.pi ** 2 / -math.log(r)
        elif isinstance(family, RepresentationPath):
            word = cls.letters if isinstance(cls, ConjugacyClassWord) else tuple(cls)
            value = word_length(representation_path(family, t), word)
        else:
            raise TypeError(f"unsupported family {type(family).__name__}")
        rows.append((t, value))
    return rows


def generator_lengths(rep: SchottkyRepresentation) -> list[float]:
    return [translation_length(g) for g in rep.generators]


def write_family_trace(rows, path) -> None:
    """CSV with header ``t,value``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "value"])
        for t, v in rows:
            writer.writerow([f"{t:.12g}", f"{v:.12g}"])
