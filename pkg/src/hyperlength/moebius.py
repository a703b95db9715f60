"""Möbius transformations as isometries of the hyperbolic plane.

Elements of PSL(2, R) are stored as normalized real 2x2 matrices. The
upper half-plane is the primary model; the unit disc is reached through
the fixed Cayley transform ``z -> (z - i) / (z + i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

PARABOLIC_BAND = 1e-10
# rescaling an already normalized matrix must be a no-op, or T and -T drift apart
_DET_SLACK = 8 * 2.0 ** -52

Model = Literal["half-plane", "disc"]

_CAYLEY = np.array([[1.0, -1.0j], [1.0, 1.0j]])
_CAYLEY_INV = np.array([[1.0j, 1.0j], [-1.0, 1.0]]) / 2.0j


class UndefinedCircleError(ValueError):
    """Raised when an element has no isometric circle (it fixes the disc centre)."""


def cayley(z: complex) -> complex:
    """Map the upper half-plane to the unit disc."""
    return (z - 1j) / (z + 1j)


def inverse_cayley(w: complex) -> complex:
    """Map the unit disc to the upper half-plane."""
    return 1j * (1 + w) / (1 - w)


def _canonical(a: float, b: float, c: float, d: float) -> tuple[float, float, float, float]:
    det = a * d - b * c
    if not det > 0:
        raise ValueError(f"determinant must be positive, got {det!r}")
    if abs(det - 1.0) > _DET_SLACK:
        s = math.sqrt(det)
        a, b, c, d = a / s, b / s, c / s, d / s
    tr = a + d
    if tr < 0 or (tr == 0 and next(x for x in (a, b, c, d) if x != 0) < 0):
        a, b, c, d = -a, -b, -c, -d
    # avoid signed zeros so equal transforms compare and hash equal
    return a + 0.0, b + 0.0, c + 0.0, d + 0.0


@dataclass(frozen=True)
class IsometryClass:
    tag: Literal["identity", "elliptic", "parabolic", "hyperbolic"]
    translation_length: float = 0.0


@dataclass(frozen=True)
class MoebiusTransform:
    """A normalized element of PSL(2, R).

    The constructor normalizes to determinant one with a canonical sign
    (positive trace; for trace zero the first nonzero entry is positive), so
    ``T`` and ``-T`` build identical objects.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = _canonical(float(self.a), float(self.b), float(self.c), float(self.d))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_matrix(cls, m) -> MoebiusTransform:
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> MoebiusTransform:
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> float:
        return self.a + self.d

    def disc_matrix(self) -> np.ndarray:
        """The conjugate matrix acting on the unit disc, in SU(1, 1)."""
        return _CAYLEY @ self.matrix @ _CAYLEY_INV

    def __matmul__(self, other: MoebiusTransform) -> MoebiusTransform:
        return compose(self, other)

    def inverse(self) -> MoebiusTransform:
        return inverse(self)

    def isclose(self, other: MoebiusTransform, tol: float = 1e-10) -> bool:
        """Projective comparison: ``T`` matches both ``T`` and ``-T``."""
        m, n = self.matrix, other.matrix
        return bool(np.max(np.abs(m - n)) <= tol or np.max(np.abs(m + n)) <= tol)


def compose(g: MoebiusTransform, h: MoebiusTransform) -> MoebiusTransform:
    """Return ``g o h`` (apply ``h`` first)."""
    return MoebiusTransform(
        g.a * h.a + g.b * h.c,
        g.a * h.b + g.b * h.d,
        g.c * h.a + g.d * h.c,
        g.c * h.b + g.d * h.d,
    )


def inverse(g: MoebiusTransform) -> MoebiusTransform:
    return MoebiusTransform(g.d, -g.b, -g.c, g.a)


def conjugate(g: MoebiusTransform, h: MoebiusTransform) -> MoebiusTransform:
    """Return ``h g h^-1``."""
    return compose(compose(h, g), inverse(h))


def classify(g: MoebiusTransform, band: float = PARABOLIC_BAND) -> IsometryClass:
    if abs(g.a - 1) <= band and abs(g.d - 1) <= band and abs(g.b) <= band and abs(g.c) <= band:
        return IsometryClass("identity")
    excess = abs(g.trace) - 2.0
    if excess > band:
        return IsometryClass("hyperbolic", translation_length(g))
    if excess < -band:
        return IsometryClass("elliptic")
    return IsometryClass("parabolic")


def translation_length(g: MoebiusTransform) -> float:
    """Hyperbolic displacement along the axis, ``2 arccosh(|tr| / 2)``.

    Returns 0 for non-hyperbolic elements.
    """
    t = abs(g.trace) / 2.0
    return 2.0 * math.acosh(t) if t > 1.0 else 0.0


def apply(g: MoebiusTransform, z: complex, model: Model = "half-plane") -> complex:
    z = complex(z)
    if model == "half-plane":
        if not z.imag > 0:
            raise ValueError(f"{z} is not in the upper half-plane")
        a, b, c, d = g.a, g.b, g.c, g.d
    elif model == "disc":
        if not abs(z) < 1:
            raise ValueError(f"{z} is not in the open unit disc")
        (a, b), (c, d) = g.disc_matrix()
    else:
        raise ValueError(f"unknown model {model!r}")
    den = c * z + d
    if den == 0:
        raise ValueError(f"{z} is a pole of the transformation")
    return complex((a * z + b) / den)


def isometric_circle(g: MoebiusTransform, model: Model = "disc") -> tuple[complex, float]:
    """Centre and radius of the circle ``|c z + d| = 1`` of the disc-model matrix."""
    if model != "disc":
        raise ValueError("isometric circles are defined in the disc model only")
    (_, _), (c, d) = g.disc_matrix()
    if abs(c) < 1e-14:
        raise UndefinedCircleError("element fixes the disc centre; isometric circle undefined")
    return complex(-d / c), float(1.0 / abs(c))


def hyperbolic(length: float) -> MoebiusTransform:
    """Translation by ``length`` along the imaginary axis: ``z -> e^length z``."""
    if not length > 0:
        raise ValueError("translation length must be positive")
    s = math.exp(length / 2)
    return MoebiusTransform(s, 0.0, 0.0, 1.0 / s)


def rotation(angle: float, about: complex = 1j) -> MoebiusTransform:
    """Elliptic rotation by ``angle`` about the point ``about`` of the half-plane."""
    about = complex(about)
    if not about.imag > 0:
        raise ValueError(f"{about} is not in the upper half-plane")
    phi = angle / 2
    rot = MoebiusTransform(math.cos(phi), math.sin(phi), -math.sin(phi), math.cos(phi))
    y = math.sqrt(about.imag)
    move = MoebiusTransform(y, about.real / y, 0.0, 1.0 / y)
    return conjugate(rot, move)


def fixed_points(g: MoebiusTransform) -> tuple[float, float]:
    """Repelling and attracting fixed points on the real line of a hyperbolic element.

    ``inf`` stands for the point at infinity.
    """
    if abs(g.trace) <= 2 + PARABOLIC_BAND:
        raise ValueError("fixed points on the boundary are computed for hyperbolic elements only")
    vals, vecs = np.linalg.eig(g.matrix)
    order = np.argsort(np.abs(vals))
    pts = []
    for k in order:
        x, y = vecs[:, k].real
        pts.append(math.inf if y == 0 else x / y)
    return pts[0], pts[1]
