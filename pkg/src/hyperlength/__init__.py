"""Hyperbolic lengths, length spectra and deformation families on Riemann surfaces."""

from hyperlength.curves import (
    ClosedPolyline,
    CurveShortener,
    shorten,
    stable_length,
    winding_number,
)
from hyperlength.groups import (
    ConjugacyClassWord,
    LengthSpectrum,
    SchottkyRepresentation,
    TruncatedLengthSpectrum,
    annulus_from_cyclic,
    enumerate_conjugacy_classes,
    ping_pong_certificate,
    truncated_spectrum,
)
from hyperlength.metrics import (
    Annulus,
    Disc,
    ModelSurface,
    Plane,
    PuncturedDisc,
    PuncturedPlane,
    curve_length,
    density,
)
from hyperlength.moebius import MoebiusTransform, classify
from hyperlength.spectrum import classify_trivial, compare

__all__ = [
    "Annulus",
    "ClosedPolyline",
    "ConjugacyClassWord",
    "CurveShortener",
    "Disc",
    "LengthSpectrum",
    "ModelSurface",
    "MoebiusTransform",
    "Plane",
    "PuncturedDisc",
    "PuncturedPlane",
    "SchottkyRepresentation",
    "TruncatedLengthSpectrum",
    "annulus_from_cyclic",
    "classify",
    "classify_trivial",
    "compare",
    "curve_length",
    "density",
    "enumerate_conjugacy_classes",
    "ping_pong_certificate",
    "shorten",
    "stable_length",
    "truncated_spectrum",
    "winding_number",
]
