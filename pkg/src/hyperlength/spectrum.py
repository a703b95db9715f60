"""Comparing truncated length spectra and which model surfaces have trivial ones.

The comparison only ever separates: equal truncated spectra say nothing
about whether two structures agree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Literal

from hyperlength.groups import TruncatedLengthSpectrum
from hyperlength.metrics import ModelSurface

Verdict = Literal["distinct", "indistinguishable_at_truncation"]


class TruncationMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class SpectrumComparison:
    verdict: Verdict
    witness: tuple[int, float | None, float | None] | None
    tolerance: float

    @property
    def gap(self) -> float | None:
        if self.witness is None or None in self.witness[1:]:
            return None
        return abs(self.witness[1] - self.witness[2])

    def to_dict(self) -> dict:
        witness = None
        if self.witness is not None:
            i, a, b = self.witness
            witness = {
                "index": i,
                "length_a": None if a is None else float(f"{a:.12g}"),
                "length_b": None if b is None else float(f"{b:.12g}"),
            }
        return {"verdict": self.verdict, "witness": witness, "tolerance": self.tolerance}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def compare(a: TruncatedLengthSpectrum, b: TruncatedLengthSpectrum,
            tolerance: float = 1e-6) -> SpectrumComparison:
    """Entrywise comparison of the sorted length multisets.

    The witness is the first sorted index where the lengths differ by more
    than ``tolerance``; spectra of different sizes are distinct at the
    first missing index.
    """
    if a.max_word_length != b.max_word_length:
        raise TruncationMismatchError(
            f"truncations differ: {a.max_word_length} vs {b.max_word_length}")
    la, lb = list(a.lengths), list(b.lengths)
    for i, (x, y) in enumerate(zip(la, lb)):
        if abs(x - y) > tolerance:
            return SpectrumComparison("distinct", (i, float(x), float(y)), tolerance)
    if len(la) != len(lb):
        i = min(len(la), len(lb))
        return SpectrumComparison(
            "distinct",
            (i, float(la[i]) if i < len(la) else None, float(lb[i]) if i < len(lb) else None),
            tolerance)
    return SpectrumComparison("indistinguishable_at_truncation", None, tolerance)


def spectrum_kind(surface: ModelSurface) -> Literal["trivial", "zero_metric", "nontrivial"]:
    """``trivial`` when every simple closed curve shortens to length zero.

    The disc and the punctured disc are trivial (as is the thrice-punctured
    sphere, which has no model here); the plane and punctured plane carry
    the zero pseudometric; an annulus keeps its positive core length.
    """
    if surface.kind in ("disc", "punctured_disc"):
        return "trivial"
    if surface.kind in ("plane", "punctured_plane"):
        return "zero_metric"
    return "nontrivial"


def classify_trivial(surface: ModelSurface) -> bool:
    """Whether the length spectrum of ``surface`` is ``{0}``."""
    return spectrum_kind(surface) != "nontrivial"
