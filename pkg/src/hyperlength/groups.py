"""Schottky groups in PSL(2, R): ping-pong certificates and length spectra.

Words in the free group on ``k`` generators are tuples of nonzero integers,
``i`` for the generator ``x_i`` and ``-i`` for its inverse. As strings they
are written with ``a, b, c, ...`` for generators and capitals for inverses.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
import string
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import product

import mpmath
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from hyperlength._validation import check_int, check_positive
from hyperlength.metrics import Annulus, ModelSurface
from hyperlength.moebius import (
    MoebiusTransform,
    UndefinedCircleError,
    classify,
    conjugate,
    hyperbolic,
    inverse,
    isometric_circle,
    rotation,
)

DISJOINT_MARGIN = 1e-9
PAIRING_TOL = 1e-9
EXTENDED_PRECISION_ABOVE = 12


class CertificationError(RuntimeError):
    """The ping-pong certificate failed or a word evaluated to a non-hyperbolic element."""


# -- words -------------------------------------------------------------------

def letter_key(letter: int) -> int:
    """Order ``x1 < x1^-1 < x2 < x2^-1 < ...``."""
    return 2 * (abs(letter) - 1) + (letter < 0)


def invert_word(word: Sequence[int]) -> tuple[int, ...]:
    return tuple(-x for x in reversed(word))


def is_cyclically_reduced(word: Sequence[int]) -> bool:
    n = len(word)
    return n > 0 and all(word[i] != -word[(i + 1) % n] for i in range(n))


def canonical_form(word: Sequence[int]) -> tuple[int, ...]:
    """Least rotation of the word or of its inverse under :func:`letter_key`."""
    word = tuple(word)
    best = None
    for w in (word, invert_word(word)):
        for i in range(len(w)):
            rot = w[i:] + w[:i]
            key = tuple(letter_key(x) for x in rot)
            if best is None or key < best[0]:
                best = (key, rot)
    return best[1]


def format_word(word: Sequence[int]) -> str:
    if any(abs(x) > 26 for x in word):
        return ".".join(f"x{abs(x)}" + ("^-1" if x < 0 else "") for x in word)
    return "".join(string.ascii_lowercase[x - 1] if x > 0 else string.ascii_uppercase[-x - 1]
                   for x in word)


def parse_word(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        raise ValueError("empty word")
    if text.startswith("x"):
        out = []
        for part in text.split("."):
            inv = part.endswith("^-1")
            out.append(-int(part[1:-3]) if inv else int(part[1:]))
        return tuple(out)
    out = []
    for ch in text:
        if ch in string.ascii_lowercase:
            out.append(string.ascii_lowercase.index(ch) + 1)
        elif ch in string.ascii_uppercase:
            out.append(-(string.ascii_uppercase.index(ch) + 1))
        else:
            raise ValueError(f"bad letter {ch!r} in word {text!r}")
    return tuple(out)


@dataclass(frozen=True, order=False)
class ConjugacyClassWord:
    """A conjugacy class of the free group, held by its canonical representative."""

    letters: tuple[int, ...]

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        if 0 in letters:
            raise ValueError("0 is not a letter")
        if not is_cyclically_reduced(letters):
            raise ValueError(f"{letters} is not cyclically reduced")
        object.__setattr__(self, "letters", canonical_form(letters))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return format_word(self.letters)

    @property
    def sort_key(self):
        return len(self.letters), tuple(letter_key(x) for x in self.letters)

    @classmethod
    def parse(cls, text: str) -> ConjugacyClassWord:
        return cls(parse_word(text))


def enumerate_conjugacy_classes(k: int, max_word_length: int) -> list[ConjugacyClassWord]:
    """One canonical word per conjugacy class, lengths ``1..max_word_length``.

    Orbits are taken under rotation and inversion; the output is ordered by
    length, then lexicographically.
    """
    k = check_int(k, "k")
    max_word_length = check_int(max_word_length, "max_word_length")
    letters = sorted([i for i in range(1, k + 1)] + [-i for i in range(1, k + 1)], key=letter_key)
    out = []

    def extend(prefix: list[int], n: int):
        if len(prefix) == n:
            w = tuple(prefix)
            if (n == 1 or w[0] != -w[-1]) and canonical_form(w) == w:
                out.append(ConjugacyClassWord(w))
            return
        for x in letters:
            if prefix and x == -prefix[-1]:
                continue
            # a canonical word starts with its least letter
            if prefix and letter_key(x) < letter_key(prefix[0]):
                continue
            prefix.append(x)
            extend(prefix, n)
            prefix.pop()

    for n in range(1, max_word_length + 1):
        extend([], n)
    return out


def brute_force_class_count(k: int, n: int) -> int:
    """Count conjugacy classes of cyclically reduced words of length ``n`` by orbit search."""
    letters = [i for i in range(1, k + 1)] + [-i for i in range(1, k + 1)]
    seen = set()
    for w in product(letters, repeat=n):
        if not is_cyclically_reduced(w):
            continue
        orbit = frozenset(r[i:] + r[:i] for r in (w, invert_word(w)) for i in range(n))
        seen.add(orbit)
    return len(seen)


# -- representations ---------------------------------------------------------

Disc = tuple[complex, float]


@dataclass
class SchottkyRepresentation:
    """Generators of a (candidate) Schottky group, with optional ping-pong discs.

    ``discs`` lists ``2k`` disc-model discs ``(centre, radius)`` ordered
    ``D1-, D1+, D2-, D2+, ...``; ``g_i`` should carry the exterior of
    ``Di-`` onto the interior of ``Di+``.
    """

    generators: list[MoebiusTransform]
    discs: list[Disc] | None = None

    def __post_init__(self):
        self.generators = list(self.generators)
        if not self.generators:
            raise ValueError("need at least one generator")
        for i, g in enumerate(self.generators, 1):
            if not isinstance(g, MoebiusTransform):
                raise TypeError(f"generator {i} is not a MoebiusTransform")
            if classify(g).tag != "hyperbolic":
                raise ValueError(f"generator {i} is not hyperbolic (trace {g.trace:.12g})")
        if self.discs is not None:
            self.discs = [(complex(c), float(r)) for c, r in self.discs]
            if len(self.discs) != 2 * len(self.generators):
                raise ValueError("need exactly two discs per generator")

    @property
    def k(self) -> int:
        return len(self.generators)

    def conjugated(self, h: MoebiusTransform) -> SchottkyRepresentation:
        return SchottkyRepresentation([conjugate(g, h) for g in self.generators])

    def inverted(self) -> SchottkyRepresentation:
        return SchottkyRepresentation([inverse(g) for g in self.generators])

    def element(self, letter: int) -> MoebiusTransform:
        g = self.generators[abs(letter) - 1]
        return g if letter > 0 else inverse(g)


def isometric_discs(rep: SchottkyRepresentation) -> list[Disc]:
    """Discs bounded by the isometric circles of each generator and its inverse."""
    discs = []
    for g in rep.generators:
        discs.append(isometric_circle(g))
        discs.append(isometric_circle(inverse(g)))
    return discs


@dataclass
class PingPongCertificate:
    valid: bool
    discs: list[Disc]
    report: str
    witness: tuple | None = None
    conjugator: MoebiusTransform | None = None

    def __bool__(self):
        return self.valid

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "report": self.report,
            "witness": None if self.witness is None else list(self.witness),
            "discs": [{"center": [_g(c.real), _g(c.imag)], "radius": _g(r)} for c, r in self.discs],
        }


def _g(x: float) -> float:
    return float(f"{x:.12g}")


def _disc_image(g: MoebiusTransform, z: np.ndarray) -> np.ndarray:
    (a, b), (c, d) = g.disc_matrix()
    return (a * z + b) / (c * z + d)


def ping_pong_certificate(rep: SchottkyRepresentation, samples: int = 64,
                          seed: int | None = 0) -> PingPongCertificate:
    """Check the ping-pong configuration that makes ``rep`` free and discrete.

    Without explicit discs the isometric circles are used; if one is
    undefined the whole representation is first conjugated by a random
    elliptic element drawn from ``seed``.
    """
    samples = max(int(samples), 64)
    conjugator = None
    discs = rep.discs
    if discs is None:
        try:
            discs = isometric_discs(rep)
        except UndefinedCircleError:
            rng = random.Random(seed)
            for _ in range(16):
                about = complex(rng.uniform(-1, 1), rng.uniform(0.5, 2))
                h = rotation(rng.uniform(0.1, math.pi - 0.1), about)
                try:
                    discs = isometric_discs(rep.conjugated(h))
                except UndefinedCircleError:
                    continue
                conjugator = h
                rep = rep.conjugated(h)
                break
            else:
                raise CertificationError("cannot derive ping-pong discs from isometric circles")

    labels = [f"{s}{i}" for i in range(1, rep.k + 1) for s in ("D-", "D+")]
    for i in range(len(discs)):
        for j in range(i + 1, len(discs)):
            (ci, ri), (cj, rj) = discs[i], discs[j]
            gap = abs(ci - cj) - (ri + rj)
            if not gap > DISJOINT_MARGIN:
                return PingPongCertificate(
                    False, discs, f"discs {labels[i]} and {labels[j]} overlap (gap {gap:.3e})",
                    (labels[i], labels[j], gap), conjugator)

    theta = 2 * math.pi * np.arange(samples) / samples
    for i, g in enumerate(rep.generators):
        (cm, rm), (cp, rp) = discs[2 * i], discs[2 * i + 1]
        image = _disc_image(g, cm + rm * np.exp(1j * theta))
        err = float(np.max(np.abs(np.abs(image - cp) - rp)))
        if not err <= PAIRING_TOL * max(1.0, rp):
            return PingPongCertificate(
                False, discs, f"generator {i + 1} does not map the boundary of D-{i + 1} "
                f"onto D+{i + 1} (error {err:.3e})", (f"D-{i + 1}", f"D+{i + 1}", err), conjugator)
        (a, _), (c, _) = g.disc_matrix()
        # infinity lies outside D-, so its image a/c must land inside D+
        if c == 0 or not abs(a / c - cp) < rp:
            return PingPongCertificate(
                False, discs, f"generator {i + 1} does not carry the exterior of D-{i + 1} "
                f"into D+{i + 1}", (f"D-{i + 1}", f"D+{i + 1}", math.nan), conjugator)
    return PingPongCertificate(True, discs, "ping-pong discs verified", None, conjugator)


# -- spectra -----------------------------------------------------------------

def evaluate_word(rep: SchottkyRepresentation, word: Sequence[int]) -> np.ndarray:
    """Matrix product of the letters, left to right.

    Long words are multiplied in 40-digit arithmetic before rounding back.
    """
    if len(word) > EXTENDED_PRECISION_ABOVE:
        with mpmath.workdps(40):
            m = mpmath.eye(2)
            for x in word:
                m = m * mpmath.matrix(rep.element(x).matrix.tolist())
            return np.array(m.tolist(), dtype=float)
    m = np.eye(2)
    for x in word:
        m = m @ rep.element(x).matrix
    return m


def word_trace(rep: SchottkyRepresentation, word: Sequence[int]) -> float:
    if len(word) > EXTENDED_PRECISION_ABOVE:
        with mpmath.workdps(40):
            m = mpmath.eye(2)
            for x in word:
                m = m * mpmath.matrix(rep.element(x).matrix.tolist())
            return float(m[0, 0] + m[1, 1])
    return float(np.trace(evaluate_word(rep, word)))


def word_length(rep: SchottkyRepresentation, word: Sequence[int]) -> float:
    """Translation length ``2 arccosh(|tr| / 2)``; ``nan`` for non-hyperbolic words."""
    t = abs(word_trace(rep, word)) / 2.0
    return 2.0 * math.acosh(t) if t > 1.0 else math.nan


@dataclass
class TruncatedLengthSpectrum:
    """Translation lengths of all conjugacy classes up to a word length, sorted."""

    entries: list[tuple[float, ConjugacyClassWord]]
    max_word_length: int
    tolerance: float = 1e-10
    k: int = 1

    @property
    def lengths(self) -> np.ndarray:
        return np.array([length for length, _ in self.entries])

    def __len__(self):
        return len(self.entries)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "max_word_length": self.max_word_length,
            "tolerance": self.tolerance,
            "entries": [{"word": str(w), "length": _g(v)} for v, w in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["word", "length"])
        for v, w in self.entries:
            writer.writerow([str(w), f"{v:.12g}"])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, data: dict) -> TruncatedLengthSpectrum:
        entries = [(float(e["length"]), ConjugacyClassWord.parse(e["word"])) for e in data["entries"]]
        return cls(entries, int(data["max_word_length"]), float(data["tolerance"]), int(data["k"]))


def truncated_spectrum(rep: SchottkyRepresentation, max_word_length: int = 8,
                       tolerance: float = 1e-10, certificate: PingPongCertificate | None = None,
                       seed: int | None = 0) -> TruncatedLengthSpectrum:
    """Translation-length spectrum of every class of word length ``<= max_word_length``.

    Raises :class:`CertificationError` when ``rep`` is not ping-pong certified
    or when some word evaluates to an elliptic or parabolic element.
    """
    max_word_length = check_int(max_word_length, "max_word_length")
    certificate = certificate if certificate is not None else ping_pong_certificate(rep, seed=seed)
    if not certificate:
        raise CertificationError(f"representation not certified: {certificate.report}")
    entries, bad = [], []
    for word in enumerate_conjugacy_classes(rep.k, max_word_length):
        length = word_length(rep, word.letters)
        if math.isnan(length):
            bad.append(str(word))
        else:
            entries.append((length, word))
    if bad:
        raise CertificationError(f"non-hyperbolic words in a certified group: {', '.join(bad[:10])}")
    entries.sort(key=lambda e: (e[0], e[1].sort_key))
    return TruncatedLengthSpectrum(entries, max_word_length, tolerance, rep.k)


def annulus_from_cyclic(length: float) -> ModelSurface:
    """Annulus ``A(r, 1)`` conformal to the half-plane modulo ``z -> e^length z``."""
    length = check_positive(length, "length")
    return Annulus(math.exp(-2.0 * math.pi ** 2 / length))


def perpendicular_pair(length_1: float, length_2: float | None = None) -> SchottkyRepresentation:
    """Two translations whose axes cross perpendicularly at ``i``."""
    length_2 = length_1 if length_2 is None else length_2
    a = hyperbolic(length_1)
    b = conjugate(hyperbolic(length_2), rotation(math.pi / 2))
    return SchottkyRepresentation([a, b])


class LengthSpectrum(TransformerMixin, BaseEstimator):
    """Fit on a list of generators; transform words into translation lengths.

    After ``fit``: ``certificate_`` holds the ping-pong certificate and
    ``spectrum_`` the truncated spectrum at ``max_word_length``.
    """

    def __init__(self, max_word_length=8, tolerance=1e-10, seed=0):
        self.max_word_length = max_word_length
        self.tolerance = tolerance
        self.seed = seed

    def fit(self, X, y=None):
        rep = X if isinstance(X, SchottkyRepresentation) else SchottkyRepresentation(list(X))
        self.representation_ = rep
        self.certificate_ = ping_pong_certificate(rep, seed=self.seed)
        self.spectrum_ = truncated_spectrum(rep, self.max_word_length, self.tolerance,
                                            certificate=self.certificate_)
        self.n_features_in_ = rep.k
        return self

    def transform(self, X: Iterable):
        check_is_fitted(self, "representation_")
        words = [w.letters if isinstance(w, ConjugacyClassWord)
                 else parse_word(w) if isinstance(w, str) else tuple(w) for w in X]
        return np.array([[word_length(self.representation_, w)] for w in words])
