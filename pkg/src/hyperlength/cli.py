"""Command line front end.

Each run reads one YAML document (``--config``) and writes its data files
into ``--out``. Numbers in configs may be written as arithmetic
expressions over ``pi``, ``e`` and ``exp/log/sqrt/sin/cos/tan/atanh``,
e.g. ``radius: exp(-2*pi)``.

Exit status: 0 success, 2 configuration error, 3 precondition violation,
4 certification failure, 5 no convergence.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import sys
from pathlib import Path

import numpy as np
import yaml

from hyperlength import curves, deform, groups, metrics, spectrum
from hyperlength.groups import CertificationError
from hyperlength.moebius import MoebiusTransform, conjugate, hyperbolic, rotation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_CERTIFICATION = 4
EXIT_NONCONVERGENCE = 5


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class NonConvergence(RuntimeError):
    pass


# -- config access -----------------------------------------------------------

_FUNCS = {"exp": math.exp, "log": math.log, "sqrt": math.sqrt, "sin": math.sin,
          "cos": math.cos, "tan": math.tan, "atanh": math.atanh}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def _eval_expr(node):
    if isinstance(node, ast.Expression):
        return _eval_expr(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name) and node.id in _CONSTS:
        return _CONSTS[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_expr(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_expr(node.left), _eval_expr(node.right))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
        return _FUNCS[node.func.id](_eval_expr(node.args[0]))
    raise ValueError("unsupported expression")


def number(value, path: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(_eval_expr(ast.parse(value, mode="eval")))
        except (SyntaxError, ValueError, ZeroDivisionError, OverflowError) as exc:
            raise ConfigError(path, f"cannot evaluate {value!r}: {exc}") from None
    raise ConfigError(path, f"expected a number, got {value!r}")


class Section:
    """Dict view that reports missing or malformed fields by dotted path."""

    def __init__(self, data, path: str = ""):
        if not isinstance(data, dict):
            raise ConfigError(path or "<root>", "expected a mapping")
        self.data, self.path = data, path

    def _p(self, key):
        return f"{self.path}.{key}" if self.path else key

    def has(self, key):
        return key in self.data

    def raw(self, key, default=...):
        if key not in self.data:
            if default is ...:
                raise ConfigError(self._p(key), "missing required field")
            return default
        return self.data[key]

    def section(self, key, default=...):
        value = self.raw(key, default)
        return Section(value, self._p(key)) if value is not None else None

    def number(self, key, default=...):
        value = self.raw(key, default)
        return value if value is None else number(value, self._p(key))

    def integer(self, key, default=...):
        value = self.raw(key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(self._p(key), f"expected an integer, got {value!r}")
        return value

    def choice(self, key, options, default=...):
        value = self.raw(key, default)
        if value not in options:
            raise ConfigError(self._p(key), f"expected one of {list(options)}, got {value!r}")
        return value

    def points(self, key):
        value = self.raw(key)
        if not isinstance(value, list) or not value:
            raise ConfigError(self._p(key), "expected a nonempty list of [x, y] pairs")
        out = []
        for i, pt in enumerate(value):
            p = f"{self._p(key)}[{i}]"
            if not isinstance(pt, list) or len(pt) != 2:
                raise ConfigError(p, "expected an [x, y] pair")
            out.append(complex(number(pt[0], p + "[0]"), number(pt[1], p + "[1]")))
        return np.array(out)


def parse_surface(sec: Section) -> metrics.ModelSurface:
    kind = sec.choice("kind", metrics.KINDS)
    if kind == "annulus":
        inner = sec.number("inner")
        if not 0 < inner < 1:
            raise ConfigError(sec._p("inner"), f"annulus inner radius must lie in (0, 1), got {inner!r}")
        return metrics.Annulus(inner)
    return metrics.ModelSurface(kind)


def parse_curve(sec: Section):
    """Returns ``(vertices, closed)``."""
    kind = sec.choice("type", ("circle", "polyline", "segment"))
    if kind == "circle":
        radius = sec.number("radius")
        if not radius > 0:
            raise ConfigError(sec._p("radius"), "radius must be positive")
        n = sec.integer("vertices", 256)
        if n < curves.MIN_VERTICES:
            raise ConfigError(sec._p("vertices"), f"need at least {curves.MIN_VERTICES} vertices")
        center = complex(*[number(v, sec._p("center")) for v in sec.raw("center", [0, 0])])
        theta = 2 * math.pi * np.arange(n) / n
        if sec.raw("reverse", False):
            theta = -theta
        return center + radius * np.exp(1j * theta), True
    if kind == "segment":
        a, b = sec.points("endpoints")
        return np.array([a, b]), False
    return sec.points("points"), bool(sec.raw("closed", True))


def parse_generator(sec: Section) -> MoebiusTransform:
    if sec.has("matrix"):
        m = sec.raw("matrix")
        try:
            vals = [[number(x, sec._p(f"matrix[{i}][{j}]")) for j, x in enumerate(row)]
                    for i, row in enumerate(m)]
            return MoebiusTransform.from_matrix(vals)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(sec._p("matrix"), str(exc)) from None
    length = sec.number("length")
    if not length > 0:
        raise ConfigError(sec._p("length"), "translation length must be positive")
    angle = sec.number("angle", 0.0)
    return conjugate(hyperbolic(length), rotation(angle))


def parse_group(sec: Section) -> groups.SchottkyRepresentation:
    raw = sec.raw("generators")
    if not isinstance(raw, list) or not raw:
        raise ConfigError(sec._p("generators"), "expected a nonempty list")
    gens = [parse_generator(Section(g, f"{sec._p('generators')}[{i}]")) for i, g in enumerate(raw)]
    try:
        return groups.SchottkyRepresentation(gens)
    except ValueError as exc:
        raise ConfigError(sec._p("generators"), str(exc)) from None


def t_grid(sec: Section | None) -> list[float]:
    if sec is None:
        return list(np.linspace(0.0, 1.0, 101))
    start, stop = sec.number("start", 0.0), sec.number("stop", 1.0)
    num = sec.integer("num", 101)
    if not 0 <= start <= stop <= 1 or num < 2:
        raise ConfigError(sec.path, "need 0 <= start <= stop <= 1 and num >= 2")
    return list(np.linspace(start, stop, num))


# -- output ------------------------------------------------------------------

def _fmt(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _fmt(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_fmt(v) for v in value]
    return value


def write_report(report: dict, out: Path, stem: str, fmt: str) -> Path:
    report = _fmt(report)
    if fmt == "json":
        path = out / f"{stem}.json"
        path.write_text(json.dumps(report, indent=2) + "\n")
    else:
        path = out / f"{stem}.csv"
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for k, v in report.items():
            writer.writerow([k, json.dumps(v) if isinstance(v, (dict, list)) else v])
        path.write_text(buf.getvalue())
    return path


# -- commands ----------------------------------------------------------------

def cmd_length(cfg: Section, out: Path, fmt: str, seed: int) -> dict:
    surface = parse_surface(cfg.section("surface"))
    z, closed = parse_curve(cfg.section("curve"))
    order = cfg.integer("quadrature_order", 8)
    curve = curves.ClosedPolyline(z, surface) if closed else z
    value = metrics.curve_length(surface, curve, order)
    report = {"surface": str(surface), "length": value, "closed": closed,
              "vertices": len(z), "quadrature_order": order}
    if not surface.is_hyperbolic:
        report["note"] = "non-hyperbolic surface: the pseudometric vanishes identically"
    write_report(report, out, "length", fmt)
    print(f"{value:.12g}")
    return report


def cmd_shorten(cfg: Section, out: Path, fmt: str, seed: int) -> dict:
    surface = parse_surface(cfg.section("surface"))
    z, _ = parse_curve(cfg.section("curve"))
    opts = cfg.section("options", {})
    kwargs = {}
    for key in ("step_tolerance", "gradient_tolerance", "escape_clearance"):
        if opts.has(key):
            kwargs[key] = opts.number(key)
    for key in ("max_iterations", "n_vertices", "escape_window", "resample_every"):
        if opts.has(key):
            kwargs[key] = opts.integer(key)
    result = curves.shorten(curves.ClosedPolyline(z, surface), **kwargs)
    value, attained = (0.0, False) if result.status == "escaped_to_puncture" else (
        result.final_length, result.status == "converged")
    radii = np.abs(result.final_curve.vertices)
    report = {"surface": str(surface), "status": result.status, "stable_length": value,
              "attained": attained, "final_length": result.final_length,
              "iterations": result.iterations, "gradient_norm": result.gradient_norm,
              "winding_number": curves.winding_number(result.final_curve),
              "min_radius": float(radii.min()), "max_radius": float(radii.max())}
    write_report(report, out, "shorten", fmt)
    result.write_trace(out / "trace.csv")
    print(f"{result.status} {value:.12g}")
    if result.status == "max_iterations":
        raise NonConvergence(f"no convergence after {result.iterations} iterations")
    return report


def cmd_spectrum(cfg: Section, out: Path, fmt: str, seed: int) -> dict:
    rep = parse_group(cfg.section("group"))
    L = cfg.integer("max_word_length", 8)
    tol = cfg.number("tolerance", 1e-10)
    spec = groups.truncated_spectrum(rep, L, tol, seed=seed)
    path = out / f"spectrum.{fmt}"
    path.write_text(spec.to_json() if fmt == "json" else spec.to_csv())
    print(f"{len(spec)} classes, shortest {spec.entries[0][0]:.12g}")
    return spec.to_dict()


def cmd_deform(cfg: Section, out: Path, fmt: str, seed: int) -> dict:
    fam = cfg.section("family")
    grid = t_grid(cfg.section("t_grid", None))
    kind = fam.choice("type", ("representation", "annulus"))
    if kind == "annulus":
        log0 = fam.number("log_inner_start", -2 * math.pi ** 2)
        log1 = fam.number("log_inner_end", -4 * math.pi ** 2)
        if not (log0 < 0 and log1 < 0):
            raise ConfigError(fam.path, "log inner radii must be negative")
        family = deform.AnnulusFamily(lambda t: math.exp(log0 + (log1 - log0) * t))
        rows = deform.lambda_of_t(family, fam.integer("winding", 1), grid)
        deform.write_family_trace(rows, out / "trace.csv")
        report = {"family": "annulus", "rows": len(rows),
                  "lambda_start": rows[0][1], "lambda_end": rows[-1][1]}
        write_report(report, out, "deform", fmt)
        print(f"lambda {rows[0][1]:.12g} -> {rows[-1][1]:.12g}")
        return report

    raw = fam.raw("generators")
    if not isinstance(raw, list) or not raw:
        raise ConfigError(fam._p("generators"), "expected a nonempty list")
    axes, schedule = [], []
    for i, g in enumerate(raw):
        sec = Section(g, f"{fam._p('generators')}[{i}]")
        l0 = sec.number("length_start")
        l1 = sec.number("length_end", l0)
        if not (l0 > 0 and l1 > 0):
            raise ConfigError(sec.path, "translation lengths must be positive")
        axes.append(conjugate(hyperbolic(l0), rotation(sec.number("angle", 0.0))))
        schedule.append(lambda t, l0=l0, l1=l1: l0 + (l1 - l0) * t)
    path = deform.RepresentationPath(groups.SchottkyRepresentation(axes), schedule)
    word = groups.parse_word(fam.raw("word", "a"))
    L = cfg.integer("max_word_length", 4)
    rows = deform.lambda_of_t(path, word, grid)
    deform.write_family_trace(rows, out / "trace.csv")
    spectra = [groups.truncated_spectrum(deform.representation_path(path, t, seed=seed), L, seed=seed)
               for t in (grid[0], grid[-1])]
    comparison = spectrum.compare(*spectra, tolerance=cfg.number("tolerance", 1e-6))
    (out / "comparison.json").write_text(comparison.to_json())
    report = {"family": "representation", "word": groups.format_word(word), "rows": len(rows),
              "lambda_start": rows[0][1], "lambda_end": rows[-1][1],
              "verdict": comparison.verdict}
    write_report(report, out, "deform", fmt)
    print(comparison.verdict)
    return report


def cmd_certify(cfg: Section, out: Path, fmt: str, seed: int) -> dict:
    rep = parse_group(cfg.section("group"))
    cert = groups.ping_pong_certificate(rep, seed=seed)
    write_report(cert.to_dict(), out, "certificate", fmt)
    print(f"{'certified' if cert else 'not certified'}: {cert.report}")
    if not cert:
        raise CertificationError(cert.report)
    return cert.to_dict()


def _load_spectrum(value, path: str) -> groups.TruncatedLengthSpectrum:
    try:
        return groups.TruncatedLengthSpectrum.from_dict(json.loads(Path(value).read_text()))
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise ConfigError(path, f"cannot read spectrum file {value!r}: {exc}") from None


def cmd_compare(cfg: Section, out: Path, fmt: str, seed: int) -> dict:
    a = _load_spectrum(cfg.raw("a"), "a")
    b = _load_spectrum(cfg.raw("b"), "b")
    result = spectrum.compare(a, b, cfg.number("tolerance", 1e-6))
    write_report(result.to_dict(), out, "comparison", fmt)
    print(result.verdict)
    return result.to_dict()


COMMANDS = {
    "length": cmd_length,
    "shorten": cmd_shorten,
    "spectrum": cmd_spectrum,
    "deform": cmd_deform,
    "certify": cmd_certify,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperlength", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="YAML configuration document")
    parser.add_argument("--out", default=".", help="output directory (created if needed)")
    parser.add_argument("--format", choices=("csv", "json"), default="json")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for the random conjugation used in certificate preprocessing")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        try:
            data = yaml.safe_load(Path(args.config).read_text())
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError("<file>", str(exc)) from None
        cfg = Section(data if data is not None else {})
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, out, args.format, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CertificationError as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except NonConvergence as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (ValueError, TypeError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
