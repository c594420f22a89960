"""Command line front end.

Subcommands: ``compute`` (run a pipeline and write CSV reports),
``verify`` (run pipelines and compare against tolerances; nonzero exit on
failure), ``resolvent`` (shorthand for the recovery pipeline), ``gn-check``
(kernel moment table: closed forms vs quadrature) and ``models`` (list the
catalog).

Configuration is line-oriented ``key = value`` with dotted section prefixes
(grammar in the README); command line flags override file values.  Output
files are written atomically (write-then-rename) with a comment line
carrying the configuration hash, so identical configurations produce
byte-identical files.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 tolerance failure in verification mode.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .coefficients import CosphereQuadrature, second_weyl, weyl_coefficients
from .errors import ConfigError, WeylError
from .kernels import (
    expansion_b_coefficients,
    kernel_moment_closed,
    kernel_moment_numeric,
)
from .resolvent import b_profile, recover_second_weyl
from .torus import (
    assemble_and_solve,
    build_model,
    build_mollifier,
    catalog_names,
    fit_weyl,
    local_counting_mollified,
)

PIPELINES = ("direct", "resolvent", "spectral", "all", "gn-check")

_MODEL_PARAM_KEYS = ("beta", "b", "eps")


@dataclass
class RunConfig:
    """Validated run configuration with documented defaults."""

    model: str = "dirac"
    model_params: dict = field(default_factory=dict)
    pipeline: str = "direct"
    n_angles: int = 256
    fd_step: float = 1e-3
    angles: tuple = (math.pi / 4, 3 * math.pi / 4)
    limit_angles: tuple = (0.2, 0.1, 0.05)
    truncation: int = 24
    budget: int = 14000
    mollifier_support: float = 3.0
    mu_lo: float = 3.0
    mu_hi: float = 0.0  # 0 means 0.6 * K
    grid_step: float = 0.05
    x_points: tuple = ((0.0, 0.0), (math.pi / 4, 0.0))
    out_dir: str = "."
    cross_rel_tol: float = 1e-4
    b1_rel_tol: float = 1e-6
    fit_rel_tol: float = 0.15
    gn_orders: tuple = (2, 3, 4, 5)
    gn_angles: tuple = (
        math.pi / 6, math.pi / 3, math.pi / 2, 2 * math.pi / 3, 5 * math.pi / 6,
    )

    def resolved_mu_hi(self) -> float:
        return self.mu_hi if self.mu_hi > 0 else 0.6 * self.truncation

    def canonical_text(self) -> str:
        pairs = []
        for key in sorted(vars(self)):
            pairs.append(f"{key}={vars(self)[key]!r}")
        return "\n".join(pairs)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]


def _parse_scalar(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_angle_list(text: str) -> tuple:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if piece:
            out.append(float(piece))
    if not out:
        raise ConfigError("empty angle list")
    return tuple(out)


def _parse_points(text: str) -> tuple:
    pts = []
    for chunk in text.split(";"):
        chunk = chunk.strip().strip("()")
        if not chunk:
            continue
        coords = [float(c) for c in chunk.split(",")]
        if len(coords) != 2:
            raise ConfigError(f"point {chunk!r} must have two coordinates")
        pts.append(tuple(coords))
    if not pts:
        raise ConfigError("empty point list")
    return tuple(pts)


def parse_config_lines(lines) -> dict:
    """Parse the line-oriented ``key = value`` grammar into a flat dict."""
    out = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value.strip()
    return out


def apply_settings(cfg: RunConfig, settings: dict) -> RunConfig:
    """Apply flat dotted-key settings onto a config, validating keys."""
    for key, value in settings.items():
        if key == "model.name":
            cfg.model = str(value)
        elif key.startswith("model."):
            param = key.split(".", 1)[1]
            if param not in _MODEL_PARAM_KEYS:
                raise ConfigError(f"unknown model parameter {param!r}")
            cfg.model_params[param] = float(value)
        elif key == "pipeline":
            if value not in PIPELINES:
                raise ConfigError(
                    f"pipeline must be one of {', '.join(PIPELINES)}, got {value!r}"
                )
            cfg.pipeline = value
        elif key == "quadrature.n_angles":
            cfg.n_angles = int(value)
        elif key == "quadrature.fd_step":
            cfg.fd_step = float(value)
        elif key == "angles":
            cfg.angles = _parse_angle_list(value)
        elif key == "limit_angles":
            cfg.limit_angles = _parse_angle_list(value)
        elif key == "truncation.k":
            cfg.truncation = int(value)
        elif key == "truncation.budget":
            cfg.budget = int(value)
        elif key == "mollifier.support":
            cfg.mollifier_support = float(value)
        elif key == "fit.mu_lo":
            cfg.mu_lo = float(value)
        elif key == "fit.mu_hi":
            cfg.mu_hi = float(value)
        elif key == "fit.grid_step":
            cfg.grid_step = float(value)
        elif key == "x_points":
            cfg.x_points = _parse_points(value)
        elif key == "out":
            cfg.out_dir = str(value)
        elif key == "tolerance.cross_rel":
            cfg.cross_rel_tol = float(value)
        elif key == "tolerance.b1_rel":
            cfg.b1_rel_tol = float(value)
        elif key == "tolerance.fit_rel":
            cfg.fit_rel_tol = float(value)
        elif key == "gn.orders":
            cfg.gn_orders = tuple(int(v) for v in value.split(","))
        elif key == "gn.angles":
            cfg.gn_angles = _parse_angle_list(value)
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.model not in catalog_names():
        raise ConfigError(
            f"unknown model {cfg.model!r}; catalog: {', '.join(catalog_names())}"
        )
    for phi in (*cfg.angles, *cfg.limit_angles, *cfg.gn_angles):
        if not 0.0 < phi < math.pi:
            raise ConfigError(f"angle {phi} outside (0, pi)")
    if cfg.n_angles < 16 or cfg.n_angles % 2:
        raise ConfigError("quadrature.n_angles must be even and >= 16")
    if cfg.truncation < 8:
        raise ConfigError("truncation.k must be >= 8")
    if cfg.fd_step <= 0 or cfg.grid_step <= 0:
        raise ConfigError("steps must be positive")
    if not 0.0 < cfg.mollifier_support < 2 * math.pi:
        raise ConfigError("mollifier.support must lie in (0, 2 pi)")


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    value = float(value) + 0.0  # normalise -0.0
    return format(value, ".17g")


def write_csv(path: str, header: list, rows: list, cfg: RunConfig) -> None:
    """RFC-4180 style CSV with a leading comment line, written atomically."""
    lines = [f"# config_sha256={cfg.digest()} tool_version={__version__}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    body = "\n".join(lines) + "\n"
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-csv-")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(body)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _model_fields(cfg: RunConfig):
    model = build_model(cfg.model, cfg.model_params)
    lead, sub = model.symbol_fields()
    return model, lead, sub


def run_direct(cfg: RunConfig) -> list:
    """Direct pipeline; returns summary lines, writes weyl_coefficients.csv."""
    _, lead, sub = _model_fields(cfg)
    quad = CosphereQuadrature(n_angles=cfg.n_angles)
    rows = []
    summary = []
    for pt in cfg.x_points:
        x = np.asarray(pt, dtype=float)
        coeffs = weyl_coefficients(lead, sub, x, quad, cfg.fd_step)
        for sheet, terms in sorted(coeffs.breakdown.items()):
            rows.append(
                [
                    x[0], x[1], sheet,
                    coeffs.a_first_plus, coeffs.a_second_plus,
                    terms.term_sub, terms.term_bracket, terms.term_curvature,
                ]
            )
        summary.append(
            f"direct: x=({x[0]:.4f},{x[1]:.4f}) "
            f"a1+={coeffs.a_first_plus:.8f} a0+={coeffs.a_second_plus:+.8f}"
        )
    write_csv(
        os.path.join(cfg.out_dir, "weyl_coefficients.csv"),
        ["x1", "x2", "sheet", "a1_plus", "a0_plus",
         "term_sub", "term_bracket", "term_curv"],
        rows,
        cfg,
    )
    return summary


def run_resolvent(cfg: RunConfig) -> tuple:
    """Recovery pipeline; writes resolvent_recovery.csv.

    Returns (summary lines, per-point dict with recovered values and the
    direct comparison, max b1 deviation).
    """
    _, lead, sub = _model_fields(cfg)
    quad = CosphereQuadrature(n_angles=cfg.n_angles)
    rows = []
    summary = []
    comparisons = []
    max_b1_dev = 0.0
    for pt in cfg.x_points:
        x = np.asarray(pt, dtype=float)
        prof = b_profile(lead, sub, x, quad, cfg.fd_step)
        two = {phi: prof.b0(phi) for phi in cfg.angles[:2]}
        rec_two = recover_second_weyl(two, "two-angle")
        lim = {phi: prof.b0(phi) for phi in cfg.limit_angles}
        rec_lim = recover_second_weyl(lim, "limit")
        coeffs = weyl_coefficients(lead, sub, x, quad, cfg.fd_step)
        for phi in cfg.angles:
            b1_closed, _ = expansion_b_coefficients(
                coeffs.a_first_plus, coeffs.a_first_minus,
                coeffs.a_second_plus, coeffs.a_second_minus, 2, phi,
            )
            b1_val = prof.b1(phi)
            max_b1_dev = max(
                max_b1_dev, abs(b1_val - b1_closed) / max(abs(b1_closed), 1e-12)
            )
            rows.append([x[0], x[1], phi, b1_val, prof.b0(phi), rec_two, rec_lim])
        comparisons.append(
            {
                "x": x,
                "direct": coeffs.a_second_plus,
                "two_angle": rec_two,
                "limit": rec_lim,
            }
        )
        summary.append(
            f"resolvent: x=({x[0]:.4f},{x[1]:.4f}) "
            f"a0+(two-angle)={rec_two:+.8f} a0+(limit)={rec_lim:+.8f} "
            f"a0+(direct)={coeffs.a_second_plus:+.8f}"
        )
    write_csv(
        os.path.join(cfg.out_dir, "resolvent_recovery.csv"),
        ["x1", "x2", "phi", "b1", "b0",
         "a0_recovered_two_angle", "a0_recovered_limit"],
        rows,
        cfg,
    )
    return summary, comparisons, max_b1_dev


def run_spectral(cfg: RunConfig) -> tuple:
    """Ground-truth pipeline; writes spectral_fit.csv."""
    model, lead, sub = _model_fields(cfg)
    moll = build_mollifier(cfg.mollifier_support)
    spectrum = assemble_and_solve(model, cfg.truncation, cfg.budget)
    mu_hi = min(cfg.resolved_mu_hi(), spectrum.trusted_max)
    mu = np.arange(cfg.mu_lo, mu_hi + cfg.grid_step / 2, cfg.grid_step)
    rows = []
    summary = []
    fits = []
    for pt in cfg.x_points:
        x = np.asarray(pt, dtype=float)
        samples = local_counting_mollified(spectrum, moll, x, mu, "plus")
        fit = fit_weyl(samples, 2, (cfg.mu_lo, mu_hi), mollifier=moll)
        rows.append([x[0], x[1], cfg.truncation, fit.a_leading, fit.a_second,
                     fit.residual_rms])
        fits.append(fit)
        summary.append(
            f"spectral: x=({x[0]:.4f},{x[1]:.4f}) K={cfg.truncation} "
            f"a1_fit={fit.a_leading:.8f} a0_fit={fit.a_second:+.8f} "
            f"rms={fit.residual_rms:.2e}"
        )
    write_csv(
        os.path.join(cfg.out_dir, "spectral_fit.csv"),
        ["x1", "x2", "K", "a1_fit", "a0_fit", "residual"],
        rows,
        cfg,
    )
    return summary, fits


def run_gn_check(cfg: RunConfig) -> tuple:
    """Kernel moment table; writes gn_check.csv; returns (summary, max err)."""
    rows = []
    max_err = 0.0
    for n in cfg.gn_orders:
        for phi in cfg.gn_angles:
            z = complex(math.cos(phi), math.sin(phi))
            for power in (n, n - 1):
                closed = kernel_moment_closed(n, z, power)
                numeric = kernel_moment_numeric(n, z, power)
                err = abs(closed - numeric)
                max_err = max(max_err, err / max(abs(closed), 1e-12))
                rows.append([n, phi, closed, numeric, err])
    write_csv(
        os.path.join(cfg.out_dir, "gn_check.csv"),
        ["n", "phi", "closed", "numeric", "abs_err"],
        rows,
        cfg,
    )
    return [f"gn-check: {len(rows)} cases, max rel err {max_err:.2e}"], max_err


class ToleranceFailure(Exception):
    """Verification comparisons exceeded configured tolerances."""


def run_verify(cfg: RunConfig) -> list:
    """Cross-pipeline verification at configured tolerances."""
    summary, comparisons, max_b1_dev = run_resolvent(cfg)
    failures = []
    for comp in comparisons:
        scale = max(abs(comp["direct"]), 1e-12)
        for method in ("two_angle", "limit"):
            rel = abs(comp[method] - comp["direct"]) / scale
            if rel > cfg.cross_rel_tol:
                failures.append(
                    f"x=({comp['x'][0]:.4f},{comp['x'][1]:.4f}) {method} "
                    f"rel dev {rel:.2e} > {cfg.cross_rel_tol:.1e}"
                )
    if max_b1_dev > cfg.b1_rel_tol:
        failures.append(f"b1 rel dev {max_b1_dev:.2e} > {cfg.b1_rel_tol:.1e}")
    summary.append(
        f"verify: b1 max rel dev {max_b1_dev:.2e}; "
        f"{len(comparisons) * 2} recovery comparisons"
    )
    if failures:
        raise ToleranceFailure("; ".join(failures))
    summary.append("verify: PASS")
    return summary


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weylsys",
        description="Two-term local spectral asymptotics for first-order systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="path to a key = value configuration file")
        p.add_argument("--out", help="output directory for CSV reports")
        p.add_argument("--model", help="catalog model name")
        p.add_argument("--beta", type=float, help="shifted-dirac shift")
        p.add_argument("--b", type=float, help="mass-dirac mass")
        p.add_argument("--eps", type=float, help="twisted coupling strength")
        p.add_argument("--pipeline", choices=PIPELINES)
        p.add_argument("-k", "--truncation", type=int, help="Fourier truncation")
        p.add_argument(
            "--set", action="append", default=[], metavar="KEY=VALUE",
            help="override any configuration key",
        )

    for name, doc in (
        ("compute", "run a pipeline and write CSV reports"),
        ("verify", "run cross-pipeline checks; exit 3 on tolerance failure"),
        ("resolvent", "recovery pipeline only"),
        ("gn-check", "kernel moment table: closed forms vs quadrature"),
    ):
        p = sub.add_parser(name, help=doc)
        common(p)
    sub.add_parser("models", help="list the model catalog")
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    settings: dict = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                settings.update(parse_config_lines(handle))
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
    if args.model:
        settings["model.name"] = args.model
    for key in ("beta", "b", "eps"):
        val = getattr(args, key, None)
        if val is not None:
            settings[f"model.{key}"] = str(val)
    if args.pipeline:
        settings["pipeline"] = args.pipeline
    if args.truncation is not None:
        settings["truncation.k"] = str(args.truncation)
    if args.out:
        settings["out"] = args.out
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        settings[key.strip()] = value.strip()
    return apply_settings(cfg, settings)


def main(argv=None) -> int:
    if "THREADS" in os.environ:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, os.environ["THREADS"])
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "models":
        for name in catalog_names():
            print(name)
        return 0
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    try:
        summary: list = []
        if args.command == "verify":
            summary.extend(run_verify(cfg))
        elif args.command == "resolvent":
            lines, _, _ = run_resolvent(cfg)
            summary.extend(lines)
        elif args.command == "gn-check":
            lines, _ = run_gn_check(cfg)
            summary.extend(lines)
        else:  # compute
            pipeline = cfg.pipeline
            if pipeline in ("direct", "all"):
                summary.extend(run_direct(cfg))
            if pipeline in ("resolvent", "all"):
                lines, _, _ = run_resolvent(cfg)
                summary.extend(lines)
            if pipeline in ("spectral", "all"):
                lines, _ = run_spectral(cfg)
                summary.extend(lines)
            if pipeline == "gn-check":
                lines, _ = run_gn_check(cfg)
                summary.extend(lines)
    except ToleranceFailure as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except WeylError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(f"weylsys {__version__} | model={cfg.model} {cfg.model_params} "
          f"| config {cfg.digest()}")
    for line in summary:
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
