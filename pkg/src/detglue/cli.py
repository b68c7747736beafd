"""Command-line front end: config parsing, dispatch, report serialization.

Commands
--------
det      zeta-regularized log-determinant of a model geometry
glue     closed/Dirichlet/DtN determinants and the gluing constant log c
asymfit  large-shift expansion fit of logDet(A + lambda); reports pi_0
symbols  parametrix symbol checks (homogeneity, closure, J_k(0), pi_0)
heat     heat-trace expansion fit and the Mellin cross-check
verify   derivative/trace/power identities behind the gluing formula

Configuration comes from flags or a flat ``key = value`` UTF-8 text file
(``#`` comments); flags override file values.  Unknown keys are rejected.
Reports are emitted as JSON envelopes and/or CSV; identical configuration
and package version produce byte-identical files (timestamps honor
SOURCE_DATE_EPOCH).  Exit codes: 0 success, 2 configuration, 3 domain,
4 continuation, 5 fit, 6 branch, 7 I/O.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .asymfit import fit_expansion, pi0, sample_family, sequence_family
from .errors import ConfigError, DetglueError, EmitError
from .geometry import (BoundaryConditionKind, Circle, Interval, TorusCut,
                       circle_eigenvalues, interval_eigenvalues)
from .gluing import (closed_log_det, extract_c_from_pi0, glue, verify_eq41,
                     verify_lemma41, verify_power_identity,
                     verify_triangular_identity)
from .symbols import (J_k_value, check_homogeneity,
                      constant_coefficient_closure, circle_operator_symbols,
                      parametrix_terms, pi0_symbolic, rotated_control_symbols)
from .zeta import fit_heat_expansion, mellin_zeta

COMMANDS = ("det", "glue", "asymfit", "symbols", "heat", "verify")
FORMATS = ("json", "csv", "both")
OUTPUT_DIR_ENV = "DETGLUE_OUTPUT_DIR"

# key -> (type constructor, default); the single source of config truth
_SCHEMA = {
    "geometry": (str, "circle"),
    "L": (float, 1.0),
    "m": (float, 1.0),
    "bc": (str, "dirichlet"),
    "L1": (float, 1.0),
    "L2": (float, 2 * math.pi),
    "k_max": (int, 256),
    "d": (int, 1),
    "t": (float, 0.0),
    "b": (float, 1.0),
    "shift": (float, 0.0),
    "grid_min": (float, 100.0),
    "grid_max": (float, 10000.0),
    "grid_points": (int, 48),
    "s": (float, 3.0),
    "format": (str, "json"),
    "output": (str, "report"),
    "outdir": (str, ""),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for key, raw in self.values.items():
            if key not in _SCHEMA:
                raise ConfigError(f"unknown configuration key {key!r}")
        for key in ("k_max", "d", "grid_points"):
            if self[key] <= 0:
                raise ConfigError(f"{key} must be positive, got {self[key]}")
        if self["format"] not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, "
                              f"got {self['format']!r}")
        if self["geometry"] not in ("circle", "interval", "torus"):
            raise ConfigError(f"unknown geometry {self['geometry']!r}")

    def __getitem__(self, key):
        if key not in _SCHEMA:
            raise ConfigError(f"unknown configuration key {key!r}")
        if key in self.values:
            return self.values[key]
        return _SCHEMA[key][1]

    def echo(self) -> dict:
        out = {"command": self.command}
        for key in _SCHEMA:
            out[key] = self[key]
        return out


@dataclass(frozen=True)
class ReportEnvelope:
    config: dict
    version: str
    timestamp: str
    payload: dict
    error_estimates: dict

    def as_dict(self) -> dict:
        return {
            "artifact": "detglue-report",
            "version": self.version,
            "timestamp": self.timestamp,
            "config": self.config,
            "payload": self.payload,
            "error_estimates": self.error_estimates,
        }


def _coerce(key: str, raw: str):
    if key not in _SCHEMA:
        raise ConfigError(f"unknown configuration key {key!r}")
    ctor = _SCHEMA[key][0]
    try:
        return ctor(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from exc


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                stripped = line.split("#", 1)[0].strip()
                if not stripped:
                    continue
                if "=" not in stripped:
                    raise ConfigError(
                        f"{path}:{lineno}: expected 'key = value', got {line!r}")
                key, _, raw = stripped.partition("=")
                key = key.strip()
                values[key] = _coerce(key, raw.strip())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detglue",
        description="zeta-regularized determinants and the gluing constant "
                    "on separable model geometries")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat key = value config file")
    for key, (ctor, default) in _SCHEMA.items():
        flag = "--" + key.replace("_", "-")
        parser.add_argument(flag, dest=key, type=str, default=None,
                            help=f"{key} (default {default!r})")
    return parser


def parse_config(argv) -> RunConfig:
    """Flags plus optional config file; flags override file values."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        raise ConfigError("invalid command-line arguments") from exc
    values = {}
    if ns.config:
        values.update(_read_config_file(ns.config))
    for key in _SCHEMA:
        raw = getattr(ns, key)
        if raw is not None:
            values[key] = _coerce(key, raw)
    return RunConfig(ns.command, values)


def _geometry(config: RunConfig):
    kind = config["geometry"]
    if kind == "circle":
        return Circle(config["L"], config["m"])
    if kind == "interval":
        return Interval(config["L"], config["m"],
                        BoundaryConditionKind(config["bc"]))
    return TorusCut(config["L1"], config["L2"], config["m"])


def _spectrum(config: RunConfig):
    kind = config["geometry"]
    if kind == "circle":
        return circle_eigenvalues(config["L"], config["m"])
    if kind == "interval":
        return interval_eigenvalues(config["L"], config["m"],
                                    BoundaryConditionKind(config["bc"]))
    raise ConfigError(f"command needs a 1D spectrum; geometry {kind!r} "
                      "is not supported here")


def _grid(config: RunConfig):
    lo, hi, n = config["grid_min"], config["grid_max"], config["grid_points"]
    if not (0 < lo < hi):
        raise ConfigError("need 0 < grid_min < grid_max")
    ratio = (hi / lo) ** (1.0 / (n - 1)) if n > 1 else 1.0
    return [lo * ratio ** i for i in range(n)]


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------

def _run_det(config: RunConfig):
    geom = _geometry(config)
    if isinstance(geom, Interval):
        from .zeta import log_det
        ld = log_det(interval_eigenvalues(geom.L, geom.m, geom.bc),
                     shift=config["shift"])
    else:
        ld = closed_log_det(geom, z=config["shift"], k_max=config["k_max"])
    payload = {"logdet": float(ld.value.real)}
    errors = {"logdet": float(ld.error_estimate)}
    return payload, errors, None


def _run_glue(config: RunConfig):
    geom = _geometry(config)
    if isinstance(geom, Interval):
        raise ConfigError("glue needs a closed geometry (circle or torus)")
    report = glue(geom, k_max=config["k_max"], t=config["t"])
    payload = {
        "log_det_closed": report.log_det_closed,
        "log_det_dirichlet": report.log_det_dirichlet,
        "log_det_R": report.log_det_R,
        "log_c": report.log_c,
        "residual": report.residual,
    }
    errors = {k: float(v) for k, v in report.error_estimates.items()}
    rows = [("quantity", "value", "error")]
    for key in ("log_det_closed", "log_det_dirichlet", "log_det_R", "log_c"):
        rows.append((key, payload[key], errors.get(key, report.residual)))
    return payload, errors, {"rows": rows}


def _run_asymfit(config: RunConfig):
    seq = _spectrum(config)
    chi = 2.0
    family = sequence_family(seq, chi=chi, d=config["d"])
    grid = _grid(config)
    samples = sample_family(family, grid)
    # a basis reaching well past the Weyl terms keeps pi_0 unbiased
    expansion = fit_expansion(samples, chi, config["d"],
                              j_range=list(range(-config["d"], 6)))
    p0, p0err = pi0(expansion)
    payload = {
        "chi": chi,
        "pi": {str(j): v for j, v in sorted(expansion.pi.items())},
        "q": {str(j): v for j, v in sorted(expansion.q.items())},
        "pi0": p0,
        "residual": expansion.residual,
        "condition_number": expansion.condition_number,
    }
    errors = {"pi0": p0err, "residual": expansion.residual}
    series = [("lambda", "logdet", "model", "residual")]
    for lam, val, _ in samples:
        model = sum(c * lam ** (-j / chi) for j, c in expansion.pi.items())
        model += sum(c * lam ** (j / chi) * math.log(lam)
                     for j, c in expansion.q.items())
        series.append((lam, val, model, val - model))
    return payload, errors, {"series": series}


def _run_symbols(config: RunConfig):
    op = circle_operator_symbols(config["m"])
    control = rotated_control_symbols(config["b"])
    terms = parametrix_terms(op, 4)
    taus = (2, Fraction(3, 2), 5)
    homogeneity = all(check_homogeneity(r, tau) for r in terms for tau in taus)
    jk = {}
    jk_err = {}
    for k in (2, 3, 4):
        v, e = J_k_value(op, k, 0.0)
        jk[str(k)] = abs(v)
        jk_err[str(k)] = e
    rep = pi0_symbolic(op, volume=config["L"])
    rep_ctrl = pi0_symbolic(control, volume=config["L"])
    payload = {
        "homogeneity_exact": homogeneity,
        "r_minus3_zero": terms[1].is_zero(),
        "closure_exact": constant_coefficient_closure(op, 4),
        "J_k_at_zero": jk,
        "pi0_model": rep.value,
        "pi0_control": rep_ctrl.value,
        "pi0_control_expected": config["L"] * config["b"] / 2.0,
        "terms": [t.canonical_text() for t in terms],
    }
    errors = {"J_k_at_zero": jk_err, "pi0_model": rep.error_estimate,
              "pi0_control": rep_ctrl.error_estimate}
    return payload, errors, None


def _run_heat(config: RunConfig):
    seq = _spectrum(config)
    t_grid = [0.0002 * 1.25 ** i for i in range(24)]
    exponents = [Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1),
                 Fraction(3, 2), Fraction(2)]
    expansion = fit_heat_expansion(seq, t_grid, exponents)
    s = config["s"]
    mellin_value, mellin_err = mellin_zeta(seq, s, expansion)
    from .zeta import zeta_at
    direct = zeta_at(seq, s)
    # the Mellin transform of theta gives Gamma(s) zeta(s)
    reference = float(math.gamma(s) * direct.value_at.real)
    payload = {
        "coefficients": {str(e): float(c.real)
                         for e, c in expansion.terms},
        "mellin_s": s,
        "mellin_value": float(mellin_value.real),
        "gamma_times_zeta_direct": reference,
        "mellin_discrepancy": float(abs(mellin_value - reference)),
    }
    errors = {"fit_residual": expansion.residual, "mellin": mellin_err}
    series = [("t", "theta", "model", "residual")]
    from .zeta import heat_trace
    for t in t_grid:
        theta = float(heat_trace(seq, t).real)
        model = float(expansion.evaluate(t).real)
        series.append((t, theta, model, theta - model))
    return payload, errors, {"series": series}


def _run_verify(config: RunConfig):
    geom = _geometry(config)
    if isinstance(geom, Interval):
        raise ConfigError("verify needs a closed geometry (circle or torus)")
    d = config["d"]
    t_grid = (0.5, 1.0, 2.0, 5.0)
    trace = verify_eq41(geom, d, t_grid, k_max=config["k_max"])
    payload = {
        "eq41_c_mean": trace.c_mean,
        "eq41_max_deviation": trace.max_deviation,
        "t_grid": list(trace.t_grid),
    }
    errors = {"eq41": trace.max_deviation}
    if isinstance(geom, Circle):
        seq = circle_eigenvalues(geom.L, geom.m)
        for dd in (2, 3):
            rep = verify_power_identity(seq, dd)
            payload[f"power_identity_d{dd}"] = rep.abs_error
        lem = verify_lemma41(geom, 1, max(config["t"], 1.0), 1e-3,
                             k_max=config["k_max"])
        payload["lemma41_rel_error"] = lem.rel_error
        c_fit, c_bar, _ = extract_c_from_pi0(geom, 1, k_max=config["k_max"])
        direct = glue(geom, k_max=config["k_max"]).log_c
        payload["log_c_from_pi0"] = c_fit
        payload["log_c_direct"] = direct
        errors["log_c_from_pi0"] = c_bar
    else:
        tri = verify_triangular_identity(geom, 2, max(config["t"], 1.0),
                                         k_max=config["k_max"])
        payload["triangular_abs_error"] = tri.abs_error
    return payload, errors, None


_RUNNERS = {
    "det": _run_det,
    "glue": _run_glue,
    "asymfit": _run_asymfit,
    "symbols": _run_symbols,
    "heat": _run_heat,
    "verify": _run_verify,
}


def run(config: RunConfig) -> tuple[ReportEnvelope, dict | None]:
    """Dispatch a validated config; returns (envelope, csv extras)."""
    payload, errors, extras = _RUNNERS[config.command](config)
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    stamp = datetime.datetime.fromtimestamp(
        epoch, tz=datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    envelope = ReportEnvelope(config.echo(), __version__, stamp, payload, errors)
    return envelope, extras


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit(envelope: ReportEnvelope, extras, fmt: str, base_path: str) -> list[str]:
    """Write the report; returns the list of files written."""
    written = []
    try:
        if fmt in ("json", "both"):
            path = base_path + ".json"
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(envelope.as_dict(), fh, indent=2)
                fh.write("\n")
            written.append(path)
        if fmt in ("csv", "both"):
            path = base_path + ".csv"
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                if extras and "rows" in extras:
                    for row in extras["rows"]:
                        writer.writerow([_csv_cell(c) for c in row])
                else:
                    writer.writerow(["quantity", "value", "error"])
                    for key, value in envelope.payload.items():
                        if isinstance(value, (int, float)) \
                                and not isinstance(value, bool):
                            err = envelope.error_estimates.get(key, "")
                            writer.writerow([key, _csv_cell(float(value)),
                                             _csv_cell(err)])
            written.append(path)
        if extras and "series" in extras:
            path = base_path + "_series.csv"
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                for row in extras["series"]:
                    writer.writerow([_csv_cell(c) for c in row])
            written.append(path)
    except OSError as exc:
        raise EmitError(f"cannot write report near {base_path}: {exc}") from exc
    return written


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv)
        envelope, extras = run(config)
        outdir = config["outdir"] or os.environ.get(OUTPUT_DIR_ENV, "")
        base = os.path.join(outdir, config["output"]) if outdir \
            else config["output"]
        written = emit(envelope, extras, config["format"], base)
    except DetglueError as exc:
        print(f"detglue: error: {exc}", file=sys.stderr)
        return exc.exit_code
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
