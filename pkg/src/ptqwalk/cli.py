"""Command-line interface: ``ptqwalk <subcommand> [options]``.

Every run writes its data files plus one ``manifest.json`` into ``--out``.
Failures print ``{"error": {...}}`` to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .errors import ConfigError, WalkError
from .evolution import auto_size, classify_growth, distribution_moments, init_state, run
from .momentum import exceptional_gamma, experiment_dispersion, scan_bz
from .operators import FRAMES, HomogeneousParams, WalkConfig
from .presets import EXPERIMENT_GAMMA0, EXPERIMENT_PHI0, experiment_config, four_region_config
from .spectral import closure_distance, eigenvalues, quasienergies, unimodularity
from .symmetry import (
    SymmetryKind,
    check_bloch_symmetry,
    check_position_pcs,
    check_position_pt,
    check_table_conditions,
    find_modified_phs_shift,
    verify_dense_symmetry,
)

__all__ = ["RunManifest", "parse_config", "load_config", "dispatch", "main", "SUBCOMMANDS"]

SUBCOMMANDS = ("dispersion", "evolve", "spectrum", "check-symmetry", "exceptional-point")
MANIFEST = "manifest.json"
DEFAULT_RING = 64
DENSE_LIMIT = 1024

EXIT_CONFIG = 2
EXIT_COMPUTE = 1

_NUM = {"type": "number"}
_ROWS = {"type": "array", "minItems": 2, "maxItems": 2,
         "items": {"type": "array", "minItems": 4, "items": _NUM}}
_POS_ROWS = {"type": "array", "minItems": 2, "maxItems": 2,
             "items": {"type": "array", "minItems": 4, "items": {"type": "number", "exclusiveMinimum": 0}}}
_RING = {"type": "integer", "minimum": 4, "multipleOf": 2}

_EXPERIMENT_KEYS = {"N": {"type": "integer", "minimum": 4, "multipleOf": 4}, "gamma0": _NUM, "phi0": _NUM}
_FOUR_REGION_KEYS = {"L": {"type": "integer", "minimum": 4, "multipleOf": 2}}


def _preset_object(extra):
    branches = []
    for name, keys in (("experiment", _EXPERIMENT_KEYS), ("four-region", _FOUR_REGION_KEYS)):
        branches.append({
            "type": "object",
            "properties": {"name": {"const": name}, **keys, **extra},
            "required": ["name"],
            "additionalProperties": False,
        })
    return {"type": "object", "required": ["name"],
            "properties": {"name": {"enum": ["experiment", "four-region"]}},
            "oneOf": branches}


_INITIAL = {
    "type": "object",
    "properties": {
        "site": {"type": "integer"},
        "spinor": {"type": "array", "minItems": 2, "maxItems": 2,
                   "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _NUM}},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "homogeneous": {
            "type": "object",
            "properties": {"theta1": _NUM, "theta2": _NUM, "gamma": _NUM, "phi": _NUM, "N": _RING},
            "required": ["theta1", "theta2"],
            "additionalProperties": False,
        },
        "preset": {"oneOf": [{"enum": ["experiment", "four-region"]}, _preset_object({})]},
        "explicit": {
            "type": "object",
            "properties": {"N": _RING, "theta": _ROWS, "gainL": _POS_ROWS, "gainR": _POS_ROWS,
                           "phiL": _ROWS, "phiR": _ROWS},
            "required": ["N", "theta", "gainL", "gainR", "phiL", "phiR"],
            "additionalProperties": False,
        },
        "initial": _INITIAL,
        # flat preset overrides, e.g. {"preset": "experiment", "gamma0": 0.1}
        "N": {"type": "integer"},
        "L": {"type": "integer"},
        "gamma0": _NUM,
        "phi0": _NUM,
    },
    "additionalProperties": False,
}


def _json_path(parts) -> str:
    path = "$"
    for p in parts:
        path += f"[{p}]" if isinstance(p, int) else f".{p}"
    return path


def _validate(doc):
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    forms = [k for k in ("homogeneous", "preset", "explicit") if k in doc]
    if len(forms) != 1:
        raise ConfigError("exactly one of 'homogeneous', 'preset' or 'explicit' is required")
    flat = [k for k in ("N", "L", "gamma0", "phi0") if k in doc]
    if flat and forms[0] != "preset":
        raise ConfigError(f"{flat[0]!r} is only allowed next to 'preset'", f"$.{flat[0]}")
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    error = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if error is not None:
        raise ConfigError(error.message, _json_path(error.absolute_path))


@dataclass
class ParsedConfig:
    """A validated configuration plus the fully resolved parameters for the manifest."""

    params: HomogeneousParams | None
    config: WalkConfig | None
    resolved: dict
    preset: str | None = None
    ring: int | None = None
    initial: tuple[int, tuple[complex, complex]] = (0, (0j, 1 + 0j))

    def walk(self, n_sites: int | None = None) -> WalkConfig:
        if self.config is not None:
            return self.config
        return WalkConfig.homogeneous(self.params, n_sites or self.ring or DEFAULT_RING)


def _resolve_preset(doc):
    entry = doc["preset"]
    where = "$.preset"
    if isinstance(entry, str):
        where = "$"
        entry = {"name": entry, **{k: doc[k] for k in ("N", "L", "gamma0", "phi0") if k in doc}}
    elif any(k in doc for k in ("N", "L", "gamma0", "phi0")):
        raise ConfigError("overrides belong inside the preset object", "$")
    name = entry["name"]
    if name == "experiment":
        extra = set(entry) - {"name", "N", "gamma0", "phi0"}
        if extra:
            raise ConfigError(f"unknown experiment override {sorted(extra)[0]!r}", where)
        resolved = {"name": name, "N": entry.get("N", DEFAULT_RING),
                    "gamma0": entry.get("gamma0", EXPERIMENT_GAMMA0), "phi0": entry.get("phi0", EXPERIMENT_PHI0)}
        if resolved["N"] < 4 or resolved["N"] % 4:
            raise ConfigError("N must be a positive multiple of 4", f"{where}.N")
        cfg = experiment_config(resolved["N"], resolved["gamma0"], resolved["phi0"])
    else:
        extra = set(entry) - {"name", "L"}
        if extra:
            raise ConfigError(f"unknown four-region override {sorted(extra)[0]!r}", where)
        resolved = {"name": name, "L": entry.get("L", 128)}
        if resolved["L"] < 4 or resolved["L"] % 2:
            raise ConfigError("L must be an even integer >= 4", f"{where}.L")
        cfg = four_region_config(resolved["L"])
    return cfg, resolved


def parse_config(text: str | dict) -> ParsedConfig:
    """Validate a JSON configuration document and build the walk it describes.

    Raises
    ------
    ConfigError
        On malformed JSON, schema violations or inconsistent values; ``path``
        locates the offending node.
    """
    if isinstance(text, str):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from None
    else:
        doc = text
    _validate(doc)
    initial = (0, (0j, 1 + 0j))
    if "initial" in doc:
        ini = doc["initial"]
        spinor = ini.get("spinor", [[0, 0], [1, 0]])
        initial = (ini.get("site", 0), tuple(complex(re, im) for re, im in spinor))
    if "homogeneous" in doc:
        h = doc["homogeneous"]
        try:
            p = HomogeneousParams(h["theta1"], h["theta2"], h.get("gamma", 0.0), h.get("phi", 0.0))
        except WalkError as exc:
            raise ConfigError(str(exc), "$.homogeneous") from None
        resolved = {"homogeneous": {"theta1": p.theta1, "theta2": p.theta2, "gamma": p.gamma, "phi": p.phi}}
        if "N" in h:
            resolved["homogeneous"]["N"] = h["N"]
        return ParsedConfig(p, None, resolved, ring=h.get("N"), initial=initial)
    if "preset" in doc:
        cfg, resolved = _resolve_preset(doc)
        return ParsedConfig(None, cfg, {"preset": resolved}, preset=resolved["name"], initial=initial)
    e = doc["explicit"]
    n = e["N"]
    for key in ("theta", "gainL", "gainR", "phiL", "phiR"):
        for i, row in enumerate(e[key]):
            if len(row) != n:
                raise ConfigError(f"expected {n} sites, got {len(row)}", f"$.explicit.{key}[{i}]")
    try:
        cfg = WalkConfig(n, theta=e["theta"], gain_l=e["gainL"], gain_r=e["gainR"],
                         phi_l=e["phiL"], phi_r=e["phiR"])
    except WalkError as exc:
        raise ConfigError(str(exc), "$.explicit") from None
    return ParsedConfig(None, cfg, {"explicit": e}, initial=initial)


def load_config(path: str | None, preset: str | None) -> ParsedConfig:
    if path is not None and preset is not None:
        raise ConfigError("give either --config or --preset, not both")
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}") from None
        return parse_config(text)
    if preset is not None:
        return parse_config({"preset": preset})
    raise ConfigError("a configuration is required (--config or --preset)")


@dataclass
class RunManifest:
    """Everything needed to reproduce one run."""

    subcommand: str
    config_path: str | None
    preset: str | None
    options: dict
    out_dir: str
    resolved: dict = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    version: str = __version__
    duration_s: float = 0.0

    def to_dict(self):
        return {
            "tool": "ptqwalk",
            "version": self.version,
            "subcommand": self.subcommand,
            "config_path": self.config_path,
            "preset": self.preset,
            "options": self.options,
            "resolved": self.resolved,
            "outputs": sorted(self.outputs),
            "duration_s": self.duration_s,
        }


# Serialization.

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0:
        x = 0.0  # drop the sign of negative zero
    return format(x, ".17g")


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _write_json(path: Path, obj):
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


# Subcommands.

def _require_homogeneous(pc: ParsedConfig, what: str) -> HomogeneousParams:
    if pc.params is not None:
        return pc.params
    try:
        return pc.config.to_homogeneous()
    except WalkError:
        raise ConfigError(f"{what} needs a homogeneous configuration") from None


def _cmd_dispersion(pc, m, out: Path):
    if pc.preset == "experiment":
        r = pc.resolved["preset"]
        grid = -math.pi + 2 * math.pi * (np.arange(m.options["grid"]) + 1) / m.options["grid"]
        header = ["k"] + [f"{part}_eps{j}" for j in range(1, 5) for part in ("re", "im")]
        rows = []
        for k in grid:
            eps = experiment_dispersion(float(k), r["gamma0"], r["phi0"])
            rows.append([k] + [v for e in eps for v in (e.real, e.imag)])
    else:
        p = _require_homogeneous(pc, "dispersion")
        scan = scan_bz(p, m.options["grid"])
        header = ["k", "re_eps_plus", "im_eps_plus", "re_eps_minus", "im_eps_minus", "eta", "xi_real_flag"]
        rows = [[pt.k, pt.eps_plus.real, pt.eps_plus.imag, pt.eps_minus.real, pt.eps_minus.imag,
                 pt.eta, pt.xi_real] for pt in scan.points]
    _write_csv(out / "dispersion.csv", header, rows)
    return ["dispersion.csv"]


def _cmd_evolve(pc, m, out: Path):
    steps = m.options["steps"]
    if pc.params is not None and pc.ring is None:
        n_sites = auto_size(steps)
    else:
        n_sites = None
    c = pc.walk(n_sites)
    site, spinor = pc.initial
    record = run(c, init_state(site, spinor, c.n_sites), steps, allow_wrap=m.options["allow_wrap"])
    m.resolved["N"] = c.n_sites
    _write_csv(out / "evolve_total.csv", ["t", "P"], enumerate(record.totals))
    sites = c.sites
    _write_csv(out / "evolve_distribution.csv", ["t"] + [f"n{n}" for n in sites],
               ([t] + list(row) for t, row in enumerate(record.distributions)))
    mean, var, kurt = distribution_moments(record.final)
    summary = {"steps": steps, "N": c.n_sites, "P_final": record.totals[-1],
               "max_abs_P_minus_1": float(np.max(np.abs(record.totals - 1))),
               "mean": mean, "variance": var, "excess_kurtosis": kurt}
    if len(record.totals) >= 50:
        summary["growth"] = classify_growth(record.totals).value
    _write_json(out / "evolve_summary.json", summary)
    return ["evolve_total.csv", "evolve_distribution.csv", "evolve_summary.json"]


def _cmd_spectrum(pc, m, out: Path):
    c = pc.walk()
    if c.n_sites > DENSE_LIMIT:
        raise ConfigError(f"dense spectrum limited to N <= {DENSE_LIMIT}, got {c.n_sites}")
    tol = m.options["tol"] if m.options["tol"] is not None else 1e-6
    s = eigenvalues(c, m.options["frame"], tol)
    eps = quasienergies(s)
    rows = [[lam.real, lam.imag, abs(lam) - 1, e.real, e.imag] for lam, e in zip(s.eigenvalues, eps)]
    _write_csv(out / "spectrum.csv", ["re_lambda", "im_lambda", "abs_lambda_minus_1", "re_eps", "im_eps"], rows)
    unimodular, dev = unimodularity(s, tol)
    _write_json(out / "spectrum_summary.json", {
        "N": c.n_sites, "count": len(s), "frame": s.frame, "tol": tol,
        "max_abs_lambda_minus_1": dev, "unimodular": unimodular, "entirely_real": s.entirely_real,
        "conjugation_closure_distance": closure_distance(s.eigenvalues),
        "max_sampled_residual": float(np.max(s.residuals)),
    })
    return ["spectrum.csv", "spectrum_summary.json"]


def _cmd_check_symmetry(pc, m, out: Path):
    tol = m.options["tol"] if m.options["tol"] is not None else 1e-9
    report = {}
    if pc.params is not None:
        p = pc.params
        grid = -math.pi + 2 * math.pi * (np.arange(m.options["grid"]) + 1) / m.options["grid"]
        for kind in SymmetryKind:
            entry = check_bloch_symmetry(p, kind, grid, tol).to_dict()
            if kind is not SymmetryKind.MODIFIED_PCS and kind is not SymmetryKind.MODIFIED_PHS:
                entry["table"] = check_table_conditions(p, kind, tol).conditions
            report[kind.label] = entry
        report["level"] = "bloch"
    else:
        c = pc.config
        dense = c.n_sites <= DENSE_LIMIT
        for rep in (check_position_pt(c), check_position_pcs(c), find_modified_phs_shift(c)):
            entry = rep.to_dict()
            if dense:
                entry["dense_residual"] = verify_dense_symmetry(c, rep.kind, rep.witness)
            report[rep.kind.label] = entry
        if dense:
            report["PHS"] = {"r": 0, "dense_residual": verify_dense_symmetry(c, SymmetryKind.PHS, 0)}
        report["level"] = "position"
    _write_json(out / "symmetry.json", report)
    return ["symmetry.json"]


def _cmd_exceptional_point(pc, m, out: Path):
    p = _require_homogeneous(pc, "exceptional-point")
    eg = exceptional_gamma(p.theta1, p.theta2)
    _write_json(out / "exceptional_point.json",
                {"theta1": p.theta1, "theta2": p.theta2, "exp_gamma_star": eg, "gamma_star": math.log(eg)})
    return ["exceptional_point.json"]


_COMMANDS = {
    "dispersion": _cmd_dispersion,
    "evolve": _cmd_evolve,
    "spectrum": _cmd_spectrum,
    "check-symmetry": _cmd_check_symmetry,
    "exceptional-point": _cmd_exceptional_point,
}


def dispatch(m: RunManifest, pc: ParsedConfig | None = None) -> int:
    """Run the subcommand of ``m``, write its outputs and the manifest; return the exit code."""
    start = time.perf_counter()
    try:
        if pc is None:
            pc = load_config(m.config_path, m.preset)
        m.resolved = dict(pc.resolved)
        out = Path(m.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        m.outputs = _COMMANDS[m.subcommand](pc, m, out)
        m.duration_s = time.perf_counter() - start
        _write_json(out / MANIFEST, m.to_dict())
    except ConfigError as exc:
        return _fail(exc, EXIT_CONFIG, path=exc.path, message=exc.detail)
    except WalkError as exc:
        return _fail(exc, EXIT_COMPUTE)
    except OSError as exc:
        return _fail(exc, EXIT_COMPUTE, message=f"{exc.strerror}: {exc.filename}")
    return 0


def _fail(exc, code, path=None, message=None) -> int:
    err = {"type": type(exc).__name__, "message": message or str(exc), "exit_code": code}
    if path is not None:
        err["path"] = path
    print(json.dumps({"error": err}, sort_keys=True), file=sys.stderr)
    return code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message, "argv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ptqwalk", description="Gain-loss quantum walk toolkit.")
    parser.add_argument("--version", action="version", version=f"ptqwalk {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="path of a JSON configuration")
        sp.add_argument("--preset", choices=["experiment", "four-region"], help="built-in configuration")
        sp.add_argument("--out", default="out", help="output directory (default: out)")
        sp.add_argument("--grid", type=int, default=None, help="number of k points")
        sp.add_argument("--steps", type=int, default=200, help="time steps for evolve")
        sp.add_argument("--frame", choices=FRAMES, default="original")
        sp.add_argument("--tol", type=float, default=None, help="tolerance for reports")
        if name == "evolve":
            sp.add_argument("--allow-wrap", action="store_true",
                            help="let amplitude wrap around a finite ring")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        return _fail(exc, EXIT_CONFIG, path=exc.path, message=exc.detail)
    grid = args.grid if args.grid is not None else (401 if args.subcommand == "dispersion" else 64)
    if grid < 2 or args.steps < 0 or (args.tol is not None and not args.tol > 0):
        return _fail(ConfigError("need --grid >= 2, --steps >= 0 and --tol > 0", "argv"), EXIT_CONFIG,
                     path="argv", message="need --grid >= 2, --steps >= 0 and --tol > 0")
    m = RunManifest(
        subcommand=args.subcommand,
        config_path=args.config,
        preset=args.preset,
        options={"grid": grid, "steps": args.steps, "frame": args.frame, "tol": args.tol,
                 "allow_wrap": getattr(args, "allow_wrap", False)},
        out_dir=args.out,
    )
    return dispatch(m)


if __name__ == "__main__":
    sys.exit(main())
