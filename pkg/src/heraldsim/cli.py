"""Command-line interface: config parsing, run management, deterministic output.

Subcommands
-----------
herald       write pulse + herald, entanglement metrics
herald-scan  concurrence and heralding rate on a herald-time grid
interference write / herald / readout delay sweep, fringe and visibility
temp-sweep   negativity and visibility versus bath temperature
validate     fast invariant and oracle checks, exit 0 on success

Configuration is a flat sections-of-key=value text file (JSON also
accepted); all frequencies take GHz/MHz/kHz/Hz suffixes, times are ns.
Identical configs produce byte-identical result files (except the
generated_at stamp), independent of the worker count.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, SimulationError
from .protocol import (
    DEFAULT_CUTOFFS,
    DEFAULT_HERALD_TIME_NS,
    DEFAULT_TEMPERATURES_K,
    DEFAULT_WRITE_CENTER_NS,
    PULSE_SIGMA_NS,
    READ_AMPLITUDE_KAPPA,
    WRITE_AMPLITUDE_KAPPA,
    ProtocolConfig,
    default_config,
    run_interference,
    run_temperature_sweep,
    run_write_herald,
    scan_herald_time,
)
from .runner import worker_count
from .system import SystemParams, default_params

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_SIMULATION = 4

_FREQ_UNITS = {"ghz": 1.0, "mhz": 1e-3, "khz": 1e-6, "hz": 1e-9}

_PARAM_FIELDS = {
    "J_c": "J_c", "kappa_plus": "kappa_plus", "kappa_minus": "kappa_minus",
    "Omega_1": "Omega_1", "Omega_2": "Omega_2", "g": "g", "gamma": "gamma",
    "J_m": "J_m",
}


def parse_quantity(text: str, field_name: str, line: int | None = None) -> float:
    """Parse '<number> [unit]' where unit is a frequency suffix, ns, or K."""
    parts = str(text).strip().split()
    if len(parts) not in (1, 2):
        raise ConfigError(f"cannot parse quantity {text!r}", field_name, line)
    try:
        value = float(parts[0])
    except ValueError:
        raise ConfigError(f"cannot parse number in {text!r}", field_name, line) from None
    if len(parts) == 1:
        return value
    unit = parts[1].lower()
    if unit in _FREQ_UNITS:
        return value * _FREQ_UNITS[unit]
    if unit in ("ns", "k"):
        return value
    raise ConfigError(f"unknown unit {parts[1]!r}", field_name, line)


def _parse_bool(text: str, field_name: str, line: int | None = None) -> bool:
    val = str(text).strip().lower()
    if val in ("1", "true", "on", "yes"):
        return True
    if val in ("0", "false", "off", "no"):
        return False
    raise ConfigError(f"cannot parse boolean {text!r}", field_name, line)


@dataclass
class RunConfig:
    """Protocol configuration plus run management."""

    protocol: ProtocolConfig
    out_dir: str = "."
    formats: tuple = ("json", "csv")
    workers: int | None = None
    seed: int | None = None            # reserved; the pipeline is deterministic
    convergence_check: str = "auto"    # auto | on | off
    herald_scan_grid: tuple | None = None
    raw: dict = field(default_factory=dict)

    def resolved_workers(self) -> int:
        return worker_count(self.workers)


# (section, key) -> handler collecting into the staging dicts
_KNOWN_KEYS = {
    ("params", k) for k in list(_PARAM_FIELDS) + ["temperature", "include_mechanical_splitting"]
} | {
    ("write", k) for k in ("center", "sigma", "amplitude", "detuning", "phase")
} | {
    ("read", k) for k in ("amplitude", "detuning")
} | {
    ("protocol", k) for k in (
        "herald_time", "herald_cavity", "delays", "readout_offset", "cutoffs",
        "dt", "temperatures", "displacement_pad", "thermal_tail_tol",
        "sample_spacing", "branch_buffer_sigmas", "allow_early_herald",
        "allow_detuning_override", "herald_scan_grid",
    )
} | {
    ("run", k) for k in ("out_dir", "formats", "workers", "seed", "convergence_check")
}


def _read_key_value(path: str) -> dict:
    """Parse flat sectioned key = value text with line diagnostics."""
    out: dict = {}
    section = ""
    with open(path) as fh:
        for ln, rawline in enumerate(fh, start=1):
            line = rawline.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip().lower()
                continue
            if "=" not in line:
                raise ConfigError("expected 'key = value'", line=ln)
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not key:
                raise ConfigError("empty key", line=ln)
            out[(section, key)] = (value, ln)
    return out


def _read_json(path: str) -> dict:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"JSON parse error: {exc}", line=exc.lineno) from None
    out = {}
    for section, body in doc.items():
        if not isinstance(body, dict):
            raise ConfigError("top-level JSON values must be objects", field=section)
        for key, value in body.items():
            out[(str(section).lower(), str(key))] = (value, None)
    return out


def _parse_delays(value, line) -> tuple:
    """START:SPAN:COUNT (relative to the minimal valid delay) or a comma list."""
    text = str(value).strip()
    if ":" in text:
        bits = text.split(":")
        if len(bits) != 3:
            raise ConfigError("delays spec must be START:SPAN:COUNT", "delays", line)
        start, span, count = float(bits[0]), float(bits[1]), int(bits[2])
        if count < 2 or span <= 0:
            raise ConfigError("delays need COUNT >= 2 and SPAN > 0", "delays", line)
        return ("relative", start, span, count)
    vals = tuple(float(x) for x in text.split(","))
    return ("absolute",) + vals


def parse_config(path: str) -> RunConfig:
    """Load and validate a run configuration (key=value text or JSON)."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        head = fh.read(1)
    table = _read_json(path) if head == "{" else _read_key_value(path)

    unknown = [k for k in table if k not in _KNOWN_KEYS]
    if unknown:
        sec, key = unknown[0]
        raise ConfigError(f"unknown key '{key}' in section [{sec}]",
                          field=key, line=table[unknown[0]][1])

    def take(section, key, default=None):
        if (section, key) in table:
            return table.pop((section, key))
        return (default, None)

    pkw = {}
    for key, attr in _PARAM_FIELDS.items():
        value, ln = take("params", key)
        if value is not None:
            q = parse_quantity(value, key, ln)
            if q <= 0:
                raise ConfigError(f"{key} must be strictly positive", key, ln)
            pkw[attr] = q
    value, ln = take("params", "temperature")
    if value is not None:
        t = parse_quantity(value, "temperature", ln)
        if t < 0:
            raise ConfigError("temperature must be >= 0", "temperature", ln)
        pkw["temperature"] = t
    value, ln = take("params", "include_mechanical_splitting")
    if value is not None:
        pkw["include_mechanical_splitting"] = _parse_bool(value, "include_mechanical_splitting", ln)
    try:
        params = SystemParams(**{**default_params().__dict__, **pkw}) if pkw else default_params()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    overrides = {}
    value, ln = take("write", "center")
    if value is not None:
        overrides["write_center"] = parse_quantity(value, "center", ln)
    value, ln = take("write", "sigma")
    if value is not None:
        q = parse_quantity(value, "sigma", ln)
        if q <= 0:
            raise ConfigError("sigma must be > 0", "sigma", ln)
        overrides["pulse_sigma"] = q
    value, ln = take("write", "amplitude")
    if value is not None:
        q = float(parse_quantity(value, "amplitude", ln))
        if q < 0:
            raise ConfigError("amplitude must be >= 0", "amplitude", ln)
        overrides["write_amplitude_kappa"] = q
    value, ln = take("write", "phase")
    if value is not None:
        overrides["write_phase"] = parse_quantity(value, "phase", ln)
    value, ln = take("read", "amplitude")
    if value is not None:
        q = float(parse_quantity(value, "amplitude", ln))
        if q < 0:
            raise ConfigError("amplitude must be >= 0", "amplitude", ln)
        overrides["read_amplitude_kappa"] = q

    proto_kw = {}
    value, ln = take("protocol", "herald_time")
    if value is not None:
        proto_kw["herald_time"] = parse_quantity(value, "herald_time", ln)
    value, ln = take("protocol", "herald_cavity")
    if value is not None:
        proto_kw["herald_cavity"] = int(value)
    value, ln = take("protocol", "readout_offset")
    if value is not None and str(value).strip().lower() != "auto":
        proto_kw["readout_offset"] = parse_quantity(value, "readout_offset", ln)
    value, ln = take("protocol", "cutoffs")
    if value is not None:
        cuts = tuple(int(x) for x in str(value).split(","))
        if len(cuts) != 4 or any(c < 2 for c in cuts):
            raise ConfigError("cutoffs must be four integers >= 2", "cutoffs", ln)
        proto_kw["cutoffs"] = cuts
    value, ln = take("protocol", "dt")
    if value is not None:
        proto_kw["dt"] = parse_quantity(value, "dt", ln)
    value, ln = take("protocol", "temperatures")
    if value is not None:
        proto_kw["temperatures"] = tuple(float(x) for x in str(value).split(","))
    for key in ("displacement_pad",):
        value, ln = take("protocol", key)
        if value is not None:
            proto_kw[key] = int(value)
    for key in ("thermal_tail_tol", "sample_spacing", "branch_buffer_sigmas"):
        value, ln = take("protocol", key)
        if value is not None:
            proto_kw[key] = float(parse_quantity(value, key, ln))
    for key in ("allow_early_herald", "allow_detuning_override"):
        value, ln = take("protocol", key)
        if value is not None:
            proto_kw[key] = _parse_bool(value, key, ln)

    delays_spec, ln = take("protocol", "delays")
    scan_spec, _ = take("protocol", "herald_scan_grid")

    value, ln = take("write", "detuning")
    write_detuning = None if value in (None, "auto") else parse_quantity(value, "detuning", ln)
    value, ln = take("read", "detuning")
    read_detuning = None if value in (None, "auto") else parse_quantity(value, "detuning", ln)

    try:
        proto = default_config(params, **overrides, **proto_kw)
        if write_detuning is not None:
            proto = replace(proto, write=replace(proto.write, detuning=write_detuning))
        if read_detuning is not None:
            proto = replace(proto, read=replace(proto.read, detuning=read_detuning))
        if write_detuning is not None or read_detuning is not None:
            proto = replace(proto)  # re-run validation
    except (ValueError, SimulationError) as exc:
        raise ConfigError(str(exc)) from None

    if delays_spec is not None:
        spec = _parse_delays(delays_spec, ln)
        proto = replace(proto, delays=resolve_delays(proto, spec))

    run_kw = {}
    value, _ = take("run", "out_dir")
    if value is not None:
        run_kw["out_dir"] = str(value)
    value, ln = take("run", "formats")
    if value is not None:
        fmts = tuple(x.strip().lower() for x in str(value).split(","))
        bad = [f for f in fmts if f not in ("json", "csv")]
        if bad or not fmts:
            raise ConfigError("formats must be a non-empty subset of json,csv", "formats", ln)
        run_kw["formats"] = fmts
    value, _ = take("run", "workers")
    if value is not None and str(value).strip().lower() != "auto":
        run_kw["workers"] = int(value)
    value, _ = take("run", "seed")
    if value is not None:
        run_kw["seed"] = int(value)
    value, ln = take("run", "convergence_check")
    if value is not None:
        mode = str(value).strip().lower()
        if mode not in ("auto", "on", "off"):
            raise ConfigError("convergence_check must be auto|on|off",
                              "convergence_check", ln)
        run_kw["convergence_check"] = mode

    grid = None
    if scan_spec is not None:
        bits = str(scan_spec).split(":")
        if len(bits) != 3:
            raise ConfigError("herald_scan_grid must be START:STOP:COUNT", "herald_scan_grid")
        grid = tuple(np.linspace(float(bits[0]), float(bits[1]), int(bits[2])))

    return RunConfig(protocol=proto, herald_scan_grid=grid, **run_kw)


def resolve_delays(proto: ProtocolConfig, spec) -> tuple:
    """Resolve a delay spec; relative specs offset from the minimal valid delay."""
    if spec[0] == "absolute":
        return tuple(spec[1:])
    _, start, span, count = spec
    base = (proto.herald_time - proto.write.t0
            + proto.branch_buffer_sigmas * proto.read.sigma_t)
    base = proto.snap(base) + proto.grid_dt
    return tuple(base + start + span * k / (count - 1) for k in range(count))


def resolved_config_dict(rc: RunConfig) -> dict:
    """Full configuration echo (defaults included) for output provenance."""
    p = rc.protocol.params
    proto = rc.protocol
    return {
        "params": {
            "J_c_ghz": p.J_c, "kappa_plus_ghz": p.kappa_plus,
            "kappa_minus_ghz": p.kappa_minus, "Omega_1_ghz": p.Omega_1,
            "Omega_2_ghz": p.Omega_2, "g_ghz": p.g, "gamma_ghz": p.gamma,
            "J_m_ghz": p.J_m, "temperature_K": p.temperature,
            "include_mechanical_splitting": p.include_mechanical_splitting,
            "n_th": p.n_th,
        },
        "write": {"center_ns": proto.write.t0, "sigma_ns": proto.write.sigma_t,
                  "amplitude": proto.write.amplitude, "detuning_ghz": proto.write.detuning,
                  "phase_rad": proto.write.phase},
        "read": {"sigma_ns": proto.read.sigma_t, "amplitude": proto.read.amplitude,
                 "detuning_ghz": proto.read.detuning},
        "protocol": {
            "herald_time_ns": proto.herald_time, "herald_cavity": proto.herald_cavity,
            "delays_ns": list(proto.delays), "readout_offset": proto.readout_offset,
            "cutoffs": list(proto.cutoffs), "dt_ns": proto.grid_dt,
            "temperatures_K": list(proto.temperatures),
            "displacement_pad": proto.displacement_pad,
            "thermal_tail_tol": proto.thermal_tail_tol,
            "sample_spacing_ns": proto.sample_spacing,
            "branch_buffer_sigmas": proto.branch_buffer_sigmas,
            "allow_early_herald": proto.allow_early_herald,
            "allow_detuning_override": proto.allow_detuning_override,
        },
        "run": {"out_dir": rc.out_dir, "formats": list(rc.formats),
                "workers": rc.resolved_workers(), "seed": rc.seed,
                "convergence_check": rc.convergence_check},
    }


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def _write_csv(path: str, header: list, rows: list, comment: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])


def _emit(rc: RunConfig, subcommand: str, results: dict, csv_header, csv_rows, csv_note):
    os.makedirs(rc.out_dir, exist_ok=True)
    payload = {
        "subcommand": subcommand,
        "config": resolved_config_dict(rc),
        "results": results,
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    written = []
    if "json" in rc.formats:
        path = os.path.join(rc.out_dir, "result.json")
        _write_json(path, payload)
        written.append(path)
    if "csv" in rc.formats and csv_header is not None:
        path = os.path.join(rc.out_dir, f"{subcommand}.csv")
        _write_csv(path, csv_header, csv_rows, csv_note)
        written.append(path)
    return written


def _cmd_herald(rc: RunConfig) -> int:
    check = rc.convergence_check in ("on", "auto")
    proto = replace(rc.protocol, workers=rc.resolved_workers())
    result = run_write_herald(proto, convergence_check=check)
    _emit(rc, "herald", result.as_dict(),
          ["t_herald_ns", "concurrence", "bell_fidelity", "negativity",
           "herald_probability", "herald_rate_mhz", "two_photon_contamination", "t_q_ns"],
          [[result.t_herald, result.concurrence, result.bell_fidelity, result.negativity,
            result.herald_probability, result.herald_rate_mhz,
            result.two_photon_contamination, result.t_q]],
          "write-and-herald metrics at the configured herald time")
    print(f"herald: C = {result.concurrence:.4f}, F = {result.bell_fidelity:.4f}, "
          f"N = {result.negativity:.4f}, rate = {result.herald_rate_mhz:.3e} MHz")
    return EXIT_OK


def _cmd_herald_scan(rc: RunConfig) -> int:
    proto = replace(rc.protocol, workers=rc.resolved_workers())
    points = scan_herald_time(proto, rc.herald_scan_grid)
    results = {
        "t_q_ns": points[0].t_q if points else None,
        "points": [
            {"t_herald_ns": p.t_herald, "concurrence": p.concurrence,
             "herald_probability": p.herald_probability,
             "herald_rate_mhz": p.herald_rate_mhz, "valid": p.valid}
            for p in points
        ],
    }
    _emit(rc, "herald-scan", results,
          ["t_herald_ns", "concurrence", "herald_probability", "herald_rate_mhz", "valid"],
          [[p.t_herald, p.concurrence, p.herald_probability, p.herald_rate_mhz,
            int(p.valid)] for p in points],
          "concurrence and heralding rate versus herald time")
    best = max(points, key=lambda p: p.concurrence)
    print(f"herald-scan: C_max = {best.concurrence:.4f} at t_H = {best.t_herald:.2f} ns")
    return EXIT_OK


def _cmd_interference(rc: RunConfig) -> int:
    proto = replace(rc.protocol, workers=rc.resolved_workers())
    result = run_interference(proto)
    _emit(rc, "interference", result.as_dict(),
          ["delay_ns", "intensity_normalized", "intensity_raw"],
          [[d, i, r] for d, i, r in zip(result.pattern.delays, result.pattern.intensity,
                                        result.pattern.raw_intensity)],
          "cavity-1 readout intensity versus write-read delay (fringe pattern)")
    v = result.visibility
    print(f"interference: V = {v.visibility:.4f}, period = {v.period:.2f} ns, "
          f"offset = {result.readout_offset:.2f} ns")
    return EXIT_OK


def _cmd_temp_sweep(rc: RunConfig) -> int:
    proto = replace(rc.protocol, workers=rc.resolved_workers())
    points = run_temperature_sweep(proto)
    results = {
        "points": [
            {"temperature_K": p.temperature, "n_th": p.n_th, "negativity": p.negativity,
             "visibility": p.visibility, "concurrence": p.concurrence,
             "herald_probability": p.herald_probability}
            for p in points
        ],
    }
    _emit(rc, "temp-sweep", results,
          ["temperature_K", "n_th", "negativity", "visibility", "concurrence",
           "herald_probability"],
          [[p.temperature, p.n_th, p.negativity, p.visibility, p.concurrence,
            p.herald_probability] for p in points],
          "negativity and fringe visibility versus bath temperature")
    for p in points:
        print(f"T = {p.temperature:.3f} K: N = {p.negativity:.4f}, V = {p.visibility:.4f}")
    return EXIT_OK


def _cmd_validate(rc: RunConfig) -> int:
    from .validate import run_validation

    ok = run_validation(verbose=True)
    return EXIT_OK if ok else EXIT_FAILURE


_COMMANDS = {
    "herald": _cmd_herald,
    "herald-scan": _cmd_herald_scan,
    "interference": _cmd_interference,
    "temp-sweep": _cmd_temp_sweep,
    "validate": _cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heraldsim",
        description="Heralded remote phonon entanglement simulator",
    )
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    for name, help_text in (
        ("herald", "write pulse + single-photon herald, entanglement metrics"),
        ("herald-scan", "concurrence and heralding rate over a herald-time grid"),
        ("interference", "readout delay sweep: fringe pattern and visibility"),
        ("temp-sweep", "negativity and visibility versus temperature"),
        ("validate", "run fast invariant/oracle checks"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="config file (key=value or JSON)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", default=None, choices=["csv", "json", "both"])
        p.add_argument("--workers", type=int, default=None,
                       help="worker count (default: HERALD_SIM_WORKERS or CPU count)")
        p.add_argument("--convergence-check", dest="convergence", default=None,
                       choices=["auto", "on", "off"])
        if name == "herald":
            p.add_argument("--herald-time", type=float, default=None, help="ns")
        if name == "herald-scan":
            p.add_argument("--grid", default=None, help="START:STOP:COUNT in ns")
        if name == "interference":
            p.add_argument("--delays", default=None,
                           help="START:SPAN:COUNT in ns, relative to the minimal "
                                "valid delay, or a comma list of absolute delays")
        if name == "temp-sweep":
            p.add_argument("--temps", default=None, help="comma list of temperatures (K)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        rc = parse_config(args.config) if args.config else RunConfig(protocol=default_config())
        if args.out is not None:
            rc.out_dir = args.out
        if args.format is not None:
            rc.formats = ("json", "csv") if args.format == "both" else (args.format,)
        if args.workers is not None:
            rc.workers = args.workers
        if args.convergence is not None:
            rc.convergence_check = args.convergence
        if getattr(args, "herald_time", None) is not None:
            rc.protocol = replace(rc.protocol, herald_time=args.herald_time)
        if getattr(args, "grid", None) is not None:
            bits = args.grid.split(":")
            if len(bits) != 3:
                raise ConfigError("--grid must be START:STOP:COUNT", field="grid")
            rc.herald_scan_grid = tuple(
                np.linspace(float(bits[0]), float(bits[1]), int(bits[2])))
        if getattr(args, "delays", None) is not None:
            spec = _parse_delays(args.delays, None)
            rc.protocol = replace(rc.protocol, delays=resolve_delays(rc.protocol, spec))
        if getattr(args, "temps", None) is not None:
            temps = tuple(float(x) for x in args.temps.split(","))
            rc.protocol = replace(rc.protocol, temperatures=temps)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.subcommand](rc)
    except SimulationError as exc:
        print(f"simulation error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except ValueError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
