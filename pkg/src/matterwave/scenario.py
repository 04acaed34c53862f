"""Scenario files, batch runs and report serialization.

Scenario format: one ``key = value`` per line, ``#`` starts a comment, lists
are comma separated, booleans are ``true``/``false``. Keys::

    name = four-situations
    device = atom | neutron | both
    frame = lab | freefall | both
    params.m, params.g, params.T, params.kappa      (required)
    params.v_x0, params.c, params.hbar             (optional; SI defaults)
    chirp.enabled = false
    chirp.omega_dot = auto                         (auto = 2 kappa g)
    sweep.g | sweep.T | sweep.kappa | sweep.m = v1, v2, ...
    outputs = phase, propertime, trajectories, lattice-check, estimates
    trajectory.samples = 21
    quadrature.method = gauss | simpson
    quadrature.rel_tol, quadrature.abs_tol, quadrature.order
    estimate.v0, estimate.L                        (Bragg acceptance estimate)

``params.v_x0`` applies to the neutron only; the atom fountain is vertical.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lattice, phase
from .kinematics import (
    C_SI,
    HBAR_SI,
    Device,
    DeviceFrame,
    ExperimentParams,
    Frame,
    bragg_acceptance_estimate,
    build_paths,
    closure_height_closed_form,
    closure_heights,
    evaluate,
)
from .propertime import ENVELOPE_K, oracle_tolerance, proper_time_closed_form, proper_time_oracle
from .quadrature import Method, QuadratureSpec

SCHEMA_VERSION = 1
ROUTE_RTOL = phase.CLOSED_FORM_RTOL
OUTPUTS = ("phase", "propertime", "trajectories", "lattice-check", "estimates")
SWEEP_KEYS = ("g", "T", "kappa", "m")
CSV_COLUMNS = ("schema_version", "config", "t", "y_upper", "y_lower", "v_upper", "v_lower", "frame", "device")


class ScenarioError(ValueError):
    """Malformed or invalid scenario document."""

    def __init__(self, message, line=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key


class ScenarioRunError(RuntimeError):
    """A module error raised while running one configuration."""


# ---------------------------------------------------------------- parsing

def _number(raw):
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"non-finite number {raw!r}")
    return value


def _integer(raw):
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"expected an integer, got {raw!r}") from None


def _boolean(raw):
    lowered = raw.lower()
    if lowered not in ("true", "false"):
        raise ValueError(f"expected true or false, got {raw!r}")
    return lowered == "true"


def _number_list(raw):
    items = [item.strip() for item in raw.split(",")]
    if not items or any(not item for item in items):
        raise ValueError("sweep list must be non-empty with no blank entries")
    return [_number(item) for item in items]


def _word_list(raw):
    return [item.strip() for item in raw.split(",") if item.strip()]


def _choice(*allowed):
    def parse(raw):
        if raw not in allowed:
            raise ValueError(f"expected one of {', '.join(allowed)}, got {raw!r}")
        return raw
    return parse


def _omega_dot(raw):
    return "auto" if raw == "auto" else _number(raw)


def _string(raw):
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        return raw[1:-1]
    return raw


_SCHEMA = {
    "name": _string,
    "device": _choice("atom", "neutron", "both"),
    "frame": _choice("lab", "freefall", "both"),
    "params.m": _number,
    "params.g": _number,
    "params.T": _number,
    "params.kappa": _number,
    "params.v_x0": _number,
    "params.c": _number,
    "params.hbar": _number,
    "chirp.enabled": _boolean,
    "chirp.omega_dot": _omega_dot,
    "outputs": _word_list,
    "trajectory.samples": _integer,
    "quadrature.method": _choice("gauss", "simpson"),
    "quadrature.rel_tol": _number,
    "quadrature.abs_tol": _number,
    "quadrature.order": _integer,
    "estimate.v0": _number,
    "estimate.L": _number,
    **{f"sweep.{k}": _number_list for k in SWEEP_KEYS},
}
_REQUIRED = ("params.m", "params.g", "params.T", "params.kappa")


def _split_line(line, lineno):
    text = line.split("#", 1)[0].strip()
    if not text:
        return None
    if "=" not in text:
        raise ScenarioError("expected 'key = value'", line=lineno)
    key, raw = (part.strip() for part in text.split("=", 1))
    if not key:
        raise ScenarioError("missing key", line=lineno)
    if not raw:
        raise ScenarioError("missing value", line=lineno, key=key)
    return key, raw


def _read_entries(text, overrides=()):
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        item = _split_line(line, lineno)
        if item is None:
            continue
        key, raw = item
        if key not in _SCHEMA:
            raise ScenarioError("unknown key", line=lineno, key=key)
        if key in entries:
            raise ScenarioError(f"duplicate key (first set on line {entries[key][1]})", line=lineno, key=key)
        entries[key] = (raw, lineno)
    for assignment in overrides:
        item = _split_line(assignment, None)
        if item is None:
            raise ScenarioError(f"empty override {assignment!r}")
        key, raw = item
        if key not in _SCHEMA:
            raise ScenarioError("unknown key in override", key=key)
        entries[key] = (raw, None)
    values = {}
    for key, (raw, lineno) in entries.items():
        try:
            values[key] = _SCHEMA[key](raw)
        except ValueError as exc:
            raise ScenarioError(str(exc), line=lineno, key=key) from None
    return values


@dataclass(frozen=True)
class Scenario:
    name: str
    device: str
    frame: str
    params: ExperimentParams
    chirp_enabled: bool = False
    chirp_omega_dot: object = "auto"
    sweeps: dict = field(default_factory=dict)
    outputs: tuple = ("phase", "propertime")
    trajectory_samples: int = 21
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    estimate_v0: float = 1e3
    estimate_L: float = 1e-2

    def device_frames(self) -> list[DeviceFrame]:
        devices = list(Device) if self.device == "both" else [Device(self.device)]
        frames = list(Frame) if self.frame == "both" else [Frame(self.frame)]
        return [DeviceFrame(d, f) for d in devices for f in frames]

    def parameter_points(self) -> list[ExperimentParams]:
        """Cartesian product of the sweep lists (fixed key order g, T, kappa, m)."""
        keys = [k for k in SWEEP_KEYS if k in self.sweeps]
        points = []
        for combo in itertools.product(*(self.sweeps[k] for k in keys)):
            points.append(self.params.replace(**dict(zip(keys, combo))))
        return points

    def configurations(self) -> list[tuple[DeviceFrame, ExperimentParams]]:
        configs = []
        for p in self.parameter_points():
            for df in self.device_frames():
                # the atom fountain is vertical
                configs.append((df, p if df.device is Device.NEUTRON else p.replace(v_x0=0.0)))
        return configs

    def chirp_for(self, df: DeviceFrame, p: ExperimentParams) -> phase.ChirpSetting:
        if not self.chirp_enabled or df.device is not Device.ATOM:
            return phase.ChirpSetting()
        rate = 2.0 * p.kappa * p.g if self.chirp_omega_dot == "auto" else self.chirp_omega_dot
        return phase.ChirpSetting(True, rate)

    def echo(self) -> dict:
        p = self.params
        return {
            "name": self.name,
            "device": self.device,
            "frame": self.frame,
            "params": {"m": p.m, "g": p.g, "T": p.T, "kappa": p.kappa, "v_x0": p.v_x0, "c": p.c, "hbar": p.hbar},
            "chirp": {"enabled": self.chirp_enabled, "omega_dot": self.chirp_omega_dot},
            "sweep": {k: list(v) for k, v in self.sweeps.items()},
            "outputs": list(self.outputs),
            "trajectory": {"samples": self.trajectory_samples},
            "quadrature": {
                "method": self.quadrature.method.value,
                "rel_tol": self.quadrature.rel_tol,
                "abs_tol": self.quadrature.abs_tol,
                "order": self.quadrature.order,
            },
            "estimate": {"v0": self.estimate_v0, "L": self.estimate_L},
        }


def parse_scenario(text: str, overrides=()) -> Scenario:
    """Parse and validate a scenario document; ``overrides`` are extra ``key=value`` strings."""
    values = _read_entries(text, overrides)
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ScenarioError(f"missing required keys: {', '.join(missing)}")

    def get(key, default):
        return values.get(key, default)

    try:
        params = ExperimentParams(
            m=values["params.m"],
            g=values["params.g"],
            T=values["params.T"],
            kappa=values["params.kappa"],
            v_x0=get("params.v_x0", 0.0),
            c=get("params.c", C_SI),
            hbar=get("params.hbar", HBAR_SI),
        )
    except ValueError as exc:
        raise ScenarioError(f"invalid parameters: {exc}") from None

    outputs = get("outputs", ["phase", "propertime"])
    for item in outputs:
        if item not in OUTPUTS:
            raise ScenarioError(f"unknown output {item!r}; choose from {', '.join(OUTPUTS)}", key="outputs")
    outputs = tuple(o for o in OUTPUTS if o in outputs)

    device = get("device", "both")
    chirp_enabled = get("chirp.enabled", False)
    if chirp_enabled and device != "atom":
        raise phase.ChirpError("chirp.enabled requires device = atom; chirping is not defined for the neutron")
    omega_dot = get("chirp.omega_dot", "auto")
    if "chirp.omega_dot" in values and not chirp_enabled:
        raise ScenarioError("chirp.omega_dot given but chirp.enabled is false", key="chirp.omega_dot")

    samples = get("trajectory.samples", 21)
    if samples < 2:
        raise ScenarioError("need at least 2 trajectory samples", key="trajectory.samples")

    try:
        q = QuadratureSpec(
            method=Method(get("quadrature.method", "gauss")),
            rel_tol=get("quadrature.rel_tol", 1e-12),
            abs_tol=get("quadrature.abs_tol", 1e-300),
            order=get("quadrature.order", 12),
        )
    except ValueError as exc:
        raise ScenarioError(str(exc), key="quadrature") from None

    sweeps = {k: values[f"sweep.{k}"] for k in SWEEP_KEYS if f"sweep.{k}" in values}
    scenario = Scenario(
        name=get("name", "scenario"),
        device=device,
        frame=get("frame", "both"),
        params=params,
        chirp_enabled=chirp_enabled,
        chirp_omega_dot=omega_dot,
        sweeps=sweeps,
        outputs=outputs,
        trajectory_samples=samples,
        quadrature=q,
        estimate_v0=get("estimate.v0", 1e3),
        estimate_L=get("estimate.L", 1e-2),
    )
    # validate every sweep point up front
    try:
        scenario.parameter_points()
    except ValueError as exc:
        raise ScenarioError(f"invalid sweep value: {exc}") from None
    return scenario


FOUR_SITUATIONS = """\
# atom fountain and neutron interferometer, laboratory and free-fall frames
name = four-situations
device = both
frame = both
params.m = 2.2e-25
params.g = 9.8
params.T = 0.1
params.kappa = 1.6e7
params.v_x0 = 1000
outputs = phase, propertime, trajectories, lattice-check, estimates
"""

BUILTINS = {"four-situations": FOUR_SITUATIONS}


# ---------------------------------------------------------------- running

def _check(name, value, tolerance):
    return {"name": name, "value": value, "tolerance": tolerance, "passed": bool(abs(value) <= tolerance)}


def expected_closure(df: DeviceFrame, p: ExperimentParams) -> float:
    return closure_height_closed_form(df, p)


def lattice_check(p: ExperimentParams, points: int = 100) -> dict:
    """Worst ratio of |exact - factored| to its bound for each lattice form at the experiment scale."""
    lp = lattice.LaserPair(0.5 * p.kappa, c=p.c)
    rp = lattice.RamanPair.from_frequencies(lp.omega0 * (1 + 1e-5), lp.omega0 * (1 - 1e-5), p.c)
    z = np.linspace(-10.0, 10.0, points) * lp.period
    t = np.linspace(0.0, 2.0 * p.T, points)
    Z, Tm = np.meshgrid(z, t)
    v = p.g * p.T
    cases = {
        "standing_wave": (lattice.standing_wave(lp, Z, Tm, rotating=True), lattice.dropped_term_bound(lp, Z, Tm, rotating=True)),
        "doppler": (lattice.doppler_shifted(lp, v, Z, Tm, rotating=True),
                    lattice.dropped_term_bound(lp, Z, Tm, v=v, rotating=True)),
        "raman": (lattice.raman_lattice(rp, Z, Tm, rotating=True), lattice.dropped_term_bound(rp, Z, Tm, rotating=True)),
        "raman_doppler": (lattice.raman_doppler(rp, v, Z, Tm, rotating=True),
                          lattice.dropped_term_bound(rp, Z, Tm, v=v, rotating=True)),
        "chirped": (lattice.chirped_lattice(lp, p.g, Z, Tm, rotating=True),
                    lattice.dropped_term_bound(lp, Z, Tm, accel=p.g, rotating=True)),
    }
    out = {}
    for name, ((exact, factored), bound) in cases.items():
        out[name] = float(np.max(np.abs(exact - factored) / bound))
    return out


def _trajectories(df, p, samples):
    upper, lower = build_paths(df, p)
    ts = np.linspace(0.0, 2.0 * p.T, samples)
    rows = {"t": [], "y_upper": [], "y_lower": [], "v_upper": [], "v_lower": []}
    for t in ts:
        yu, vu = evaluate(upper, float(t))
        yl, vl = evaluate(lower, float(t))
        for key, value in zip(rows, (float(t), yu, yl, vu, vl)):
            rows[key].append(value)
    return rows


def _params_dict(p: ExperimentParams) -> dict:
    return {"m": p.m, "g": p.g, "T": p.T, "kappa": p.kappa, "v_x0": p.v_x0, "c": p.c, "hbar": p.hbar}


def run_configuration(s: Scenario, index: int, df: DeviceFrame, p: ExperimentParams) -> dict:
    """All requested quantities and tolerance checks for one configuration."""
    q = s.quadrature
    entry = {
        "index": index,
        "label": df.label,
        "device": df.device.value,
        "frame": df.frame.value,
        "params": _params_dict(p),
        "v_y0": p.v_y0,
        "R": p.R,
    }
    checks = []
    scale = abs(p.R)

    yu, yl = closure_heights(df, p)
    expected = expected_closure(df, p)
    entry["closure"] = {"y_upper": yu, "y_lower": yl, "gap": yu - yl, "expected": expected}
    closure_tol = ROUTE_RTOL * 2.0 * abs(p.g) * p.T**2
    checks.append(_check("closure_height", max(abs(yu - expected), abs(yl - expected)), closure_tol))

    closed = proper_time_closed_form(df, p)
    oracle = proper_time_oracle(df, p, q)
    envelope = oracle_tolerance(p)
    tau_residual = oracle.tau_upper - closed.tau_upper
    if "propertime" in s.outputs:
        entry["propertime"] = {
            "closed_form": closed.as_dict(),
            "oracle": oracle.as_dict(),
            "delta_tau_residual": oracle.delta_tau - closed.delta_tau,
            "tau_upper_residual": tau_residual,
            "envelope": envelope,
            "envelope_K": ENVELOPE_K,
        }
    checks.append(_check("oracle_delta_tau", oracle.delta_tau - closed.delta_tau, envelope))
    checks.append(_check("oracle_tau_upper", tau_residual, envelope))

    chirp = s.chirp_for(df, p)
    breakdown = phase.detected_phase(df, p, chirp)
    phase_oracle = phase.detected_phase_oracle(df, p, q, chirp)
    phase_env = phase.phase_envelope(p)
    if "phase" in s.outputs:
        entry["phase"] = breakdown.as_dict()
        entry["phase"]["abs_R"] = scale
        entry["phase"]["oracle_total"] = phase_oracle.total
        entry["phase"]["oracle_residual"] = phase_oracle.total - breakdown.total
        entry["phase"]["envelope"] = phase_env
    checks.append(_check("route_agreement", breakdown.route_agreement, ROUTE_RTOL * scale))
    target = -p.R + breakdown.laser_phase
    checks.append(_check("total_vs_minus_R", breakdown.total - target, ROUTE_RTOL * scale))
    checks.append(_check("oracle_phase", phase_oracle.total - breakdown.total, phase_env))

    if df.device is Device.NEUTRON and p.v_x0 > 0:
        traj = phase.trajectory_term_residual(df, p, QuadratureSpec(method=q.method, rel_tol=q.rel_tol, order=24))
        traj_env = phase.trajectory_envelope(p)
        entry["trajectory_term"] = {"residual": traj, "envelope": traj_env}
        checks.append(_check("trajectory_term", traj, traj_env))

    if "trajectories" in s.outputs:
        entry["trajectories"] = _trajectories(df, p, s.trajectory_samples)
    if "lattice-check" in s.outputs:
        ratios = lattice_check(p)
        entry["lattice_check"] = ratios
        for name, ratio in ratios.items():
            checks.append(_check(f"lattice_{name}", ratio, 1.0))
    if "estimates" in s.outputs:
        drop, deflection = bragg_acceptance_estimate(s.estimate_v0, s.estimate_L, p)
        entry["estimates"] = {
            "bragg_drop": drop,
            "bragg_deflection": deflection,
            "doppler_kick_ratio": lattice.doppler_kick_ratio(p, s.estimate_v0),
        }
    entry["checks"] = checks
    entry["passed"] = all(c["passed"] for c in checks)
    return entry


def _fit_exponents(entries, sweeps) -> list:
    """Log-log slope of the oracle residuals against g, per configuration family."""
    if len(set(sweeps.get("g", []))) < 2:
        return []
    families = {}
    for e in entries:
        pr = e["params"]
        key = (e["label"], pr["T"], pr["kappa"], pr["m"])
        families.setdefault(key, []).append(e)
    fits = []
    for (label, T, kappa, m), members in families.items():
        for quantity, getter in (
            ("tau_upper_residual", lambda e: e.get("propertime", {}).get("tau_upper_residual")),
            ("trajectory_residual", lambda e: e.get("trajectory_term", {}).get("residual")),
        ):
            pts = [(e["params"]["g"], getter(e)) for e in members if getter(e) is not None]
            if len(pts) < 2:
                continue
            gs = np.array([g for g, _ in pts])
            rs = np.array([abs(r) for _, r in pts])
            # a residual at rounding level has no meaningful slope
            usable = (gs > 0) & (rs > 0)
            exponent = None
            if usable.sum() >= 2 and np.ptp(np.log(gs[usable])) > 0:
                exponent = float(np.polyfit(np.log(gs[usable]), np.log(rs[usable]), 1)[0])
            fits.append({"label": label, "quantity": quantity, "T": T, "kappa": kappa, "m": m,
                         "points": int(usable.sum()), "exponent": exponent})
    return fits


def run(s: Scenario, jobs: int = 1) -> "ScenarioReport":
    """Run every configuration; results are ordered by configuration index."""
    configs = s.configurations()

    def work(item):
        index, (df, p) = item
        try:
            return run_configuration(s, index, df, p)
        except Exception as exc:
            raise ScenarioRunError(f"configuration {index} ({df.label}, g={p.g}, T={p.T}): {exc}") from exc

    items = list(enumerate(configs))
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(work, items))
    else:
        entries = [work(item) for item in items]
    scaling = _fit_exponents(entries, s.sweeps)
    return ScenarioReport(
        schema_version=SCHEMA_VERSION,
        scenario=s.echo(),
        configurations=entries,
        scaling=scaling,
        passed=all(e["passed"] for e in entries),
    )


@dataclass
class ScenarioReport:
    schema_version: int
    scenario: dict
    configurations: list
    scaling: list = field(default_factory=list)
    passed: bool = True

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "scenario": self.scenario,
            "configurations": self.configurations,
            "scaling": self.scaling,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioReport":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {data.get('schema_version')!r}")
        return cls(
            schema_version=data["schema_version"],
            scenario=data["scenario"],
            configurations=data["configurations"],
            scaling=data.get("scaling", []),
            passed=data["passed"],
        )


# ---------------------------------------------------------------- output

def _float_text(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite number {x!r} in report")
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def canonical_json(obj) -> str:
    """JSON with sorted keys and every float written with 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float_text(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(f"{json.dumps(str(k))}:{canonical_json(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(report: ScenarioReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for entry in report.configurations:
        traj = entry.get("trajectories")
        if not traj:
            continue
        for i, t in enumerate(traj["t"]):
            writer.writerow([
                report.schema_version, entry["index"], _float_text(t),
                _float_text(traj["y_upper"][i]), _float_text(traj["y_lower"][i]),
                _float_text(traj["v_upper"][i]), _float_text(traj["v_lower"][i]),
                entry["frame"], entry["device"],
            ])
    return buf.getvalue()


def use_color(stream=None) -> bool:
    stream = stream or sys.stdout
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _status(ok, color):
    word = "PASS" if ok else "FAIL"
    if not color:
        return word
    return f"\033[{32 if ok else 31}m{word}\033[0m"


def to_table(report: ScenarioReport, color: bool = False) -> str:
    header = ("#", "config", "g", "T", "delta_tau [s]", "phase [rad]", "|R| [rad]", "routes", "status")
    rows = []
    for e in report.configurations:
        ph = e.get("phase", {})
        pt = e.get("propertime", {}).get("closed_form", {})
        rows.append((
            str(e["index"]), e["label"], f"{e['params']['g']:.4g}", f"{e['params']['T']:.4g}",
            f"{pt['delta_tau']:.6e}" if pt else "-",
            f"{ph['total']:.9e}" if ph else "-",
            f"{abs(e['R']):.9e}",
            f"{ph['route_agreement']:.2e}" if ph else "-",
            e["passed"],
        ))
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header[:-1])]
    lines = [f"scenario: {report.scenario.get('name', '')}  (schema {report.schema_version})"]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)) + "  " + header[-1])
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)) + "  " + _status(r[-1], color))
        failed = [c["name"] for c in report.configurations[int(r[0])]["checks"] if not c["passed"]]
        if failed:
            lines.append("    failed: " + ", ".join(failed))
    for fit in report.scaling:
        exp = "n/a (rounding level)" if fit["exponent"] is None else f"{fit['exponent']:.3f}"
        lines.append(f"g-scaling {fit['label']} {fit['quantity']}: exponent {exp} over {fit['points']} points")
    lines.append(f"overall: {_status(report.passed, color)}")
    return "\n".join(lines) + "\n"


def emit(report: ScenarioReport, fmt: str = "json", color: bool = False) -> str:
    if fmt == "json":
        return canonical_json(report.to_dict()) + "\n"
    if fmt == "csv":
        return to_csv(report)
    if fmt == "table":
        return to_table(report, color)
    raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------- invariant suite

def run_checks(p: ExperimentParams | None = None, inject_sign_error: str | None = None) -> list:
    """The invariant suite behind ``matterwave check``.

    ``inject_sign_error`` names a phase route whose value is negated before
    the routes are compared; the suite must then fail.
    """
    if p is None:
        p = parse_scenario(FOUR_SITUATIONS).params
    results = []
    scale = abs(p.R)
    for df in DeviceFrame.all():
        pp = p if df.device is Device.NEUTRON else p.replace(v_x0=0.0)
        routes = phase.route_values(df, pp)
        if inject_sign_error in routes:
            routes[inject_sign_error] = -routes[inject_sign_error]
        values = list(routes.values())
        results.append(_check(f"{df.label}: route agreement", max(values) - min(values), ROUTE_RTOL * scale))
        worst = max(abs(v + pp.R) for v in values)
        results.append(_check(f"{df.label}: routes equal -kappa g T^2", worst, ROUTE_RTOL * scale))
        yu, yl = closure_heights(df, pp)
        results.append(_check(f"{df.label}: closure height", abs(yu - expected_closure(df, pp)) + abs(yu - yl),
                              ROUTE_RTOL * 2.0 * pp.g * pp.T**2))
        tau = proper_time_closed_form(df, pp)
        oracle = proper_time_oracle(df, pp)
        results.append(_check(f"{df.label}: oracle delta_tau within envelope",
                              oracle.delta_tau - tau.delta_tau, oracle_tolerance(pp)))
        want = 0.0 if df.device is Device.ATOM else 4.0 * pp.v_y0 * pp.g * pp.T**2 / pp.c**2
        results.append(_check(f"{df.label}: delta_tau closed form", tau.delta_tau - want,
                              ROUTE_RTOL * abs(want) if want else 0.0))

    chirped = phase.detected_phase(DeviceFrame(Device.ATOM, Frame.LAB), p.replace(v_x0=0.0), phase.ChirpSetting.nulling(p))
    results.append(_check("chirp nulls the fringe", chirped.total, ROUTE_RTOL * scale))
    results.append(_check("chirp phase equals kappa g T^2", chirped.laser_phase - scale, ROUTE_RTOL * scale))

    base = phase.energy_bookkeeping_phase(p).total
    spread = max(abs(phase.energy_bookkeeping_phase(p, omega_l=wl, omega=w).total - base)
                 for wl in (1e10, 1e12, 1e15) for w in (1e5, 1e7, 1e10))
    results.append(_check("laser terms cancel", spread, 0.0))
    results.append(_check("mass drops out", phase.mass_independence_check(p, [p.m, 2 * p.m, 10 * p.m]), 0.0))

    relative, detected = phase.neutron_phase_consistency(p)
    golden = phase.golden_rule_phase(DeviceFrame(Device.NEUTRON, Frame.LAB), p)
    results.append(_check("neutron relative phase = 2 |golden rule|", relative - 2.0 * abs(golden), ROUTE_RTOL * scale))
    results.append(_check("neutron detected = relative / 2", detected - abs(golden), ROUTE_RTOL * scale))

    for name, ratio in lattice_check(p).items():
        results.append(_check(f"lattice {name} within dropped-term bound", ratio, 1.0))
    k = p.kappa
    kb, _ = lattice.boost_wavevector(k, p.m, 1.0, p.hbar)
    back, _ = lattice.boost_wavevector(kb, p.m, -1.0, p.hbar)
    results.append(_check("boost round trip", (back - k) / k, ROUTE_RTOL))
    return results
