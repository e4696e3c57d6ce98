"""Declarative scenario files: strict parsing, resolution, execution, artifacts.

A scenario file is a plain-text nested key/value table.  Keys carry their
units in the name (``omega1_ghz``, ``g1_over_omega1``, ``tau_omega1``)
because unit slips are the dominant failure mode when reproducing
experiments.  Parsing is strict: any unknown section or key is rejected
with the offending line quoted.

Example::

    kind = rabi_dynamics

    [system]
    geometry = half_wave
    omega1_ghz = 4.0
    delta_ghz = 2.25
    ip2_na = 630.0
    g1_over_omega1 = 0.15
    n_max = 16

    [dissipation]
    kappa_over_omega1 = 1.8e-4
    gamma_over_omega1 = 1.8e-4

    [drive]
    resonance = two_photon
    amplitude_area = 3.4
    tau_omega1 = 5.0

    [run]
    periods = 4.2
    samples = 2000

Resolution turns the file into a fully materialized plan: the resonance
flux is solved from the spectrum, the drive carrier placed midway between
the split transitions, and an ``auto`` pulse width calibrated by scanning.
The resolved plan is embedded in the run manifest, and feeding the manifest
back to ``run`` reproduces the artifacts byte for byte.
"""

from __future__ import annotations

import json
import math
import time
from pathlib import Path

import numpy as np

from . import effective, protocols, sweeps
from .dressed import dressed_basis, jump_set
from .dynamics import EvolutionProblem, StepControl, TimeSeries, evolve, find_oscillation_peaks
from .linops import SpaceLayout
from .model import (
    PulseSpec,
    QubitParams,
    ResonatorSpec,
    flux_for_frequency,
    rabi_hamiltonian,
)

__all__ = [
    "ScenarioError",
    "ParseError",
    "ValidationError",
    "InvariantBreach",
    "parse_scenario",
    "resolve_scenario",
    "run_resolved",
    "run_scenario_file",
    "convergence_report",
    "bundled_scenario_path",
    "SCENARIO_KINDS",
]


class ScenarioError(Exception):
    """Base class for scenario failures; ``exit_code`` drives the CLI status."""

    exit_code = 1


class ParseError(ScenarioError):
    exit_code = 2


class ValidationError(ScenarioError):
    exit_code = 3


class InvariantBreach(ScenarioError):
    exit_code = 5


# ---------------------------------------------------------------------------
# Parsing

_SYSTEM_KEYS = {
    "geometry": str,
    "omega1_ghz": float,
    "delta_ghz": float,
    "ip2_na": float,
    "g1_over_omega1": float,
    "n_max": int,
    "rwa": bool,
}

_SCHEMA: dict[str, dict[str, dict]] = {
    "spectrum_sweep": {
        "system": _SYSTEM_KEYS,
        "sweep": {
            "omega_q_min_ghz": float,
            "omega_q_max_ghz": float,
            "n_levels": int,
            "n_grid": int,
            "models": "str_list",
            "gap_threshold": float,
        },
    },
    "rabi_dynamics": {
        "system": _SYSTEM_KEYS,
        "dissipation": {
            "kappa_over_omega1": float,
            "gamma_over_omega1": float,
            "gamma_phi_over_gamma": float,
        },
        "drive": {
            "resonance": str,
            "amplitude_area": float,
            "tau_omega1": (float, "auto"),
            "window_min_ghz": float,
            "window_max_ghz": float,
        },
        "run": {
            "periods": float,
            "samples": int,
        },
    },
    "effective_compare": {
        "compare": {
            "theta_rad": float,
            "g_over_omega_q": list,
            "n_max": int,
        },
    },
    "ghz_protocol": {
        "resonator": {"omega1_ghz": float, "n_max": int},
        "qubit1": {"delta_ghz": float, "g_over_omega1": float, "park_freq_ghz": float},
        "qubit2": {"delta_ghz": float, "g_over_omega1": float, "park_freq_ghz": float},
        "qubit3": {"delta_ghz": float, "g_over_omega1": float, "park_freq_ghz": float},
        "protocol": {
            "dissipation": bool,
            "kappa_over_omega1": float,
            "gamma_over_omega1": float,
            "pulse_tau_omega1": float,
        },
    },
}
# A dephasing study is a dynamics run compared against its dephasing-free twin.
_SCHEMA["dephasing_study"] = _SCHEMA["rabi_dynamics"]
# A convergence check wraps a dynamics scenario and adds the gate parameters.
_SCHEMA["convergence_check"] = dict(_SCHEMA["rabi_dynamics"]) | {
    "converge": {"delta_n_max": int, "tolerance": float},
}

SCENARIO_KINDS = tuple(sorted(_SCHEMA))

_REQUIRED: dict[str, dict[str, tuple[str, ...]]] = {
    "spectrum_sweep": {
        "system": ("geometry", "omega1_ghz", "delta_ghz", "ip2_na",
                   "g1_over_omega1", "n_max"),
        "sweep": ("omega_q_min_ghz", "omega_q_max_ghz", "n_levels"),
    },
    "rabi_dynamics": {
        "system": ("geometry", "omega1_ghz", "delta_ghz", "ip2_na",
                   "g1_over_omega1", "n_max"),
        "dissipation": ("kappa_over_omega1", "gamma_over_omega1"),
        "drive": ("resonance", "amplitude_area"),
        "run": (),
    },
    "effective_compare": {"compare": ("g_over_omega_q",)},
    "ghz_protocol": {
        "resonator": ("omega1_ghz", "n_max"),
        "qubit1": ("delta_ghz", "g_over_omega1", "park_freq_ghz"),
        "qubit2": ("delta_ghz", "g_over_omega1", "park_freq_ghz"),
        "qubit3": ("delta_ghz", "g_over_omega1", "park_freq_ghz"),
        "protocol": (),
    },
}
_REQUIRED["dephasing_study"] = _REQUIRED["rabi_dynamics"]
_REQUIRED["convergence_check"] = _REQUIRED["rabi_dynamics"]


def _parse_value(raw: str, line: str):
    raw = raw.strip()
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    if "," in raw:
        return [_parse_value(part, line) for part in raw.split(",") if part.strip()]
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def _coerce(kind: str, section: str, key: str, value, line: str):
    spec = _SCHEMA[kind][section][key]
    if spec is bool:
        if not isinstance(value, bool):
            raise ValidationError(f"{section}.{key} must be true/false: {line!r}")
        return value
    if spec is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"{section}.{key} must be an integer: {line!r}")
        return value
    if spec is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"{section}.{key} must be a number: {line!r}")
        return float(value)
    if spec is list:
        values = value if isinstance(value, list) else [value]
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                   for v in values):
            raise ValidationError(f"{section}.{key} must be a number list: {line!r}")
        return [float(v) for v in values]
    if spec is str:
        if not isinstance(value, str):
            raise ValidationError(f"{section}.{key} must be a string: {line!r}")
        return value
    if spec == "str_list":
        values = value if isinstance(value, list) else [value]
        if not all(isinstance(v, str) for v in values):
            raise ValidationError(f"{section}.{key} must be a name list: {line!r}")
        return values
    # Union specs like (float, "auto").
    if isinstance(spec, tuple):
        if isinstance(value, str) and value in spec:
            return value
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        raise ValidationError(f"{section}.{key} has an invalid value: {line!r}")
    raise AssertionError(f"unhandled schema spec {spec!r}")


def parse_scenario(text: str) -> dict:
    """Parse and strictly validate scenario text into a nested dict."""
    kind = None
    sections: dict[str, dict] = {}
    current = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if kind is None:
                raise ParseError(f"line {lineno}: kind must come first: {raw_line!r}")
            if current not in _SCHEMA[kind]:
                raise ParseError(
                    f"line {lineno}: unknown section for kind {kind}: {raw_line!r}"
                )
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected key = value: {raw_line!r}")
        key, raw_value = (part.strip() for part in line.split("=", 1))
        value = _parse_value(raw_value, raw_line)
        if current is None:
            if key != "kind":
                raise ParseError(
                    f"line {lineno}: only 'kind' may appear before sections: "
                    f"{raw_line!r}"
                )
            if value not in _SCHEMA:
                raise ParseError(
                    f"line {lineno}: unknown scenario kind {value!r}; "
                    f"expected one of {', '.join(SCENARIO_KINDS)}"
                )
            kind = value
            continue
        if key not in _SCHEMA[kind][current]:
            raise ParseError(
                f"line {lineno}: unknown key in [{current}]: {raw_line!r}"
            )
        sections[current][key] = _coerce(kind, current, key, value, raw_line)
    if kind is None:
        raise ParseError("scenario file does not declare a kind")
    for section, keys in _REQUIRED[kind].items():
        if keys and section not in sections:
            raise ValidationError(f"missing required section [{section}]")
        for key in keys:
            if key not in sections.get(section, {}):
                raise ValidationError(f"missing required key {section}.{key}")
    return {"kind": kind, **sections}


# ---------------------------------------------------------------------------
# Resolution: turn a parsed scenario into a fully materialized plan.

_RESONANCES = {
    # name -> (target bare states (qubit, photons), default window in omega_1 units)
    "two_photon": (((1, 0), (0, 2)), (1.8, 2.18)),
    "three_photon": (((1, 0), (0, 3)), (2.7, 3.18)),
}


def _system_of(scenario: dict):
    sys = scenario["system"]
    geometry = sys["geometry"]
    if geometry not in ("half_wave", "quarter_wave"):
        raise ValidationError(f"system.geometry must be half_wave or quarter_wave, "
                              f"got {geometry!r}")
    resonator = ResonatorSpec(geometry, sys["omega1_ghz"], sys["n_max"])
    qubit = QubitParams(sys["delta_ghz"], sys["ip2_na"])
    return qubit, resonator, sys["g1_over_omega1"], bool(sys.get("rwa", False))


def _calibrate_tau(h, basis, jumps, pulse_area: float, carrier: float,
                   gap: float) -> tuple[float, list[list[float]]]:
    """Scan the pulse width over [1, 10]/omega_1; keep the width that
    maximizes the first qubit-excitation peak."""
    best_tau, best_peak = None, -1.0
    scan = []
    gs = basis.ground_state
    rho0 = np.outer(gs, gs.conj())
    for tau in np.linspace(1.0, 10.0, 10):
        pulse = PulseSpec(pulse_area, carrier, 5.0 * tau, tau)
        horizon = 5.0 * tau + 0.45 * (2.0 * math.pi / gap)
        t_grid = np.linspace(0.0, horizon, 160)
        problem = EvolutionProblem(h0=h, jumps=jumps, rho0=rho0,
                                   t_grid=t_grid, drive=pulse)
        peak = float(np.max(evolve(problem, basis).channel("qubit_excitation")))
        scan.append([float(tau), peak])
        if peak > best_peak:
            best_tau, best_peak = float(tau), peak
    return best_tau, scan


def _resolve_dynamics(scenario: dict) -> dict:
    qubit, resonator, g_ratio, rwa = _system_of(scenario)
    if rwa:
        raise ValidationError("dynamics scenarios target the full model; rwa "
                              "is only meaningful for spectrum sweeps")
    drive = scenario["drive"]
    name = drive["resonance"]
    if name not in _RESONANCES:
        raise ValidationError(f"drive.resonance must be one of "
                              f"{sorted(_RESONANCES)}, got {name!r}")
    targets_qn, window_nat = _RESONANCES[name]
    if "window_min_ghz" in drive and "window_max_ghz" in drive:
        window_nat = (drive["window_min_ghz"] / resonator.omega1_ghz,
                      drive["window_max_ghz"] / resonator.omega1_ghz)
    n_max = resonator.n_max
    layout = SpaceLayout((2, n_max + 1))
    delta_nat = qubit.delta_ghz / resonator.omega1_ghz
    targets = tuple(layout.basis_index(q, n) for q, n in targets_qn)
    split = effective.minimum_splitting(
        effective.flux_swept_hamiltonian(delta_nat, g_ratio, n_max),
        window_nat, targets,
    )
    omega_q_nat = split.omega_q_star
    lo, hi = split.pair
    theta = math.acos(delta_nat / omega_q_nat)
    h = rabi_hamiltonian(omega_q_nat, g_ratio, theta, n_max)
    basis = dressed_basis(h)
    w = basis.eig.values
    carrier = float(0.5 * ((w[lo] - w[0]) + (w[hi] - w[0])))

    dis = scenario["dissipation"]
    kappa = dis["kappa_over_omega1"]
    gamma = dis["gamma_over_omega1"]
    gamma_phi = dis.get("gamma_phi_over_gamma", 0.0) * gamma
    jumps = jump_set(basis, kappa, gamma, gamma_phi)

    tau = drive.get("tau_omega1", 3.0)
    tau_scan = None
    if tau == "auto":
        calib_jumps = jump_set(basis, kappa, gamma, 0.0)
        tau, tau_scan = _calibrate_tau(h, basis, calib_jumps,
                                       drive["amplitude_area"], carrier,
                                       split.gap)
    run = scenario.get("run", {})
    periods = float(run.get("periods", 4.0))
    samples = int(run.get("samples", 2000))
    if samples < 16 or periods <= 0:
        raise ValidationError("run.samples must be >= 16 and run.periods > 0")
    t0 = 5.0 * float(tau)
    duration = t0 + periods * 2.0 * math.pi / split.gap

    resolved = {
        "kind": scenario["kind"],
        "system": dict(scenario["system"]),
        "dissipation": {
            "kappa_over_omega1": kappa,
            "gamma_over_omega1": gamma,
            "gamma_phi_over_gamma": dis.get("gamma_phi_over_gamma", 0.0),
        },
        "drive": {
            "resonance": name,
            "amplitude_area": drive["amplitude_area"],
            "tau_omega1": float(tau),
            "carrier_omega1": carrier,
        },
        "run": {"periods": periods, "samples": samples,
                "duration_omega1": duration},
        "solved": {
            "omega_q_over_omega1": omega_q_nat,
            "omega_q_ghz": omega_q_nat * resonator.omega1_ghz,
            "flux_offset": flux_for_frequency(
                qubit, omega_q_nat * resonator.omega1_ghz),
            "splitting_over_omega1": split.gap,
            "level_pair": list(split.pair),
            "mixing_angle_rad": theta,
        },
    }
    if tau_scan is not None:
        resolved["solved"]["tau_calibration_scan"] = tau_scan
    return resolved


def _resolve_spectrum(scenario: dict) -> dict:
    qubit, resonator, g_ratio, rwa = _system_of(scenario)
    sweep = scenario["sweep"]
    models = sweep.get("models", "full")
    model_list = models if isinstance(models, list) else [models]
    model_list = [m.strip() for m in model_list]
    for m in model_list:
        if m not in ("full", "jc"):
            raise ValidationError(f"sweep.models entries must be full or jc, got {m!r}")
    if sweep["omega_q_min_ghz"] <= qubit.delta_ghz:
        raise ValidationError("sweep window must start above the qubit gap")
    if sweep["omega_q_min_ghz"] >= sweep["omega_q_max_ghz"]:
        raise ValidationError("sweep window must be increasing")
    return {
        "kind": scenario["kind"],
        "system": dict(scenario["system"]),
        "sweep": {
            "omega_q_min_ghz": sweep["omega_q_min_ghz"],
            "omega_q_max_ghz": sweep["omega_q_max_ghz"],
            "n_levels": sweep["n_levels"],
            "n_grid": int(sweep.get("n_grid", 400)),
            "gap_threshold": float(sweep.get("gap_threshold", 0.05)),
            "models": model_list,
        },
    }


def _resolve_effective(scenario: dict) -> dict:
    comp = scenario["compare"]
    ratios = comp["g_over_omega_q"]
    if not ratios or any(not 0.0 < r <= 0.1 for r in ratios):
        raise ValidationError("compare.g_over_omega_q must lie in (0, 0.1]")
    return {
        "kind": scenario["kind"],
        "compare": {
            "theta_rad": float(comp.get("theta_rad", math.pi / 4.0)),
            "g_over_omega_q": [float(r) for r in ratios],
            "n_max": int(comp.get("n_max", 16)),
        },
    }


def _resolve_ghz(scenario: dict) -> dict:
    res = scenario["resonator"]
    proto = scenario.get("protocol", {})
    resolved = {
        "kind": scenario["kind"],
        "resonator": {"omega1_ghz": res["omega1_ghz"],
                      "n_max": int(res.get("n_max", 8))},
        "protocol": {
            "dissipation": bool(proto.get("dissipation", False)),
            "kappa_over_omega1": float(proto.get("kappa_over_omega1", 1.8e-4)),
            "gamma_over_omega1": float(proto.get("gamma_over_omega1", 1.8e-4)),
            "pulse_tau_omega1": float(proto.get("pulse_tau_omega1", 12.0)),
        },
    }
    for name in ("qubit1", "qubit2", "qubit3"):
        resolved[name] = dict(scenario[name])
    return resolved


def resolve_scenario(scenario: dict) -> dict:
    """Materialize every derived quantity the run needs (flux, carrier, tau...).

    The returned dict is JSON-serializable and self-sufficient: running it
    skips re-resolution, which is what makes manifests reproducible.
    """
    kind = scenario["kind"]
    if kind in ("rabi_dynamics", "dephasing_study"):
        return _resolve_dynamics(scenario)
    if kind == "convergence_check":
        resolved = _resolve_dynamics(scenario)
        conv = scenario.get("converge", {})
        resolved["converge"] = {
            "delta_n_max": int(conv.get("delta_n_max", 5)),
            "tolerance": float(conv.get("tolerance", 1e-6)),
        }
        return resolved
    if kind == "spectrum_sweep":
        return _resolve_spectrum(scenario)
    if kind == "effective_compare":
        return _resolve_effective(scenario)
    if kind == "ghz_protocol":
        return _resolve_ghz(scenario)
    raise ValidationError(f"unknown scenario kind {kind!r}")


# ---------------------------------------------------------------------------
# Execution

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell, str) else _fmt(cell) for cell in row
        ))
    path.write_text("\n".join(lines) + "\n", newline="\n")


def _dynamics_series(resolved: dict, n_max: int | None = None,
                     dt_cap: float | None = None,
                     gamma_phi_over_gamma: float | None = None) -> TimeSeries:
    sys = resolved["system"]
    n_max = int(n_max if n_max is not None else sys["n_max"])
    solved = resolved["solved"]
    delta_nat = sys["delta_ghz"] / sys["omega1_ghz"]
    omega_q = solved["omega_q_over_omega1"]
    theta = math.acos(delta_nat / omega_q)
    h = rabi_hamiltonian(omega_q, sys["g1_over_omega1"], theta, n_max)
    basis = dressed_basis(h)
    dis = resolved["dissipation"]
    phi_factor = (dis["gamma_phi_over_gamma"]
                  if gamma_phi_over_gamma is None else gamma_phi_over_gamma)
    jumps = jump_set(basis, dis["kappa_over_omega1"], dis["gamma_over_omega1"],
                     phi_factor * dis["gamma_over_omega1"])
    drive = resolved["drive"]
    tau = drive["tau_omega1"]
    pulse = PulseSpec(drive["amplitude_area"], drive["carrier_omega1"],
                      5.0 * tau, tau)
    gs = basis.ground_state
    rho0 = np.outer(gs, gs.conj())
    run = resolved["run"]
    t_grid = np.linspace(0.0, run["duration_omega1"], run["samples"])
    ctrl = StepControl() if dt_cap is None else StepControl(dt_cap=dt_cap)
    problem = EvolutionProblem(h0=h, jumps=jumps, rho0=rho0, t_grid=t_grid,
                               drive=pulse, step_control=ctrl)
    return evolve(problem, basis, metadata={"n_max": n_max})


_DYNAMICS_COLUMNS = ("photon_number", "qubit_excitation", "g2", "g3",
                     "output_flux", "trace_error", "min_eigenvalue", "purity")


def _dynamics_rows(series: TimeSeries, prefix: tuple[str, ...] = ()):
    for i, t in enumerate(series.times):
        yield (*prefix, t, *(series.channels[c][i] for c in _DYNAMICS_COLUMNS))


def _run_dynamics(resolved: dict, out_dir: Path) -> tuple[list[str], dict]:
    series = _dynamics_series(resolved)
    _write_csv(out_dir / "dynamics.csv",
               ["time_omega1", *_DYNAMICS_COLUMNS],
               _dynamics_rows(series))
    peaks = find_oscillation_peaks(series.times, series.channel("photon_number"))
    invariants = {
        "breaches": series.metadata["invariant_breaches"],
        "max_trace_error": float(np.max(series.channel("trace_error"))),
        "min_eigenvalue": float(np.min(series.channel("min_eigenvalue"))),
        "first_photon_peak": (
            float(np.max(series.channel("photon_number"))) if peaks.size else None
        ),
    }
    return ["dynamics.csv"], invariants


def _run_dephasing(resolved: dict, out_dir: Path) -> tuple[list[str], dict]:
    if resolved["dissipation"]["gamma_phi_over_gamma"] <= 0:
        raise ValidationError(
            "dephasing_study needs dissipation.gamma_phi_over_gamma > 0"
        )
    dephased = _dynamics_series(resolved)
    reference = _dynamics_series(resolved, gamma_phi_over_gamma=0.0)

    def rows():
        yield from _dynamics_rows(reference, prefix=("reference",))
        yield from _dynamics_rows(dephased, prefix=("dephased",))

    _write_csv(out_dir / "dynamics.csv",
               ["variant", "time_omega1", *_DYNAMICS_COLUMNS], rows())
    invariants = {
        "breaches": (reference.metadata["invariant_breaches"]
                     + dephased.metadata["invariant_breaches"]),
        "reference_peaks": find_oscillation_peaks(
            reference.times, reference.channel("photon_number")).tolist(),
        "dephased_peaks": find_oscillation_peaks(
            dephased.times, dephased.channel("photon_number")).tolist(),
    }
    return ["dynamics.csv"], invariants


def _run_spectrum(resolved: dict, out_dir: Path) -> tuple[list[str], dict]:
    sys = resolved["system"]
    sw = resolved["sweep"]
    omega1 = sys["omega1_ghz"]
    delta_nat = sys["delta_ghz"] / omega1
    window = (sw["omega_q_min_ghz"] / omega1, sw["omega_q_max_ghz"] / omega1)

    def rows():
        for model in sw["models"]:
            sweep = sweeps.sweep_spectrum(
                delta_nat, sys["g1_over_omega1"], sys["n_max"], window,
                sw["n_levels"], rwa=(model == "jc"), n_grid=sw["n_grid"],
                gap_threshold=sw["gap_threshold"],
            )
            for i, wq in enumerate(sweep.omega_q_values):
                for m in range(sw["n_levels"]):
                    yield (wq * omega1, sweep.levels[i, m] * omega1,
                           model, sweep.characters[i][m])

    _write_csv(out_dir / "spectrum.csv",
               ["omega_q_ghz", "transition_ghz", "model", "character"], rows())
    return ["spectrum.csv"], {"breaches": []}


def _run_effective(resolved: dict, out_dir: Path) -> tuple[list[str], dict]:
    comp = resolved["compare"]
    rows_out = effective.splitting_comparison(
        comp["g_over_omega_q"], comp["theta_rad"], n_max=comp["n_max"])
    _write_csv(
        out_dir / "comparison.csv",
        ["g_over_omega_q", "analytic_2omega_over_omega_q",
         "numeric_2omega_over_omega_q", "rel_deviation"],
        ((r.g_over_omega_q, r.analytic, r.numeric, r.rel_deviation)
         for r in rows_out),
    )
    return ["comparison.csv"], {"breaches": []}


def _run_ghz(resolved: dict, out_dir: Path) -> tuple[list[str], dict]:
    res = resolved["resonator"]
    proto = resolved["protocol"]
    cfg = protocols.MultiQubitConfig(
        qubit1=protocols.GhzQubit(**resolved["qubit1"]),
        qubit2=protocols.GhzQubit(**resolved["qubit2"]),
        qubit3=protocols.GhzQubit(**resolved["qubit3"]),
        resonator=ResonatorSpec("half_wave", res["omega1_ghz"], res["n_max"]),
        kappa_over_omega1=proto["kappa_over_omega1"],
        gamma_over_omega1=proto["gamma_over_omega1"],
        pulse_tau=proto["pulse_tau_omega1"],
    )
    schedule = protocols.ghz_schedule(cfg, dissipation=proto["dissipation"])
    result = protocols.run_protocol(cfg, schedule, proto["dissipation"])
    payload = {
        "fidelity": result.fidelity,
        "fidelity_phase_optimized": result.fidelity_phase_optimized,
        "solved": schedule.solved,
        "segments": [
            {
                "label": snap.label,
                "duration_omega1": snap.duration,
                "omega_q_over_omega1": list(seg.omega_q),
                "purity": snap.purity,
                "resonator_vacuum_population": snap.resonator_vacuum_population,
                "fidelity_to_target": snap.fidelity_to_target,
                "leading_populations": snap.leading_populations,
            }
            for seg, snap in zip(schedule.segments, result.segments)
        ],
    }
    (out_dir / "protocol.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return ["protocol.json"], {"breaches": []}


def convergence_report(resolved: dict, delta_n_max: int = 5,
                       tolerance: float = 1e-6) -> dict:
    """Rerun the headline observables at n_max and n_max + delta and compare.

    Both runs share the time step of the refined truncation, so the reported
    drift isolates the truncation error instead of mixing in integrator
    differences.
    """
    kind = resolved["kind"]
    if kind == "spectrum_sweep":
        sys = resolved["system"]
        sw = resolved["sweep"]
        omega1 = sys["omega1_ghz"]
        delta_nat = sys["delta_ghz"] / omega1
        window = (sw["omega_q_min_ghz"] / omega1, sw["omega_q_max_ghz"] / omega1)
        n_levels = min(sw["n_levels"], 8)
        grids = []
        for n_max in (sys["n_max"], sys["n_max"] + delta_n_max):
            sweep = sweeps.sweep_spectrum(
                delta_nat, sys["g1_over_omega1"], n_max, window, n_levels,
                n_grid=min(sw["n_grid"], 100), densify=0)
            grids.append(sweep.levels)
        drift = float(np.max(np.abs(grids[0] - grids[1])))
        return {"kind": kind, "drift": drift, "tolerance": tolerance,
                "observable": f"lowest {n_levels} transition frequencies",
                "passed": bool(drift <= tolerance)}

    sys = resolved["system"]
    n_hi = sys["n_max"] + delta_n_max
    # Shared time step: take the refined model's frequency span.
    delta_nat = sys["delta_ghz"] / sys["omega1_ghz"]
    omega_q = resolved["solved"]["omega_q_over_omega1"]
    theta = math.acos(delta_nat / omega_q)
    h_hi = rabi_hamiltonian(omega_q, sys["g1_over_omega1"], theta, n_hi)
    w = np.linalg.eigvalsh(h_hi.data)
    span = float(w[-1] - w[0])
    dt_cap = 2.0 * math.pi / (StepControl().steps_per_period * span)
    base = _dynamics_series(resolved, n_max=sys["n_max"], dt_cap=dt_cap)
    refined = _dynamics_series(resolved, n_max=n_hi, dt_cap=dt_cap)
    drift = max(
        float(np.max(np.abs(base.channel(c) - refined.channel(c))))
        for c in ("photon_number", "qubit_excitation", "g2", "g3")
    )
    return {"kind": kind, "drift": drift, "tolerance": tolerance,
            "observable": "dynamics channels (photon, qubit, g2, g3)",
            "passed": bool(drift <= tolerance)}


def _run_convergence(resolved: dict, out_dir: Path) -> tuple[list[str], dict]:
    conv = resolved.get("converge", {"delta_n_max": 5, "tolerance": 1e-6})
    report = convergence_report(resolved, conv["delta_n_max"], conv["tolerance"])
    _write_csv(out_dir / "convergence.csv",
               ["observable", "drift", "tolerance", "passed"],
               [(report["observable"], report["drift"], report["tolerance"],
                 str(report["passed"]).lower())])
    invariants = {"breaches": [] if report["passed"] else
                  [f"truncation drift {report['drift']:.3e} above "
                   f"{report['tolerance']:.1e}"]}
    return ["convergence.csv"], invariants


_RUNNERS = {
    "rabi_dynamics": _run_dynamics,
    "dephasing_study": _run_dephasing,
    "spectrum_sweep": _run_spectrum,
    "effective_compare": _run_effective,
    "ghz_protocol": _run_ghz,
    "convergence_check": _run_convergence,
}


def run_resolved(resolved: dict, out_dir: Path, source: str = "") -> dict:
    """Execute a resolved plan, write artifacts and the manifest.

    Returns the manifest dict.  Raises :class:`InvariantBreach` when a run
    violates the physical invariants (after writing everything, so failures
    stay inspectable).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    artifacts, invariants = _RUNNERS[resolved["kind"]](resolved, out_dir)
    manifest = {
        "schema": "usc-rabi/manifest/v1",
        "kind": resolved["kind"],
        "source": source,
        "resolved": resolved,
        "conversions": {
            "frequency_unit": "omega_1 (angular) = 1; GHz inputs divided by omega1_ghz",
            "time_unit": "1/omega_1",
        },
        "artifacts": artifacts,
        "invariants": invariants,
        "wall_time_s": round(time.time() - started, 3),
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    if invariants.get("breaches"):
        raise InvariantBreach("; ".join(invariants["breaches"]))
    return manifest


def load_scenario_or_manifest(path: Path) -> tuple[dict, bool]:
    """Read a scenario file or a manifest; returns (plan, was_manifest)."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            manifest = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid manifest JSON: {exc}") from exc
        if "resolved" not in manifest:
            raise ParseError("manifest lacks a 'resolved' plan")
        return manifest["resolved"], True
    return parse_scenario(text), False


def run_scenario_file(path: str | Path, out_dir: str | Path,
                      n_max_override: int | None = None) -> dict:
    """Parse/resolve/run one scenario (or manifest) file end to end."""
    plan, was_manifest = load_scenario_or_manifest(Path(path))
    if was_manifest:
        resolved = plan
        if n_max_override is not None:
            raise ValidationError("cannot override n_max when running a manifest")
    else:
        if n_max_override is not None:
            if "system" in plan:
                plan["system"]["n_max"] = int(n_max_override)
            elif "resonator" in plan:
                plan["resonator"]["n_max"] = int(n_max_override)
        resolved = resolve_scenario(plan)
    return run_resolved(resolved, Path(out_dir), source=str(path))


def bundled_scenario_path(name: str) -> Path:
    """Path of a bundled scenario; accepts 'fig3' or 'fig3.scenario'."""
    if not name.endswith(".scenario"):
        name = name + ".scenario"
    path = Path(__file__).parent / "scenarios" / name
    if not path.exists():
        available = sorted(
            p.stem for p in (Path(__file__).parent / "scenarios").glob("*.scenario")
        )
        raise FileNotFoundError(
            f"no bundled scenario {name!r}; available: {', '.join(available)}"
        )
    return path
