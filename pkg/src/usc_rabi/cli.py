"""Command-line entry points.

    usc-rabi run <file> [--out DIR] [--nmax N] [--emit-plot-script]
    usc-rabi selftest
    usc-rabi converge <file>

``run`` accepts a scenario file, the name of a bundled scenario (``fig3``),
or a previously written ``manifest.json`` (which reruns the embedded
resolved plan and reproduces the artifacts byte for byte).

Exit codes: 0 success, 2 parse error, 3 validation error, 4 numeric
failure, 5 invariant breach.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import scenarios
from .dressed import dressed_basis, jump_set
from .dynamics import EvolutionProblem, IntegrationError, evolve, observable_channels
from .linops import basis_vector, hermitian_eig
from .model import parity_operator, rabi_hamiltonian
from .scenarios import ScenarioError, bundled_scenario_path, run_scenario_file

_PLOT_SCRIPT = """\
#!/usr/bin/env python3
# Generic plotter for usc-rabi CSV artifacts (spectrum.csv / dynamics.csv /
# comparison.csv).  Usage: python plot_artifacts.py <csv file>
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1]
with open(path) as fh:
    rows = list(csv.DictReader(fh))
fields = rows[0].keys()

if "transition_ghz" in fields:
    for model in sorted({r["model"] for r in rows}):
        pts = [(float(r["omega_q_ghz"]), float(r["transition_ghz"]))
               for r in rows if r["model"] == model]
        style = "-" if model == "full" else "--"
        xs, ys = zip(*pts)
        plt.plot(xs, ys, style, ms=1, lw=0.8, label=model)
    plt.xlabel("qubit frequency (GHz)")
    plt.ylabel("transition frequency (GHz)")
elif "photon_number" in fields:
    variants = sorted({r.get("variant", "") for r in rows})
    for variant in variants:
        sel = [r for r in rows if r.get("variant", "") == variant]
        ts = [float(r["time_omega1"]) for r in sel]
        for channel in ("photon_number", "qubit_excitation", "g2"):
            plt.plot(ts, [float(r[channel]) for r in sel],
                     label=f"{channel} {variant}".strip())
    plt.xlabel("time (1/omega_1)")
elif "analytic_2omega_over_omega_q" in fields:
    xs = [float(r["g_over_omega_q"]) for r in rows]
    plt.plot(xs, [float(r["analytic_2omega_over_omega_q"]) for r in rows],
             "-", label="analytic")
    plt.plot(xs, [float(r["numeric_2omega_over_omega_q"]) for r in rows],
             "o", label="numeric")
    plt.xlabel("g / omega_q")
plt.legend()
plt.tight_layout()
plt.show()
"""


def _selftest_checks():
    """Analytic oracle suite; yields (name, deviation, tolerance)."""
    # Free exponential decay of a bare excited qubit.
    h = rabi_hamiltonian(1.3, 0.0, 0.0, 2)
    basis = dressed_basis(h)
    jumps = jump_set(basis, kappa=0.0, gamma=0.02)
    psi = basis_vector(h.layout, 1, 0)
    t = np.linspace(0.0, 120.0, 121)
    series = evolve(
        EvolutionProblem(h0=h, jumps=jumps, rho0=np.outer(psi, psi.conj()),
                         t_grid=t),
        basis,
    )
    exact = np.exp(-0.02 * t)
    dev = float(np.max(np.abs(series.channel("qubit_excitation") - exact) / exact))
    yield "free-decay exponential (relative)", dev, 1e-6

    # Jaynes-Cummings polariton splittings 2 g sqrt(n) at resonance.
    g = 0.08
    h_jc = rabi_hamiltonian(1.0, g, 0.0, 12, rwa=True)
    values = hermitian_eig(h_jc).values
    dev = 0.0
    for n in (1, 2, 3):
        # Doublet indices for the n-excitation block: levels 2n-1 and 2n.
        split = values[2 * n] - values[2 * n - 1]
        dev = max(dev, abs(split - 2.0 * g * math.sqrt(n)))
    yield "JC polariton splitting 2g sqrt(n)", dev, 1e-10

    # Fock-state correlation identities at g = 0.
    h0 = rabi_hamiltonian(0.77, 0.0, 0.0, 6)
    basis0 = dressed_basis(h0)
    dev = 0.0
    for n, (want_n, want_g2, want_g3) in ((2, (2, 2, 0)), (3, (3, 6, 6))):
        psi = basis_vector(h0.layout, 0, n)
        got = observable_channels(np.outer(psi, psi.conj()), basis0)
        dev = max(dev, abs(got["photon_number"] - want_n),
                  abs(got["g2"] - want_g2), abs(got["g3"] - want_g3))
    yield "Fock correlation identities n, n(n-1), n(n-1)(n-2)", dev, 1e-9

    # Dressed ground state is dark: no detectable photon flux.
    theta = math.acos(0.5625 / 1.9925)
    h_usc = rabi_hamiltonian(1.9925, 0.15, theta, 16)
    basis_usc = dressed_basis(h_usc)
    gs = basis_usc.ground_state
    flux = observable_channels(np.outer(gs, gs.conj()), basis_usc,
                               kappa=1.0)["output_flux"]
    yield "ground-state photon flux", abs(flux), 1e-12

    # Parity conservation of the zero-offset Rabi model.
    h_sym = rabi_hamiltonian(2.0, 0.2, 0.0, 12)
    parity = parity_operator(h_sym.layout).data
    comm = h_sym.data @ parity - parity @ h_sym.data
    scale = float(np.max(np.abs(h_sym.data)))
    yield "parity commutator at zero flux offset (relative)", \
        float(np.max(np.abs(comm))) / scale, 1e-12


def selftest(out=None) -> int:
    """Run the oracle suite; print one line per oracle; 0 iff all pass."""
    out = out if out is not None else sys.stdout
    failures = 0
    for name, deviation, tol in _selftest_checks():
        ok = deviation <= tol
        failures += 0 if ok else 1
        status = "pass" if ok else "FAIL"
        print(f"[{status}] {name}: deviation {deviation:.3e} "
              f"(tolerance {tol:.1e})", file=out)
    print(("selftest: all oracles passed" if failures == 0 else
           f"selftest: {failures} oracle(s) FAILED"), file=out)
    return 0 if failures == 0 else 1


def _locate(path_arg: str) -> Path:
    path = Path(path_arg)
    if path.exists():
        return path
    try:
        return bundled_scenario_path(path_arg)
    except FileNotFoundError as exc:
        raise ScenarioError(f"no such scenario file: {path_arg} ({exc})") from exc


def _cmd_run(args) -> int:
    path = _locate(args.scenario)
    out_dir = Path(args.out) if args.out else Path.cwd() / f"{path.stem}_out"
    manifest = run_scenario_file(path, out_dir, n_max_override=args.nmax)
    if args.emit_plot_script:
        (out_dir / "plot_artifacts.py").write_text(_PLOT_SCRIPT)
    names = ", ".join(manifest["artifacts"] + ["manifest.json"])
    print(f"wrote {names} to {out_dir}")
    return 0


def _cmd_converge(args) -> int:
    path = _locate(args.scenario)
    plan, was_manifest = scenarios.load_scenario_or_manifest(path)
    resolved = plan if was_manifest else scenarios.resolve_scenario(plan)
    if resolved["kind"] not in ("rabi_dynamics", "dephasing_study",
                                "spectrum_sweep", "convergence_check"):
        raise scenarios.ValidationError(
            f"converge supports dynamics and sweep scenarios, "
            f"not {resolved['kind']}"
        )
    conv = resolved.get("converge", {})
    report = scenarios.convergence_report(
        resolved,
        delta_n_max=int(conv.get("delta_n_max", 5)),
        tolerance=float(conv.get("tolerance", 1e-6)),
    )
    print(f"observable: {report['observable']}")
    print(f"max drift at n_max+{conv.get('delta_n_max', 5)}: "
          f"{report['drift']:.3e} (tolerance {report['tolerance']:.1e})")
    if not report["passed"]:
        print("convergence gate FAILED")
        return 5
    print("convergence gate passed")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="usc-rabi",
        description="Multiphoton vacuum Rabi oscillations in ultrastrong-"
                    "coupling cavity QED: scenario runner.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario or manifest file")
    p_run.add_argument("scenario", help="path, bundled name (fig3), or manifest.json")
    p_run.add_argument("--out", help="output directory (default <name>_out)")
    p_run.add_argument("--nmax", type=int, default=None,
                       help="override the Fock cutoff")
    p_run.add_argument("--emit-plot-script", action="store_true",
                       help="also write a generic matplotlib plotting script")
    p_run.set_defaults(func=_cmd_run)

    p_self = sub.add_parser("selftest", help="run the analytic oracle suite")
    p_self.set_defaults(func=lambda args: selftest())

    p_conv = sub.add_parser("converge",
                            help="rerun a scenario at n_max+5 and report drift")
    p_conv.add_argument("scenario")
    p_conv.set_defaults(func=_cmd_converge)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except IntegrationError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4
    except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
