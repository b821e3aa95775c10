"""Command-line front end.

Exit status: 0 on success, 2 for configuration errors, 3 for numerical
failures (degenerate couplings, ill-conditioned reductions, dimension cap),
4 when a single run's post-selection measurement fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .config import RunConfig, Sweep, load_config
from .dynamics import Propagator, StateVector
from .effective import FREE_DETUNINGS, closed_form_params, solve_resonance
from .errors import CavityGatesError, ConfigurationError, DimensionCapError, NumericalError
from .gates import effective_couplings, encode, run_gate, truth_table
from .hamiltonian import build_hamiltonian, preset_spec
from .hilbert import BasisState, enumerate_basis

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_MEASUREMENT = 0, 2, 3, 4

FIG4_HEADER = "t_g,pop_110a,pop_phi,pop_101a"
FIG5_HEADER = "delta_over_g,fidelity_raw,fidelity_conditional,t_int_g"
FIG4_POINTS = 401
FIG5_SWEEP = {"parameter": "Delta", "from": 5.0, "to": 40.0, "points": 36}

# reference Fredkin configuration used when fig4/fig5 get no --config
FREDKIN_DEFAULT = {
    "gate": "fredkin",
    "couplings": {"g": 1.0},
    "detunings": {"Delta": 20.0, "Delta3": "auto", "Delta6": "auto"},
}
DEFAULT_INPUT = {"iswap": (1, 0), "fredkin": (1, 0, 1), "fredkin-slow": (1, 0, 1), "xrot": (1,), "zrot": (1,)}


def fmt(x: float | None) -> str:
    """Round-trip decimal text; empty for a missing value."""
    return "" if x is None else format(float(x), ".17g")


def _write_csv(path: str | None, header: str, rows: Sequence[Sequence[float | None]], stdout: TextIO) -> None:
    text = header + "\n" + "".join(",".join(fmt(v) for v in row) + "\n" for row in rows)
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _write_json(path: str | None, record, stdout: TextIO) -> None:
    text = json.dumps(record, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


def _config(args, default: dict | None = None) -> RunConfig:
    if args.config:
        cfg = load_config(args.config)
    elif default is not None:
        cfg = RunConfig.model_validate(default)
    else:
        raise ConfigurationError(f"{args.command} needs --config")
    updates = {}
    if args.measure:
        updates["measure"] = True
    if args.phase_mode:
        updates["phase_mode"] = args.phase_mode
    if args.out:
        updates["output"] = args.out
    return cfg.model_copy(update=updates)


def _seconds(t: float, g_hz: float | None) -> float | None:
    return None if g_hz is None else t / (2 * math.pi * g_hz)


def cmd_run(cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    params = cfg.params()
    bits = tuple(cfg.input) if cfg.input is not None else DEFAULT_INPUT[cfg.gate]
    run = run_gate(cfg.gate, params, bits, measure=cfg.measure, phase_mode=cfg.phase_mode, theta=cfg.theta)
    record = run.to_record()
    record["effective"] = effective_couplings(cfg.gate, params)
    record["t_gate_s"] = _seconds(run.t_gate, cfg.g_hz)

    report = out if cfg.output else err
    print(f"gate        {cfg.gate}  input {bits}", file=report)
    for k, v in record["effective"].items():
        print(f"{k:<11} {v:.6g}", file=report)
    print(f"t_gate      {run.t_gate:.6g} /g" + (f"  ({record['t_gate_s']:.3g} s)" if cfg.g_hz else ""), file=report)
    print(f"fidelity    {run.fidelity_raw:.6f} ({cfg.phase_mode})", file=report)
    if run.measurement is not None:
        if run.measurement.succeeded:
            print(f"measured    p(a) = {run.measurement.success_probability:.6f}  "
                  f"conditional fidelity {run.fidelity_conditional:.6f}", file=report)
        else:
            print("measured    ancilla not found in level a: run aborted", file=report)
    _write_json(cfg.output, record, out)
    if run.measurement is not None and not run.measurement.succeeded:
        return EXIT_MEASUREMENT
    return EXIT_OK


def cmd_truth_table(cfg: RunConfig, out: TextIO, err: TextIO, threads: int = 1) -> int:
    params = cfg.params()
    table = truth_table(cfg.gate, params, measure=cfg.measure, phase_mode=cfg.phase_mode, theta=cfg.theta, threads=threads)
    report = out if cfg.output else err
    for r in table.rows:
        cond = "" if r.fidelity_conditional is None else f"  conditional {r.fidelity_conditional:.6f}"
        expected = " + ".join(f"({a.real:+.3g}{a.imag:+.3g}j)|{''.join(map(str, b))}>" for a, b in r.expected)
        print(f"|{''.join(map(str, r.input))}> -> {expected}  fidelity {r.fidelity_raw:.6f}{cond}", file=report)
    worst = table.worst
    print(f"worst row {worst.input}", file=report)
    record = {
        "gate": cfg.gate,
        "params": params,
        "t_gate": table.rows[0].t_gate,
        "phase_mode": cfg.phase_mode,
        "worst_input": list(worst.input),
        "rows": [r.to_record() for r in table.rows],
    }
    _write_json(cfg.output, record, out)
    return EXIT_OK


def cmd_resonance(cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    if cfg.gate not in FREE_DETUNINGS:
        raise ConfigurationError(f"{cfg.gate} has no resonance condition")
    free = FREE_DETUNINGS[cfg.gate]
    auto = cfg.model_copy(update={"detunings": {**cfg.detunings, **{k: "auto" for k in free}}})
    polish = cfg.polish or ("spectral" if cfg.gate == "fredkin-slow" else None)
    res = solve_resonance(cfg.gate, auto.params(), polish=polish)
    record = {
        "gate": cfg.gate,
        "polish": polish,
        "solved": {k: res.params[k] for k in free},
        "params": res.params,
        "effective": effective_couplings(cfg.gate, res.params),
        "residual_detunings": res.residuals.tolist(),
    }
    for k, v in record["solved"].items():
        print(f"{k} = {v:.17g}", file=out if cfg.output else err)
    _write_json(cfg.output, record, out)
    return EXIT_OK


def fig4_rows(cfg: RunConfig) -> list[tuple[float, float, float, float]]:
    """Populations of ``|110,a>``, the intermediate ``|phi>`` and ``|101,a>`` over time."""
    if cfg.gate != "fredkin":
        raise ConfigurationError("fig4 needs gate 'fredkin'")
    params = cfg.params()
    seed = encode("fredkin", (1, 1, 0))
    target = encode("fredkin", (1, 0, 1))
    phi = BasisState((0, 1, 0, 1, 0), "d", (0,))
    spec = preset_spec("fredkin", params)
    h = build_hamiltonian(spec, enumerate_basis(spec, seed))
    if cfg.time_grid is not None:
        times = cfg.time_grid.values()
    else:
        gp = closed_form_params("fredkin3", params)["g_prime"]
        times = np.linspace(0.0, 2 * math.pi / gp, FIG4_POINTS)
    amps = Propagator(h).trajectory(StateVector.basis_state(h.basis, seed), times)
    cols = [h.basis.index(s) for s in (seed, phi, target)]
    pops = np.abs(amps[:, cols]) ** 2
    return [(float(t), *map(float, p)) for t, p in zip(times, pops)]


def _fig5_point(cfg: RunConfig, delta: float):
    params = cfg.params(**{cfg.sweep.parameter: float(delta)})
    run = run_gate(cfg.gate, params, (1, 0, 1), measure=True, phase_mode=cfg.phase_mode)
    return (float(delta), run.fidelity_raw, run.fidelity_conditional, run.t_gate)


def fig5_rows(cfg: RunConfig, threads: int = 1) -> list[tuple]:
    """Fidelity of the swapping row ``|101> -> |110>`` across the detuning sweep."""
    if not cfg.gate.startswith("fredkin"):
        raise ConfigurationError("fig5 needs a Fredkin gate")
    if cfg.sweep is None:
        cfg = cfg.model_copy(update={"sweep": Sweep.model_validate(FIG5_SWEEP)})
    values = cfg.sweep.values()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda d: _fig5_point(cfg, d), values))
    return [_fig5_point(cfg, d) for d in values]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--measure", action="store_true", help="post-select the ancilla in level a")
    common.add_argument("--phase-mode", choices=("population", "strict"))
    common.add_argument("--threads", type=int, default=1, help="worker threads for tables and sweeps")
    common.add_argument("--dump-config", action="store_true", help="print the effective config and exit")

    parser = argparse.ArgumentParser(prog="cavitygates", description="Cavity-QED multiphoton gate simulator.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="simulate one logical input")
    sub.add_parser("fig4", parents=[common], help="population dynamics of the Fredkin swap (CSV)")
    sub.add_parser("fig5", parents=[common], help="Fredkin fidelity versus detuning (CSV)")
    sub.add_parser("truth-table", parents=[common], help="all logical inputs of a gate")
    sub.add_parser("resonance", parents=[common], help="solve the free detunings")
    return parser


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=err)
        return EXIT_CONFIG
    default = FREDKIN_DEFAULT if args.command in ("fig4", "fig5") else None
    try:
        cfg = _config(args, default)
        if args.dump_config:
            out.write(cfg.dump())
            return EXIT_OK
        if args.command == "run":
            return cmd_run(cfg, out, err)
        if args.command == "truth-table":
            return cmd_truth_table(cfg, out, err, threads=args.threads)
        if args.command == "resonance":
            return cmd_resonance(cfg, out, err)
        if args.command == "fig4":
            _write_csv(cfg.output, FIG4_HEADER, fig4_rows(cfg), out)
        else:
            _write_csv(cfg.output, FIG5_HEADER, fig5_rows(cfg, threads=args.threads), out)
        return EXIT_OK
    except (NumericalError, DimensionCapError) as exc:
        print(f"numerical error: {exc}", file=err)
        return EXIT_NUMERICAL
    except CavityGatesError as exc:
        print(f"configuration error: {exc}", file=err)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
