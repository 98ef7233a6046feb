"""Command-line harness.

Exit codes: 0 success, 1 a relation failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import experiments, formats, interferometer as itf, measures, nmr, states
from .qcore import DensityMatrix, PureState, random_mixed_state, random_pure_state

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Raised for anything the user can fix by changing the command line or files."""


# ---------------------------------------------------------------- presets

def _exact(params, count, name):
    if len(params) != count:
        raise InputError(f"preset {name!r} takes {count} parameter(s), got {len(params)}")
    return params


def _qubit_count(params, name):
    v = _exact(params, 1, name)[0]
    if v != int(v) or v < 1:
        raise InputError(f"preset {name!r}: qubit count must be a positive integer")
    return int(v)


def _fixed(factory, count, name):
    return lambda p, seed: factory(*_exact(p, count, name))


def _preset_ghz(p, seed):
    if len(p) not in (1, 3):
        raise InputError("preset 'ghz' takes n [a1 a2]")
    n = _qubit_count(p[:1], "ghz")
    a = p[1:] or [1 / math.sqrt(2)] * 2
    return states.ghz_state(n, *a)


def _preset_w(p, seed):
    if len(p) == 1:
        n = _qubit_count(p, "w")
        return states.w_state([1 / math.sqrt(n)] * n)
    if len(p) < 2:
        raise InputError("preset 'w' takes n (equal weights) or coefficients a1..an")
    return states.w_state(p)


def _preset_product(p, seed):
    if not p:
        raise InputError("preset 'product' needs at least one angle")
    return states.product_state(p)


PRESETS: dict[str, Callable[[list[float], int | None], PureState | DensityMatrix]] = {
    "phi": _fixed(states.phi_state, 0, "phi"),
    "bell": _fixed(states.bell_state, 0, "bell"),
    "psi": _fixed(states.bell_state, 0, "psi"),
    "plus": _fixed(states.plus, 0, "plus"),
    "complex-example": _fixed(states.complex_example_state, 0, "complex-example"),
    "phi-theta": _fixed(states.phi_theta, 1, "phi-theta"),
    "psi-theta": _fixed(states.psi_theta, 1, "psi-theta"),
    "psi2": _fixed(states.psi_pair, 2, "psi2"),
    "ghz": _preset_ghz,
    "w": _preset_w,
    "product": _preset_product,
    "random": lambda p, seed: random_pure_state(_qubit_count(p, "random"), seed),
    "random-mixed": lambda p, seed: random_mixed_state(_qubit_count(p, "random-mixed"), seed),
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs, resolved from the command line."""

    command: str
    state_file: str | None = None
    preset: str | None = None
    params: tuple[float, ...] = ()
    steps: int = itf.FRINGE_STEPS
    noise: float = 0.0
    seed: int | None = None
    tol: float | None = None
    out: str | None = None

    def __post_init__(self):
        if self.state_file is not None and self.preset is not None:
            raise InputError("give either --state or --preset, not both")
        if self.tol is not None and not self.tol > 0:
            raise InputError("--tol must be positive")
        if self.noise < 0:
            raise InputError("--noise must be >= 0")

    def load_state(self) -> PureState | DensityMatrix:
        if self.state_file is not None:
            return formats.load_state(self.state_file)
        if self.preset is None:
            raise InputError("a state source is required (--state FILE or --preset NAME)")
        name = self.preset.lower()
        if name not in PRESETS:
            raise InputError(f"unknown preset {self.preset!r}; choose from {', '.join(sorted(PRESETS))}")
        return PRESETS[name](list(self.params), self.seed)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _two_qubit_pure(state) -> PureState:
    if not isinstance(state, PureState) or state.n_qubits != 2:
        raise InputError("this command needs a two-qubit pure state")
    return state


# ---------------------------------------------------------------- commands

def cmd_verify(cfg: RunConfig, records_path: str | None = None) -> int:
    state = cfg.load_state()
    report = measures.verify_relations(state, tolerance=cfg.tol)
    _emit(formats.report_table(report), cfg.out)
    if records_path:
        _emit(formats.jsonl(formats.report_records(report)), records_path)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_fringes(cfg: RunConfig, sweep: str, alpha, xi, fixed: float, fit: bool) -> int:
    state = cfg.load_state()
    if state.n_qubits != 2:
        raise InputError("fringe scans need a two-qubit state")
    config = itf.TransducerConfig(alpha=tuple(alpha), xi=tuple(xi))
    scan = itf.sweep_fringes(state, config, sweep=sweep, steps=cfg.steps, fixed=fixed,
                             noise=cfg.noise, rng=cfg.seed)
    _emit(scan.to_csv(), cfg.out)
    if fit:
        # p̄ oscillates in φ1+φ2 on a joint sweep
        x_joint = scan.phi1 + scan.phi2 if sweep == "joint" else scan.phases
        rows = []
        for label, x in (("p(0_1)", scan.phases), ("p(0_2)", scan.phases), ("pbar(00)", x_joint)):
            f = itf.fit_cosine(x, scan.series(label))
            rows.append((label, f.amplitude, f.baseline, f.visibility))
        table = formats.text_table(("channel", "A", "B", "visibility"), rows)
        (sys.stdout if cfg.out else sys.stderr).write(table)
    return EXIT_OK


def cmd_theta_grid(cfg: RunConfig, start: float, stop: float, points: int, theta_sum: float) -> int:
    if points < 1:
        raise InputError("θ grid is empty (--points must be >= 1)")
    config = experiments.ThetaGridConfig(start=start, stop=stop, points=points, theta_sum=theta_sum,
                                         scan_steps=cfg.steps, noise=cfg.noise, seed=cfg.seed)
    result = experiments.run_theta_grid(config)
    _emit(formats.csv_text(experiments.THETA_COLUMNS, (r.values() for r in result.rows)), cfg.out)
    summary = formats.text_table(("fit", "radius"), result.radii().items())
    (sys.stdout if cfg.out else sys.stderr).write(summary)
    return EXIT_OK


NMR_COLUMNS = ("label", "qubit", "populations", "lines", "signal")


def cmd_nmr(cfg: RunConfig, sequence: str | None, pulses: str | None, pseudo_pure: bool,
            measure: str, qubit: int | None, grid: bool, angles: Sequence[float] = ()) -> int:
    if (sequence is None) == (pulses is None):
        raise InputError("give exactly one of --sequence or --pulses")
    qubits = (qubit,) if qubit else (1, 2)
    if grid:
        return _nmr_grid(cfg, sequence, measure, qubits)
    if pulses is not None:
        try:
            with open(pulses, encoding="utf-8") as fh:
                seq = nmr.parse_pulse_sequence(fh.read(), pulses)
        except OSError as exc:
            raise InputError(f"cannot read pulse file: {exc}") from None
    else:
        try:
            seq = nmr.preset_sequence(sequence, angles)
        except ValueError as exc:
            raise InputError(str(exc)) from None

    reference = None
    if cfg.state_file is not None or cfg.preset is not None:
        start = cfg.load_state()
    elif pseudo_pure:
        reference = nmr.pseudo_pure_prep(nmr.SpinSystem())
        start = reference.rho
    else:
        start = PureState.basis("00")
    try:
        final = nmr.run_sequence(start, seq)
    except (ValueError, TypeError) as exc:
        raise InputError(f"sequence does not fit the state: {exc}") from None
    if reference is not None:
        final = reference.effective(final)

    rng = np.random.default_rng(cfg.seed)
    rows = []
    for k in qubits:
        if k > final.n_qubits:
            raise InputError(f"--qubit {k} outside a {final.n_qubits}-qubit state")
        if measure == "distinguishability":
            value = nmr.measure_distinguishability(final, k, noise=cfg.noise, rng=rng)
            rows.append((seq.label or "pulses", k, "", "", repr(value)))
            continue
        rec = nmr.readout_populations(final, k, cfg.noise, rng)
        value = abs(rec.signal) if measure == "predictability" else rec.signal
        rows.append((seq.label or "pulses", k, " ".join(repr(float(p)) for p in rec.populations),
                     " ".join(repr(float(v)) for v in rec.lines), repr(float(value))))
    _emit(formats.csv_text(NMR_COLUMNS, rows), cfg.out)
    return EXIT_OK


GRID_COLUMNS = ("theta", "qubit", "measured", "analytic")


def _nmr_grid(cfg: RunConfig, sequence: str | None, measure: str, qubits) -> int:
    if sequence not in ("phi-theta", "psi-theta"):
        raise InputError("--grid works with --sequence phi-theta or psi-theta")
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for theta in np.linspace(0, math.pi, 9):
        state = nmr.run_sequence(PureState.basis("00"), nmr.preset_sequence(sequence, (theta,)))
        for k in qubits:
            if measure == "distinguishability":
                got = nmr.measure_distinguishability(state, k, noise=cfg.noise, rng=rng)
                ref = measures.distinguishability(state, k).D
            else:
                got = nmr.measure_predictability(state, k, cfg.noise, rng)
                ref = measures.predictability(state, k)
            rows.append((float(theta), k, float(got), float(ref)))
    _emit(formats.csv_text(GRID_COLUMNS, rows), cfg.out)
    return EXIT_OK


def cmd_max_v12(cfg: RunConfig) -> int:
    state = _two_qubit_pure(cfg.load_state())
    value, best = itf.maximize_v12(state)
    rows = [
        ("V12_max", value),
        ("C", measures.concurrence_pure(state)),
        ("V12_sym", itf.two_particle_visibility(state)),
        ("alpha1", best.alpha[0]), ("xi1", best.xi[0]),
        ("alpha2", best.alpha[1]), ("xi2", best.xi[1]),
    ]
    _emit(formats.csv_text(("quantity", "value"), rows), cfg.out)
    tol = cfg.tol if cfg.tol is not None else measures.V12_MAX_TOL
    return EXIT_OK if abs(value - rows[1][1]) <= tol else EXIT_FAIL


# ---------------------------------------------------------------- argument parsing

def _add_common(p: argparse.ArgumentParser, state: bool = True) -> None:
    if state:
        src = p.add_mutually_exclusive_group()
        src.add_argument("--state", metavar="FILE", help="JSON state file")
        src.add_argument("--preset", metavar="NAME", help=f"named state: {', '.join(sorted(PRESETS))}")
        p.add_argument("--params", type=float, nargs="*", default=[], metavar="X",
                       help="preset parameters (radians for angles)")
    p.add_argument("--steps", type=int, default=itf.FRINGE_STEPS, help="phase points per sweep (default 33)")
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma (default 0)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed")
    p.add_argument("--tol", type=float, default=None, help="override every relation tolerance")
    p.add_argument("--out", metavar="FILE", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="complementarity",
                                     description="Complementarity relations: verification and simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="evaluate every applicable relation on a state")
    _add_common(p)
    p.add_argument("--records", metavar="FILE", help="also write JSONL records here")

    p = sub.add_parser("fringes", help="phase sweep through the interferometer")
    _add_common(p)
    p.add_argument("--sweep", choices=("joint", "phi1", "phi2"), default="joint")
    p.add_argument("--fixed", type=float, default=math.pi / 2, help="held phase for single sweeps")
    p.add_argument("--alpha", type=float, nargs=2, default=[math.pi / 2] * 2, metavar=("A1", "A2"))
    p.add_argument("--xi", type=float, nargs=2, default=[math.pi / 2] * 2, metavar=("X1", "X2"))
    p.add_argument("--fit", action="store_true", help="report fitted visibilities")

    p = sub.add_parser("theta-grid", help="θ-family experiment with circle fits")
    _add_common(p, state=False)
    p.add_argument("--start", type=float, default=-math.pi / 4)
    p.add_argument("--stop", type=float, default=3 * math.pi / 4)
    p.add_argument("--points", type=int, default=9)
    p.add_argument("--theta-sum", type=float, default=math.pi / 2)

    p = sub.add_parser("nmr", help="simulate a pulse sequence and read out")
    _add_common(p)  # --state/--preset here set the input state (default |00>)
    p.add_argument("--sequence", metavar="NAME", help=f"preset: {', '.join(nmr.PRESET_PARAMS)}")
    p.add_argument("--angles", type=float, nargs="*", default=[], metavar="THETA",
                   help="parameters of the sequence preset (radians)")
    p.add_argument("--pulses", metavar="FILE", help="pulse-sequence text file")
    p.add_argument("--pseudo-pure", action="store_true", help="start from the simulated pseudo-pure state")
    p.add_argument("--measure", choices=("populations", "predictability", "distinguishability"),
                   default="populations")
    p.add_argument("--qubit", type=int, choices=(1, 2), default=None)
    p.add_argument("--grid", action="store_true", help="scan θ in [0, π] for phi-theta / psi-theta")

    p = sub.add_parser("max-v12", help="maximize the two-particle visibility over beam splitters")
    _add_common(p)
    return parser


def _config(args) -> RunConfig:
    return RunConfig(command=args.command, state_file=getattr(args, "state", None),
                     preset=getattr(args, "preset", None), params=tuple(getattr(args, "params", ()) or ()),
                     steps=args.steps, noise=args.noise, seed=args.seed, tol=args.tol, out=args.out)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "verify":
            return cmd_verify(cfg, args.records)
        if args.command == "fringes":
            return cmd_fringes(cfg, args.sweep, args.alpha, args.xi, args.fixed, args.fit)
        if args.command == "theta-grid":
            return cmd_theta_grid(cfg, args.start, args.stop, args.points, args.theta_sum)
        if args.command == "nmr":
            return cmd_nmr(cfg, args.sequence, args.pulses, args.pseudo_pure, args.measure,
                           args.qubit, args.grid, args.angles)
        return cmd_max_v12(cfg)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
