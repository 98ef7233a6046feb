"""Pulse-level NMR simulation in the doubly rotating frame.

Conventions (fixed by requiring the preparation sequences to hit their targets):
an RF pulse [a]_b on qubit q is exp(-i a/2 (σx cos b + σy sin b)); a coupling
evolution of angle θ is exp(-i θ/2 σz⊗σz); sequences run left to right in time.
Chemical shifts and relaxation are not modelled.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from . import measures
from .qcore import (
    SZ,
    DensityMatrix,
    PureState,
    UnitaryOperator,
    apply_unitary,
    as_density_matrix,
    dephase,
    embed,
    pauli_on,
    rotation_operator,
)
from . import states

PI = math.pi
HALF_PI = PI / 2

# ---------------------------------------------------------------- events


@dataclass(frozen=True)
class RFPulse:
    qubit: int
    flip: float
    phase: float

    def __post_init__(self):
        if not (math.isfinite(self.flip) and math.isfinite(self.phase)):
            raise ValueError("RF flip angle and phase must be finite")
        if self.qubit < 1:
            raise ValueError("qubit indices start at 1")


@dataclass(frozen=True)
class JEvolution:
    """Free coupling evolution by angle θ, i.e. a delay of θ/(πJ) seconds."""

    theta: float
    pair: tuple[int, int] = (1, 2)

    def __post_init__(self):
        if not math.isfinite(self.theta) or self.theta < 0:
            raise ValueError("J evolution angle must be finite and >= 0; use PiSandwich for negative angles")

    def duration(self, system: "SpinSystem") -> float:
        return self.theta / (PI * system.coupling_hz)


@dataclass(frozen=True)
class GradientPulse:
    """Dephases every computational-basis coherence."""


@dataclass(frozen=True)
class PiSandwich:
    """[π]^q_0 - J(θ) - [π]^q_0: an effective coupling evolution by -θ."""

    qubit: int
    theta: float
    pair: tuple[int, int] = (1, 2)

    def __post_init__(self):
        if not math.isfinite(self.theta) or self.theta < 0:
            raise ValueError("π-sandwich angle must be finite and >= 0")

    def expand(self) -> tuple:
        flip = RFPulse(self.qubit, PI, 0.0)
        return flip, JEvolution(self.theta, self.pair), flip


PulseEvent = Union[RFPulse, JEvolution, GradientPulse, PiSandwich]


@dataclass(frozen=True)
class PulseSequence:
    events: tuple = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))

    def __iter__(self):
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __add__(self, other: "PulseSequence") -> "PulseSequence":
        label = "+".join(x for x in (self.label, other.label) if x)
        return PulseSequence(self.events + other.events, label)

    def flattened(self) -> tuple:
        out = []
        for ev in self.events:
            out.extend(ev.expand() if isinstance(ev, PiSandwich) else (ev,))
        return tuple(out)

    @property
    def is_unitary(self) -> bool:
        return not any(isinstance(ev, GradientPulse) for ev in self.events)


@dataclass(frozen=True)
class SpinSystem:
    """Thermal weights are relative gyromagnetic ratios (¹H : ¹³C ≈ 3.98 : 1)."""

    n_qubits: int = 2
    weights: tuple[float, ...] = (3.98, 1.0)
    coupling_hz: float = 214.95
    polarization: float = 1e-5

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.weights) != self.n_qubits:
            raise ValueError("need one thermal weight per qubit")
        if any(w <= 0 for w in self.weights):
            raise ValueError("thermal weights must be positive")
        if self.coupling_hz <= 0:
            raise ValueError("coupling constant J must be positive")
        if not 0 < self.polarization * sum(self.weights) <= 1:
            raise ValueError("polarization times the summed weights must lie in (0, 1]")


# ---------------------------------------------------------------- elementary operations

def rf_pulse_unitary(qubit: int, flip: float, phase: float, n: int = 2) -> UnitaryOperator:
    local = rotation_operator(flip, (math.cos(phase), math.sin(phase), 0.0))
    return embed(local, [qubit], n)


def j_evolution_unitary(theta: float, n: int = 2, pair: tuple[int, int] = (1, 2)) -> UnitaryOperator:
    if theta < 0:
        raise ValueError("J evolution angle must be >= 0")
    zz = np.diag(pauli_on(SZ, pair[0], n) @ pauli_on(SZ, pair[1], n)).real
    return UnitaryOperator(np.diag(np.exp(-0.5j * theta * zz)))


def gradient_pulse(rho: DensityMatrix | PureState) -> DensityMatrix:
    return dephase(rho)


def event_unitary(event, n: int) -> UnitaryOperator:
    if isinstance(event, RFPulse):
        if event.qubit > n:
            raise ValueError(f"pulse on qubit {event.qubit} but the system has {n} qubits")
        return rf_pulse_unitary(event.qubit, event.flip, event.phase, n)
    if isinstance(event, JEvolution):
        if max(event.pair) > n:
            raise ValueError(f"coupling pair {event.pair} outside a {n}-qubit system")
        return j_evolution_unitary(event.theta, n, event.pair)
    if isinstance(event, PiSandwich):
        a, b, c = (event_unitary(e, n) for e in event.expand())
        return c @ b @ a
    raise TypeError(f"{type(event).__name__} is not a unitary event")


def sequence_unitary(seq: PulseSequence | Iterable, n: int = 2) -> UnitaryOperator:
    """Product of the event unitaries, latest event leftmost."""
    u = UnitaryOperator.identity(2**n)
    for ev in seq:
        u = event_unitary(ev, n) @ u
    return u


def run_sequence(state: PureState | DensityMatrix, seq: PulseSequence | Iterable,
                 system: SpinSystem | None = None) -> PureState | DensityMatrix:
    """Apply the events in time order; a gradient turns a pure input into a density matrix."""
    n = state.n_qubits
    if system is not None and system.n_qubits != n:
        raise ValueError("state and spin system disagree on the qubit count")
    for ev in seq:
        if isinstance(ev, GradientPulse):
            state = gradient_pulse(state)
        else:
            state = apply_unitary(state, event_unitary(ev, n), range(1, n + 1))
    return state


# ---------------------------------------------------------------- preparation

def thermal_state(system: SpinSystem) -> DensityMatrix:
    """(1 + polarization Σ w_k σz_k) / 2^n."""
    n = system.n_qubits
    dev = sum(w * pauli_on(SZ, k, n) for k, w in enumerate(system.weights, start=1))
    return DensityMatrix((np.eye(2**n) + system.polarization * dev) / 2**n)


def pseudo_pure_sequence(system: SpinSystem | None = None) -> PulseSequence:
    """Spatial-averaging sequence towards λ·1 + ε|00><00|.

    The first flip angle is arccos(2 w2/w1), which is π/3 for a 4:1 weight
    ratio; it scales qubit 1's polarization down to exactly twice qubit 2's.
    """
    system = SpinSystem() if system is None else system
    if system.n_qubits != 2:
        raise ValueError("pseudo-pure preparation is implemented for two qubits")
    w1, w2 = system.weights
    if w1 < 2 * w2:
        raise ValueError("pseudo-pure sequence needs w1 >= 2 w2")
    return PulseSequence((
        RFPulse(1, math.acos(2 * w2 / w1), HALF_PI),
        GradientPulse(),
        RFPulse(1, PI / 4, HALF_PI),
        JEvolution(HALF_PI),
        RFPulse(1, PI / 4, 0.0),
        GradientPulse(),
    ), "pseudo-pure")


@dataclass(frozen=True)
class PseudoPureState:
    """ρ = background·1 + excess·|00><00| (only the deviation evolves visibly)."""

    rho: DensityMatrix
    background: float
    excess: float

    def effective(self, evolved: DensityMatrix) -> DensityMatrix:
        """Pure-state density matrix hidden in an evolved pseudo-pure ensemble."""
        m = evolved.matrix - self.background * np.eye(evolved.dim)
        m = (m + m.conj().T) / 2
        # dividing by ε ~ 1e-5 amplifies roundoff; renormalize the trace instead
        return DensityMatrix(m / np.trace(m).real)


def pseudo_pure_prep(system: SpinSystem | None = None) -> PseudoPureState:
    """Run the pseudo-pure sequence on the thermal state and split the result."""
    system = SpinSystem() if system is None else system
    rho = run_sequence(thermal_state(system), pseudo_pure_sequence(system), system)
    d = np.diag(rho.matrix).real
    background = float(np.mean(d[1:]))
    return PseudoPureState(rho, background, float(d[0] - background))


def _psi2_events(theta1: float, theta2: float) -> tuple:
    d = (theta1 - theta2) / 2
    middle = (JEvolution(d),) if d >= 0 else (PiSandwich(1, -d),)
    return (
        RFPulse(1, HALF_PI, HALF_PI),
        RFPulse(2, HALF_PI, 0.0),
        *middle,
        RFPulse(2, HALF_PI, -PI),
        RFPulse(2, (theta1 + theta2) / 2, HALF_PI),
    )


def _literal_psi_events() -> tuple:
    return (
        RFPulse(1, HALF_PI, -HALF_PI),
        RFPulse(1, HALF_PI, -PI),
        RFPulse(1, HALF_PI, HALF_PI),
        RFPulse(2, HALF_PI, -PI),
        RFPulse(2, HALF_PI, HALF_PI),
        JEvolution(HALF_PI),
        RFPulse(2, HALF_PI, HALF_PI),
    )


PRESET_PARAMS = {"phi": 0, "psi": 0, "psi-literal": 0, "phi-theta": 1, "psi-theta": 1, "psi2": 2}


def preset_sequence(name: str, params: Sequence[float] = ()) -> PulseSequence:
    """Preparation sequence from |00>.

    ``psi`` uses a π first pulse (with π/2 the sequence returns |00>);
    ``psi-literal`` keeps the π/2 version for comparison.
    """
    key = name.lower()
    if key not in PRESET_PARAMS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESET_PARAMS)}")
    params = tuple(float(p) for p in params)
    if len(params) != PRESET_PARAMS[key]:
        raise ValueError(f"preset {key!r} takes {PRESET_PARAMS[key]} parameter(s), got {len(params)}")
    if key == "phi":
        ev = (RFPulse(1, HALF_PI, HALF_PI), RFPulse(2, HALF_PI, HALF_PI))
    elif key == "psi-literal":
        ev = _literal_psi_events()
    elif key == "psi":
        ev = (RFPulse(1, PI, -HALF_PI),) + _literal_psi_events()[1:]
    elif key == "phi-theta":
        ev = (RFPulse(1, HALF_PI, HALF_PI), RFPulse(2, params[0], HALF_PI))
    elif key == "psi-theta":
        ev = _psi2_events(HALF_PI, params[0])
    else:
        ev = _psi2_events(*params)
    return PulseSequence(ev, key)


def preset_target(name: str, params: Sequence[float] = ()) -> PureState:
    key = name.lower()
    if key == "phi":
        return states.phi_state()
    if key in ("psi", "psi-literal"):
        return states.bell_state()
    if key == "phi-theta":
        return states.phi_theta(params[0])
    if key == "psi-theta":
        return states.psi_theta(params[0])
    if key == "psi2":
        return states.psi_pair(*params)
    raise ValueError(f"unknown preset {name!r}")


def transducer_sequence(phi1: float, phi2: float | None = None) -> PulseSequence:
    """[π]_{(-π-φ)/2} then [π/2]_{π/2} on each qubit; one qubit if ``phi2`` is None."""
    ev = [RFPulse(1, PI, (-PI - phi1) / 2), RFPulse(1, HALF_PI, HALF_PI)]
    if phi2 is not None:
        ev += [RFPulse(2, PI, (-PI - phi2) / 2), RFPulse(2, HALF_PI, HALF_PI)]
    return PulseSequence(tuple(ev), "transducer")


# ---------------------------------------------------------------- readout

@dataclass(frozen=True, eq=False)
class ReadoutRecord:
    """Populations after a gradient and the resonance lines of one observed qubit.

    ``lines[i]`` is p(qubit=0, spectators=i) - p(qubit=1, spectators=i), with the
    spectator qubits read as a binary number in ascending qubit order.
    """

    qubit: int
    populations: np.ndarray
    lines: np.ndarray

    def __post_init__(self):
        for name in ("populations", "lines"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def signal(self) -> float:
        """Integral over both lines, i.e. <σz> of the observed qubit."""
        return float(self.lines.sum())


def line_integrals(populations: np.ndarray, k: int) -> np.ndarray:
    n = int(np.log2(populations.size))
    p = np.moveaxis(populations.reshape((2,) * n), k - 1, 0).reshape(2, -1)
    return p[0] - p[1]


def readout_populations(rho: PureState | DensityMatrix, k: int, noise: float = 0.0,
                        rng: np.random.Generator | int | None = None,
                        reference: PseudoPureState | None = None) -> ReadoutRecord:
    """Gradient, then populations and the lines of qubit ``k``.

    With ``reference`` the populations are those of a pseudo-pure ensemble and
    are mapped back to the effective pure-state values (p - λ)/ε.
    """
    rho = as_density_matrix(rho)
    n = rho.n_qubits
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise ValueError(f"qubit index {k!r} out of range 1..{n}")
    pops = np.diag(gradient_pulse(rho).matrix).real.copy()
    if reference is not None:
        pops = (pops - reference.background) / reference.excess
    lines = line_integrals(pops, k)
    if noise > 0:
        lines = lines + np.random.default_rng(rng).normal(0.0, noise, lines.shape)
    return ReadoutRecord(k, pops, lines)


def measure_predictability(rho: PureState | DensityMatrix, k: int, noise: float = 0.0,
                           rng: np.random.Generator | int | None = None) -> float:
    return abs(readout_populations(rho, k, noise, rng).signal)


def ancilla_rotation(axis: Sequence[float], qubit: int) -> RFPulse:
    """RF pulse taking Bloch direction ``axis`` to +z (eigenbasis of b·σ to the computational one)."""
    bx, by, bz = (float(c) for c in axis)
    polar = math.atan2(math.hypot(bx, by), bz)
    return RFPulse(qubit, polar, math.atan2(by, bx) - HALF_PI)


def _as_pure(state: PureState | DensityMatrix) -> PureState:
    if isinstance(state, PureState):
        return state
    w, v = np.linalg.eigh(state.matrix)
    if w[-1] < 1 - 1e-9:
        raise ValueError("distinguishability readout needs a pure input state")
    return PureState(v[:, -1] / np.linalg.norm(v[:, -1]))


def measure_distinguishability(state: PureState | DensityMatrix, k: int,
                               axis: Sequence[float] | None = None, noise: float = 0.0,
                               rng: np.random.Generator | int | None = None) -> float:
    """Rotate the partner's optimal observable onto z, dephase, sum line magnitudes.

    ``axis`` overrides the optimal ancilla direction; when D = 0 every axis gives
    zero and z is used.
    """
    psi = _as_pure(state)
    if psi.n_qubits != 2:
        raise ValueError("distinguishability readout needs two qubits")
    if k not in (1, 2):
        raise ValueError(f"qubit index {k!r} out of range 1..2")
    j = 3 - k
    if axis is None:
        best = measures.distinguishability(psi, k).axis
        axis = (0.0, 0.0, 1.0) if best is None else best.to_array()
    rotated = run_sequence(psi, [ancilla_rotation(axis, j)])
    rec = readout_populations(rotated, k, noise, rng)
    return float(np.abs(rec.lines).sum())


# ---------------------------------------------------------------- pulse text format

class PulseParseError(ValueError):
    pass


_KV = re.compile(r"^([a-z]+)=(\S+)$")


def _fields(tokens: list[str], lineno: int, required: set[str]) -> dict[str, str]:
    out = {}
    for tok in tokens:
        m = _KV.match(tok)
        if not m:
            raise PulseParseError(f"line {lineno}: malformed field {tok!r}")
        out[m.group(1)] = m.group(2)
    if set(out) != required:
        raise PulseParseError(f"line {lineno}: expected fields {sorted(required)}, got {sorted(out)}")
    return out


def _num(text: str, lineno: int) -> float:
    try:
        val = float(text)
    except ValueError:
        raise PulseParseError(f"line {lineno}: {text!r} is not a number") from None
    if not math.isfinite(val):
        raise PulseParseError(f"line {lineno}: non-finite angle")
    return val


def _int(text: str, lineno: int) -> int:
    if not text.isdigit():
        raise PulseParseError(f"line {lineno}: qubit index {text!r} is not a positive integer")
    return int(text)


def parse_pulse_sequence(text: str, label: str = "") -> PulseSequence:
    """One event per line: ``RF q= flip= phase=``, ``J theta=``, ``GRAD``,
    ``PISANDWICH q= theta=``. Blank lines and ``#`` comments are ignored."""
    events = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        head = head.upper()
        try:
            if head == "RF":
                f = _fields(rest, lineno, {"q", "flip", "phase"})
                events.append(RFPulse(_int(f["q"], lineno), _num(f["flip"], lineno), _num(f["phase"], lineno)))
            elif head == "J":
                f = _fields(rest, lineno, {"theta"})
                events.append(JEvolution(_num(f["theta"], lineno)))
            elif head == "GRAD":
                if rest:
                    raise PulseParseError(f"line {lineno}: GRAD takes no fields")
                events.append(GradientPulse())
            elif head == "PISANDWICH":
                f = _fields(rest, lineno, {"q", "theta"})
                events.append(PiSandwich(_int(f["q"], lineno), _num(f["theta"], lineno)))
            else:
                raise PulseParseError(f"line {lineno}: unknown event {head!r}")
        except PulseParseError:
            raise
        except ValueError as exc:
            raise PulseParseError(f"line {lineno}: {exc}") from None
    return PulseSequence(tuple(events), label)


def format_pulse_sequence(seq: PulseSequence) -> str:
    lines = []
    for ev in seq:
        if isinstance(ev, RFPulse):
            lines.append(f"RF q={ev.qubit} flip={ev.flip!r} phase={ev.phase!r}")
        elif isinstance(ev, JEvolution):
            lines.append(f"J theta={ev.theta!r}")
        elif isinstance(ev, GradientPulse):
            lines.append("GRAD")
        elif isinstance(ev, PiSandwich):
            lines.append(f"PISANDWICH q={ev.qubit} theta={ev.theta!r}")
        else:
            raise TypeError(f"cannot format {type(ev).__name__}")
    return "\n".join(lines) + ("\n" if lines else "")
