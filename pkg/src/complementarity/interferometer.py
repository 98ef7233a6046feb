"""Two-particle interferometer: transducers, detection statistics, fringes and fits.

Each qubit passes a phase shifter exp(-i φ/2 σz) followed by a beam splitter
exp(i α/2 (σx cos ξ + σy sin ξ)); both paths are then detected in the
computational basis. Everything here is a pure function of its inputs.

The central object is the connected correlation tensor
``T_ab = <σa⊗σb> - <σa><σb>``. With detection axes n1, n2 (Heisenberg images of
σz), the corrected joint probability is ``1/4 + (-1)^(x+y) n1·T·n2 / 4``, which
lets fringe extrema be found without sampling the phase torus.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .qcore import (
    PAULIS,
    SZ,
    DensityMatrix,
    PureState,
    UnitaryOperator,
    as_density_matrix,
    rotation_operator,
)

HALF_PI = math.pi / 2
FRINGE_STEPS = 33
SCAN_COLUMNS = ("phase", "p(0_1)", "p(1_1)", "p(0_2)", "p(1_2)",
                "pbar(00)", "pbar(01)", "pbar(10)", "pbar(11)")

_EXTREMA_GRID = 512
_BRENT_XATOL = 1e-12


# ---------------------------------------------------------------- configuration

@dataclass(frozen=True)
class TransducerConfig:
    """Beam-splitter flip ``alpha``, axis phase ``xi`` and phase shift ``phi`` per qubit."""

    alpha: tuple[float, float] = (HALF_PI, HALF_PI)
    xi: tuple[float, float] = (HALF_PI, HALF_PI)
    phi: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        for name in ("alpha", "xi", "phi"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) != 2 or not all(math.isfinite(v) for v in vals):
                raise ValueError(f"{name} needs two finite angles")
            object.__setattr__(self, name, vals)

    @classmethod
    def symmetric(cls, phi1: float = 0.0, phi2: float = 0.0) -> "TransducerConfig":
        return cls(phi=(phi1, phi2))

    def with_phases(self, phi1: float, phi2: float) -> "TransducerConfig":
        return replace(self, phi=(phi1, phi2))

    @property
    def is_symmetric(self) -> bool:
        return all(abs(a - HALF_PI) < 1e-15 for a in self.alpha) and all(
            abs(math.remainder(x - HALF_PI, 2 * math.pi)) < 1e-15 for x in self.xi)

    def unitary(self, k: int) -> UnitaryOperator:
        return transducer(self.alpha[k - 1], self.xi[k - 1], self.phi[k - 1])

    def axis(self, k: int) -> np.ndarray:
        """Detection axis with zero phase shift: U†σzU as a Bloch vector."""
        return detection_axis(self.alpha[k - 1], self.xi[k - 1])


def transducer(alpha: float, xi: float, phi: float) -> UnitaryOperator:
    splitter = rotation_operator(-alpha, (math.cos(xi), math.sin(xi), 0.0))
    shifter = rotation_operator(phi, (0.0, 0.0, 1.0))
    return UnitaryOperator(splitter @ shifter)


def detection_axis(alpha: float, xi: float, phi: float = 0.0) -> np.ndarray:
    u = transducer(alpha, xi, phi).matrix
    heis = u.conj().T @ SZ @ u
    return np.array([0.5 * np.trace(heis @ p).real for p in PAULIS])


def axis_to_splitter(m: Sequence[float]) -> tuple[float, float]:
    """(alpha, xi) whose zero-phase detection axis is the unit vector ``m``."""
    mx, my, mz = (float(c) for c in m)
    return math.atan2(math.hypot(mx, my), mz), math.atan2(mx, -my)


def _rotate_z(v: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Axes R_z(-phi) v for an array of phases, shape (len(phi), 3)."""
    c, s = np.cos(phi), np.sin(phi)
    return np.stack([c * v[0] + s * v[1], -s * v[0] + c * v[1], np.full_like(c, v[2])], axis=-1)


# ---------------------------------------------------------------- correlations

def local_bloch_vectors(state: PureState | DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    rho = _two_qubit_rho(state)
    i2 = np.eye(2)
    s1 = np.array([np.trace(rho @ np.kron(p, i2)).real for p in PAULIS])
    s2 = np.array([np.trace(rho @ np.kron(i2, p)).real for p in PAULIS])
    return s1, s2


def correlation_tensor(state: PureState | DensityMatrix) -> np.ndarray:
    """Connected correlations T_ab = <σa⊗σb> - <σa⊗1><1⊗σb>."""
    rho = _two_qubit_rho(state)
    s1, s2 = local_bloch_vectors(state)
    k = np.array([[np.trace(rho @ np.kron(a, b)).real for b in PAULIS] for a in PAULIS])
    return k - np.outer(s1, s2)


def _two_qubit_rho(state) -> np.ndarray:
    rho = as_density_matrix(state)
    if rho.n_qubits != 2:
        raise ValueError("the interferometer handles two-qubit states only")
    return rho.matrix


# ---------------------------------------------------------------- detection

@dataclass(frozen=True)
class DetectionProbabilities:
    """``single[k-1, x]`` = p(|x>_k); ``joint[x, y]`` = p(|x>_1|y>_2)."""

    joint: np.ndarray

    @property
    def single(self) -> np.ndarray:
        return np.stack([self.joint.sum(axis=1), self.joint.sum(axis=0)])

    @property
    def corrected(self) -> np.ndarray:
        s = self.single
        return self.joint - np.outer(s[0], s[1]) + 0.25


def detection_probabilities(state: PureState | DensityMatrix, config: TransducerConfig,
                            basis: tuple[np.ndarray, np.ndarray] | None = None
                            ) -> DetectionProbabilities:
    """Output-channel statistics after both transducers.

    ``basis`` optionally replaces the computational detection basis of each
    qubit by the columns of a 2x2 unitary.
    """
    rho = _two_qubit_rho(state)
    u = [config.unitary(k).matrix for k in (1, 2)]
    if basis is not None:
        u = [np.asarray(w, dtype=complex).conj().T @ uk for w, uk in zip(basis, u)]
    full = np.kron(u[0], u[1])
    p = np.clip(np.diag(full @ rho @ full.conj().T).real, 0.0, None)
    return DetectionProbabilities((p / p.sum()).reshape(2, 2))


def corrected_joint_probability(state: PureState | DensityMatrix, config: TransducerConfig) -> np.ndarray:
    """p̄(x, y) = p(xy) - p(x)p(y) + 1/4, as a 2x2 array indexed [x, y]."""
    return detection_probabilities(state, config).corrected


@dataclass(frozen=True)
class MNCoefficients:
    M: complex
    N: complex

    @property
    def xi1(self) -> float:
        return float(np.angle(self.M))

    @property
    def xi2(self) -> float:
        return float(np.angle(self.N))

    @property
    def visibility(self) -> float:
        return 2 * (abs(self.M) + abs(self.N))


def mn_coefficients(state: PureState) -> MNCoefficients:
    if not isinstance(state, PureState) or state.n_qubits != 2:
        raise ValueError("mn_coefficients needs a two-qubit PureState")
    g1, g2, g3, g4 = state.amplitudes
    c1 = g1 * np.conj(g3) + g2 * np.conj(g4)
    c2 = g1 * np.conj(g2) + g3 * np.conj(g4)
    return MNCoefficients(complex(g1 * np.conj(g4) - c1 * c2),
                          complex(g2 * np.conj(g3) - c1 * np.conj(c2)))


# ---------------------------------------------------------------- visibilities

def single_particle_visibility(state: PureState | DensityMatrix, config: TransducerConfig, k: int) -> float:
    """Fringe contrast of p(|0>_k) as φ_k runs over a full period.

    The axis sweeps a cone about z, so p = (1 + m_z s_z + ρ_m |s_⊥| cos(...))/2.
    """
    if k not in (1, 2):
        raise ValueError(f"qubit index {k!r} out of range 1..2")
    s = local_bloch_vectors(state)[k - 1]
    m = config.axis(k)
    base = 1 + m[2] * s[2]
    amp = math.hypot(m[0], m[1]) * math.hypot(s[0], s[1])
    return 0.0 if base < 1e-15 else float(amp / base)


def _phi1_profile(t: np.ndarray, m1: np.ndarray, m2: np.ndarray, phi1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Max and min over φ2 of n1(φ1)·T·n2(φ2), for an array of φ1."""
    w = _rotate_z(m1, np.atleast_1d(phi1)) @ t
    centre = w[:, 2] * m2[2]
    spread = math.hypot(m2[0], m2[1]) * np.hypot(w[:, 0], w[:, 1])
    return centre + spread, centre - spread


def correlation_extrema(state: PureState | DensityMatrix, config: TransducerConfig) -> tuple[float, float]:
    """Extremes of n1·T·n2 over the phase torus (coarse grid, then bounded Brent)."""
    t = correlation_tensor(state)
    m1, m2 = config.axis(1), config.axis(2)
    grid = np.linspace(0, 2 * np.pi, _EXTREMA_GRID, endpoint=False)
    hi, lo = _phi1_profile(t, m1, m2, grid)
    step = grid[1] - grid[0]
    out = []
    # sign -1 maximizes the upper envelope, +1 minimizes the lower one
    for values, sign, pick in ((hi, -1.0, 0), (lo, 1.0, 1)):
        i = int(np.argmin(sign * values))
        res = minimize_scalar(lambda x: sign * _phi1_profile(t, m1, m2, x)[pick][0],
                              bounds=(grid[i] - step, grid[i] + step), method="bounded",
                              options={"xatol": _BRENT_XATOL})
        out.append(sign * min(sign * values[i], res.fun))
    return float(out[0]), float(out[1])


def two_particle_visibility(state: PureState | DensityMatrix, config: TransducerConfig | None = None) -> float:
    """Contrast of the corrected joint fringe p̄(00) over the phase torus."""
    config = TransducerConfig.symmetric() if config is None else config
    gmax, gmin = correlation_extrema(state, config)
    denom = 2 + gmax + gmin
    return 0.0 if denom < 1e-15 else float((gmax - gmin) / denom)


def _splitter_config(params: Sequence[float]) -> TransducerConfig:
    a1, x1, a2, x2 = params
    return TransducerConfig(alpha=(a1, a2), xi=(x1, x2))


def maximize_v12(state: PureState, polish: bool | None = None) -> tuple[float, TransducerConfig]:
    """Largest corrected two-particle visibility over all beam-splitter settings.

    The optimum comes in closed form from the SVD of T (singular values C, C, C²):
    put detector 1 on the equator of the top singular plane and point detector 2
    along Tᵀ m1. ``polish=None`` runs a Nelder-Mead polish only when the closed
    form misses the concurrence; ``True`` always polishes.
    """
    if not isinstance(state, PureState) or state.n_qubits != 2:
        raise ValueError("maximize_v12 needs a two-qubit PureState")
    g = state.amplitudes
    conc = float(2 * abs(g[0] * g[3] - g[1] * g[2]))
    sym = TransducerConfig.symmetric()
    if conc < 1e-9:
        return two_particle_visibility(state, sym), sym

    t = correlation_tensor(state)
    u, _, _ = np.linalg.svd(t)
    m1 = np.cross([0.0, 0.0, 1.0], u[:, 2])
    if np.linalg.norm(m1) < 1e-9:
        m1 = np.array([1.0, 0.0, 0.0])
    m1 /= np.linalg.norm(m1)
    m2 = t.T @ m1
    m2 /= np.linalg.norm(m2)
    (a1, x1), (a2, x2) = axis_to_splitter(m1), axis_to_splitter(m2)
    best_cfg = TransducerConfig(alpha=(a1, a2), xi=(x1, x2))
    best = two_particle_visibility(state, best_cfg)

    sym_val = two_particle_visibility(state, sym)
    if sym_val > best:
        best, best_cfg = sym_val, sym

    if polish or (polish is None and abs(best - conc) > 1e-9):
        res = minimize(lambda p: -two_particle_visibility(state, _splitter_config(p)),
                       [*best_cfg.alpha[:1], best_cfg.xi[0], best_cfg.alpha[1], best_cfg.xi[1]],
                       method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 2000})
        if -res.fun > best:
            best, best_cfg = float(-res.fun), _splitter_config(res.x)

    if abs(best - conc) > 1e-4:
        raise ArithmeticError(f"V12 maximization stalled at {best:.6f}, concurrence is {conc:.6f}")
    return best, best_cfg


# ---------------------------------------------------------------- fringe scans

@dataclass(frozen=True, eq=False)
class FringeScan:
    """Detection statistics along a phase sweep.

    Arrays are indexed by sweep point first: ``single[i, k-1, x]``,
    ``joint[i, x, y]`` and ``corrected[i, x, y]``.
    """

    parameter: str
    phases: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray
    joint: np.ndarray
    single: np.ndarray = field(init=False)
    corrected: np.ndarray = field(init=False)

    def __post_init__(self):
        j = np.asarray(self.joint, dtype=float)
        single = np.stack([j.sum(axis=2), j.sum(axis=1)], axis=1)
        corrected = j - np.einsum("ix,iy->ixy", single[:, 0], single[:, 1]) + 0.25
        for name, arr in (("phases", self.phases), ("phi1", self.phi1), ("phi2", self.phi2),
                          ("joint", j), ("single", single), ("corrected", corrected)):
            arr = np.array(arr, dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.phases)

    def series(self, channel: str) -> np.ndarray:
        """Column by export label, e.g. ``"p(0_1)"`` or ``"pbar(00)"``."""
        return self.table()[:, SCAN_COLUMNS.index(channel)]

    def table(self) -> np.ndarray:
        n = len(self)
        return np.column_stack([self.phases, self.single.reshape(n, 4), self.corrected.reshape(n, 4)])

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SCAN_COLUMNS)
        for row in self.table():
            w.writerow([repr(float(v)) for v in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def _transducer_stack(alpha: float, xi: float, phis: np.ndarray) -> np.ndarray:
    splitter = rotation_operator(-alpha, (math.cos(xi), math.sin(xi), 0.0))
    shift = np.exp(-0.5j * np.asarray(phis))
    # splitter @ diag(e^{-iφ/2}, e^{iφ/2}) for every φ
    return np.stack([splitter[None, :, 0] * shift[:, None], splitter[None, :, 1] * shift.conj()[:, None]],
                    axis=-1).reshape(-1, 2, 2)


def _joint_grid(state, config: TransducerConfig, phi1: np.ndarray, phi2: np.ndarray) -> np.ndarray:
    """joint[i, x, y] for the phase pairs (phi1[i], phi2[i])."""
    u1 = _transducer_stack(config.alpha[0], config.xi[0], phi1)
    u2 = _transducer_stack(config.alpha[1], config.xi[1], phi2)
    rho = _two_qubit_rho(state).reshape(2, 2, 2, 2)
    joint = np.einsum("ixa,iyb,abcd,ixc,iyd->ixy", u1, u2, rho, u1.conj(), u2.conj(), optimize=True).real
    joint = np.clip(joint, 0.0, None)
    return joint / joint.sum(axis=(1, 2), keepdims=True)


def add_population_noise(joint: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Gaussian noise on every joint population, then clip at 0 and renormalize."""
    if sigma <= 0:
        return joint
    noisy = np.clip(joint + rng.normal(0.0, sigma, joint.shape), 0.0, None)
    sums = noisy.sum(axis=(-2, -1), keepdims=True)
    # an all-zero draw is vanishingly rare; fall back to the uniform channel
    return np.where(sums > 0, noisy / np.where(sums > 0, sums, 1), 0.25)


def sweep_fringes(state: PureState | DensityMatrix, config: TransducerConfig | None = None,
                  sweep: str = "joint", steps: int = FRINGE_STEPS, fixed: float = HALF_PI,
                  noise: float = 0.0, rng: np.random.Generator | int | None = None) -> FringeScan:
    """Scan phases over [0, 2π].

    ``sweep="joint"`` moves φ1 = φ2 together, ``"phi1"``/``"phi2"`` move one
    phase with the other held at ``fixed``.
    """
    if steps < 4:
        raise ValueError("a fringe sweep needs at least 4 steps")
    if noise < 0:
        raise ValueError("noise must be >= 0")
    config = TransducerConfig.symmetric() if config is None else config
    x = np.linspace(0, 2 * np.pi, steps)
    if sweep == "joint":
        p1, p2 = x, x
    elif sweep == "phi1":
        p1, p2 = x, np.full_like(x, fixed)
    elif sweep == "phi2":
        p1, p2 = np.full_like(x, fixed), x
    else:
        raise ValueError(f"unknown sweep {sweep!r}; use joint, phi1 or phi2")
    joint = _joint_grid(state, config, p1, p2)
    joint = add_population_noise(joint, noise, np.random.default_rng(rng))
    return FringeScan(sweep, x, p1, p2, joint)


# ---------------------------------------------------------------- fits

@dataclass(frozen=True)
class CosineFit:
    """y ≈ A cos(x - x0) + B. ``x0`` is None when the series is flat."""

    amplitude: float
    x0: float | None
    baseline: float
    rms: float

    @property
    def visibility(self) -> float:
        """(max - min)/(max + min) of the fitted curve."""
        return 0.0 if self.baseline == 0 else self.amplitude / self.baseline


def fit_cosine(x: Sequence[float], y: Sequence[float]) -> CosineFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 4 or y.size != n:
        raise ValueError("fit_cosine needs at least 4 matching samples")
    span = x.max() - x.min()
    if span < 2 * np.pi * (n - 1) / n - 1e-9:
        raise ValueError("samples must cover a full period")
    design = np.column_stack([np.cos(x), np.sin(x), np.ones_like(x)])
    (a, b, base), *_ = np.linalg.lstsq(design, y, rcond=None)
    rms = float(np.sqrt(np.mean((design @ [a, b, base] - y) ** 2)))
    amp = math.hypot(a, b)
    if amp <= 1e-12 * max(1.0, abs(base)):
        return CosineFit(0.0, None, float(base), rms)
    return CosineFit(float(amp), float(math.atan2(b, a)), float(base), rms)


@dataclass(frozen=True)
class TwoParticleFit:
    """p̄ ≈ B + a_s cos(φ1+φ2 - x_s) + a_d cos(φ1-φ2 - x_d) over the phase torus."""

    sum_amplitude: float
    diff_amplitude: float
    baseline: float
    rms: float

    @property
    def visibility(self) -> float:
        return 0.0 if self.baseline == 0 else (self.sum_amplitude + self.diff_amplitude) / self.baseline


def fit_two_particle_fringes(phi1: Sequence[float], phi2: Sequence[float], pbar: Sequence[float]) -> TwoParticleFit:
    """Least-squares fit of the corrected joint fringe over a 2-D phase scan.

    A single-phase cut mixes the sum and difference harmonics, so neither cut
    alone recovers their total amplitude; the 2-D fit separates them.
    """
    p1 = np.asarray(phi1, dtype=float).ravel()
    p2 = np.asarray(phi2, dtype=float).ravel()
    y = np.asarray(pbar, dtype=float).ravel()
    if not p1.size == p2.size == y.size or y.size < 5:
        raise ValueError("need at least 5 matching (phi1, phi2, pbar) samples")
    s, d = p1 + p2, p1 - p2
    design = np.column_stack([np.cos(s), np.sin(s), np.cos(d), np.sin(d), np.ones_like(s)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    if np.linalg.matrix_rank(design) < 5:
        raise ValueError("phase samples do not separate the sum and difference harmonics")
    rms = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    return TwoParticleFit(float(math.hypot(coef[0], coef[1])), float(math.hypot(coef[2], coef[3])),
                          float(coef[4]), rms)


def torus_scan(state: PureState | DensityMatrix, config: TransducerConfig | None = None,
               steps: int = FRINGE_STEPS) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Joint probabilities on a steps x steps phase grid (endpoint excluded).

    Returns flattened φ1, φ2 and joint[i, x, y].
    """
    if steps < 3:
        raise ValueError("torus scan needs at least 3 steps per axis")
    config = TransducerConfig.symmetric() if config is None else config
    x = np.linspace(0, 2 * np.pi, steps, endpoint=False)
    g1, g2 = np.meshgrid(x, x, indexing="ij")
    p1, p2 = g1.ravel(), g2.ravel()
    joint = _joint_grid(state, config, p1, p2)
    return p1, p2, joint.reshape(-1, 2, 2)
