"""Simulated versions of the θ-grid experiments on (|0>|θ1> + |1>|θ2>)/√2.

Every quantity goes through a simulated measurement: the state is prepared by
its pulse sequence, visibilities come from cosine fits of fringe scans, and
predictability/distinguishability from NMR line integrals. Noise, when
requested, is injected into populations (fringes) and line integrals (NMR).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from . import interferometer as itf
from . import measures, nmr
from .qcore import PureState

THETA_COLUMNS = ("theta1", "theta2", "V1", "V2", "P1", "P2", "S1", "S2", "D1", "D2",
                 "V12", "C", "C_D1", "C_D2")


@dataclass(frozen=True)
class ThetaGridConfig:
    start: float = -math.pi / 4
    stop: float = 3 * math.pi / 4
    points: int = 9
    theta_sum: float = math.pi / 2
    scan_steps: int = itf.FRINGE_STEPS
    noise: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        if self.points < 1:
            raise ValueError("θ grid is empty")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")

    def thetas(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class ThetaGridRow:
    theta1: float
    theta2: float
    V1: float
    V2: float
    P1: float
    P2: float
    S1: float
    S2: float
    D1: float
    D2: float
    V12: float
    C: float
    C_D1: float
    C_D2: float

    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))


@dataclass(frozen=True)
class ThetaGridResult:
    config: ThetaGridConfig
    rows: tuple[ThetaGridRow, ...]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def radius_v12_s(self, k: int) -> float:
        """Circle fit of (V12, S_k)."""
        return circle_radius(self.column("V12"), self.column(f"S{k}"))

    def radius_d_v(self, k: int) -> float:
        """Circle fit of (D_k, V_k)."""
        return circle_radius(self.column(f"D{k}"), self.column(f"V{k}"))

    def radii(self) -> dict[str, float]:
        return {f"r(V12,S{k})": self.radius_v12_s(k) for k in (1, 2)} | {
            f"r(D{k},V{k})": self.radius_d_v(k) for k in (1, 2)}


def circle_radius(x, y) -> float:
    """Least-squares r for points on x² + y² = r² (radial residuals)."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.size == 0:
        raise ValueError("no points to fit")
    return float(np.mean(np.hypot(x, y)))


def concurrence_from_lines(lines) -> float:
    """sqrt(D² - P²) from two line integrals, evaluated without cancellation.

    With D = |a|+|b| and P = |a+b|, D² - P² = 2(|ab| - ab).
    """
    a, b = (float(v) for v in lines)
    return math.sqrt(2 * (abs(a * b) - a * b))


def prepare(theta1: float, theta2: float) -> PureState:
    seq = nmr.preset_sequence("psi2", (theta1, theta2))
    return nmr.run_sequence(PureState.basis("00"), seq)


def measure_point(state: PureState, config: ThetaGridConfig, rng: np.random.Generator) -> dict[str, float]:
    noise = config.noise
    out: dict[str, float] = {}
    for k in (1, 2):
        scan = itf.sweep_fringes(state, sweep=f"phi{k}", steps=config.scan_steps, noise=noise, rng=rng)
        out[f"V{k}"] = itf.fit_cosine(scan.phases, scan.series(f"p(0_{k})")).visibility
    p1, p2, joint = itf.torus_scan(state, steps=config.scan_steps)
    joint = itf.add_population_noise(joint, noise, rng)
    pbar = itf.FringeScan("torus", np.arange(len(p1), dtype=float), p1, p2, joint).corrected[:, 0, 0]
    out["V12"] = itf.fit_two_particle_fringes(p1, p2, pbar).visibility
    for k in (1, 2):
        out[f"P{k}"] = nmr.measure_predictability(state, k, noise, rng)
        best = measures.distinguishability(state, k).axis
        axis = (0.0, 0.0, 1.0) if best is None else best.to_array()
        rotated = nmr.run_sequence(state, [nmr.ancilla_rotation(axis, 3 - k)])
        lines = nmr.readout_populations(rotated, k, noise, rng).lines
        out[f"D{k}"] = float(np.abs(lines).sum())
        out[f"C_D{k}"] = concurrence_from_lines(lines)
        out[f"S{k}"] = math.hypot(out[f"V{k}"], out[f"P{k}"])
    return out


def run_theta_grid(config: ThetaGridConfig | None = None) -> ThetaGridResult:
    config = ThetaGridConfig() if config is None else config
    rng = np.random.default_rng(config.seed)
    rows = []
    for t1 in config.thetas():
        t2 = config.theta_sum - t1
        state = prepare(t1, t2)
        m = measure_point(state, config, rng)
        rows.append(ThetaGridRow(theta1=float(t1), theta2=float(t2), C=m["V12"], **{
            k: v for k, v in m.items()}))
    return ThetaGridResult(config, tuple(rows))
