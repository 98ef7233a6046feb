"""Complementarity quantities and the relations between them.

Single-particle: visibility V_k, predictability P_k, character S_k.
Bipartite: concurrence C (pure and Wootters mixed), distinguishability D_k.
Multi-qubit: bipartite concurrence C_k(rest), pairwise tangle, 3-tangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .qcore import (
    SY,
    BlochVector,
    DensityMatrix,
    PureState,
    as_density_matrix,
    bloch_vector,
    partial_trace,
    purity,
)

TWO_QUBIT_TOL = 1e-10
THREE_QUBIT_TOL = 1e-9
INEQUALITY_SLACK = 1e-9
V12_MAX_TOL = 1e-6

# rho eigenvalues below this are roundoff; their square roots would leak ~1e-8 into λ
_EIG_FLOOR = 1e-13

_SYSY = np.kron(SY, SY)


def _check_qubit(state, k: int) -> None:
    n = state.n_qubits
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise ValueError(f"qubit index {k!r} out of range 1..{n}")


# ---------------------------------------------------------------- single particle

def visibility_single(state: PureState | DensityMatrix, k: int) -> float:
    """2|<0|rho_k|1>| for the marginal of qubit k."""
    _check_qubit(state, k)
    rho_k = partial_trace(state, [k]).matrix
    return float(2 * abs(rho_k[0, 1]))


def predictability(state: PureState | DensityMatrix, k: int) -> float:
    """|<sigma_z^(k)>|."""
    _check_qubit(state, k)
    rho_k = partial_trace(state, [k]).matrix
    return float(abs((rho_k[0, 0] - rho_k[1, 1]).real))


@dataclass(frozen=True)
class SingleParticleProfile:
    qubit: int
    visibility: float
    predictability: float
    character: float


def single_particle_character(state: PureState | DensityMatrix, k: int) -> SingleParticleProfile:
    v = visibility_single(state, k)
    p = predictability(state, k)
    return SingleParticleProfile(k, v, p, math.sqrt(v * v + p * p))


# ---------------------------------------------------------------- concurrence

def concurrence_pure(state: PureState) -> float:
    """|<psi| sigma_y sigma_y |psi*>| for a two-qubit pure state."""
    if not isinstance(state, PureState) or state.n_qubits != 2:
        raise ValueError("concurrence_pure needs a two-qubit PureState")
    a = state.amplitudes
    return float(abs(np.vdot(a, _SYSY @ a.conj())))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    w = np.where(w < _EIG_FLOOR, 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def wootters_lambdas(rho: DensityMatrix | PureState) -> np.ndarray:
    """Decreasing square roots of the eigenvalues of rho (σy⊗σy) rho* (σy⊗σy).

    Computed as singular values of sqrt(rho) sqrt(rho~), which equal the square
    roots of the eigenvalues of the Hermitian product sqrt(rho) rho~ sqrt(rho).
    """
    m = as_density_matrix(rho)
    if m.n_qubits != 2:
        raise ValueError("Wootters concurrence needs a two-qubit state")
    r = m.matrix
    sr = _psd_sqrt(r)
    sr_tilde = _SYSY @ sr.conj() @ _SYSY
    return np.linalg.svd(sr @ sr_tilde, compute_uv=False)


def concurrence_mixed(rho: DensityMatrix | PureState) -> float:
    lam = wootters_lambdas(rho)
    return float(max(lam[0] - lam[1] - lam[2] - lam[3], 0.0))


def concurrence(state: PureState | DensityMatrix) -> float:
    if isinstance(state, PureState):
        return concurrence_pure(state)
    return concurrence_mixed(state)


# ---------------------------------------------------------------- distinguishability

@dataclass(frozen=True)
class DistinguishabilityResult:
    """Which-way knowledge of qubit ``qubit`` after an optimal measurement on its partner.

    ``axis`` is the Bloch direction b of the optimal ancilla observable b·σ, or
    None when D = 0 and every axis is equally useless.
    """

    qubit: int
    distinguishability: float
    axis: BlochVector | None
    a_plus: float
    a_minus: float
    m_plus: BlochVector | None
    m_minus: BlochVector | None

    @property
    def D(self) -> float:
        return self.distinguishability

    @property
    def optimal_axis(self) -> BlochVector | None:
        return self.axis

    @property
    def axis_defined(self) -> bool:
        return self.axis is not None


def _component(vec: np.ndarray) -> tuple[float, BlochVector | None]:
    a = float(np.linalg.norm(vec))
    if a < 1e-15:
        return a, None
    u = vec / a
    rho = np.outer(u, u.conj())
    return a, bloch_vector(DensityMatrix(rho))


def distinguishability(state: PureState, k: int) -> DistinguishabilityResult:
    """Optimal which-way knowledge D_k for a two-qubit pure state.

    Splits |Θ> = a+|0>_k|m+>_j + a-|1>_k|m->_j; the optimal ancilla axis is
    parallel to a+² m+ - a-² m- and D_k is that vector's length.
    """
    if not isinstance(state, PureState) or state.n_qubits != 2:
        raise ValueError("distinguishability needs a two-qubit PureState")
    _check_qubit(state, k)
    g = state.amplitudes.reshape(2, 2)  # g[x1, x2]
    comp = g if k == 1 else g.T  # comp[x_k] is the (unnormalized) ancilla state
    a_plus, m_plus = _component(comp[0])
    a_minus, m_minus = _component(comp[1])
    v = np.zeros(3)
    if m_plus is not None:
        v += a_plus**2 * m_plus.to_array()
    if m_minus is not None:
        v -= a_minus**2 * m_minus.to_array()
    d = float(np.linalg.norm(v))
    axis = BlochVector.from_array(v / d) if d > 1e-12 else None
    return DistinguishabilityResult(k, min(d, 1.0), axis, a_plus, a_minus, m_plus, m_minus)


def distinguishability_closed_form(state: PureState, k: int) -> float:
    """sqrt(1 - 2 a+² a-² (1 + m+·m-)); degenerate components give max(a+², a-²)."""
    r = distinguishability(state, k)
    if r.m_plus is None or r.m_minus is None:
        return max(r.a_plus**2, r.a_minus**2)
    dot = float(np.dot(r.m_plus.to_array(), r.m_minus.to_array()))
    return math.sqrt(max(0.0, 1 - 2 * r.a_plus**2 * r.a_minus**2 * (1 + dot)))


# ---------------------------------------------------------------- multi-qubit

def bipartite_concurrence(state: PureState, k: int) -> float:
    """C_k(rest) = sqrt(2[1 - Tr rho_k²]) between qubit k and all the others."""
    if not isinstance(state, PureState):
        raise ValueError("bipartite concurrence is defined here for pure states")
    if state.n_qubits < 2:
        raise ValueError("need at least two qubits")
    _check_qubit(state, k)
    return math.sqrt(max(0.0, 2 * (1 - purity(partial_trace(state, [k])))))


def pair_concurrence(state: PureState | DensityMatrix, k: int, j: int) -> float:
    if k == j:
        raise ValueError("pair concurrence needs two different qubits")
    return concurrence_mixed(partial_trace(state, [k, j]))


def pairwise_tangle(state: PureState | DensityMatrix, k: int) -> float:
    """tau_2^(k) = sum over j != k of C(rho_kj)²."""
    if state.n_qubits < 2:
        raise ValueError("need at least two qubits")
    _check_qubit(state, k)
    return float(sum(pair_concurrence(state, k, j) ** 2
                     for j in range(1, state.n_qubits + 1) if j != k))


def three_tangle(state: PureState, k: int = 1) -> float:
    """C_k(ij)² - C_ki² - C_kj²; tiny negative roundoff is clamped to 0."""
    if not isinstance(state, PureState) or state.n_qubits != 3:
        raise ValueError("three_tangle needs a three-qubit PureState")
    _check_qubit(state, k)
    tau = bipartite_concurrence(state, k) ** 2 - pairwise_tangle(state, k)
    if tau < -THREE_QUBIT_TOL:
        raise ArithmeticError(f"3-tangle came out negative ({tau!r}); input is not a valid pure state")
    return max(tau, 0.0)


@dataclass(frozen=True)
class TangleProfile:
    qubit: int
    bipartite_concurrence: float
    pairwise_tangle: float
    three_tangle: float | None = None


def tangle_profile(state: PureState, k: int) -> TangleProfile:
    tau3 = three_tangle(state, k) if state.n_qubits == 3 else None
    return TangleProfile(k, bipartite_concurrence(state, k), pairwise_tangle(state, k), tau3)


# ---------------------------------------------------------------- GHZ_n / W_n closed forms

def family_closed_forms(name: str, coefficients: Sequence[complex], k: int) -> dict:
    """Closed-form tangles and character of qubit k for GHZ_n / W_n.

    Returns keys ``tau2``, ``S2`` and ``tau_n`` (the n-way tangle; 0 for W_n).
    """
    c = np.abs(np.asarray(coefficients, dtype=complex)) ** 2
    key = name.lower().replace("_", "")
    if key in ("ghz", "ghzn"):
        return {"tau2": 0.0, "S2": float((c[0] - c[1]) ** 2), "tau_n": float(4 * c[0] * c[1])}
    if key in ("w", "wn"):
        ak = c[k - 1]
        rest = float(np.sum(c) - ak)
        return {"tau2": float(4 * ak * rest), "S2": float((ak - rest) ** 2), "tau_n": 0.0}
    raise ValueError(f"unknown family {name!r}")


# ---------------------------------------------------------------- relation report

@dataclass(frozen=True)
class RelationCheck:
    """One relation evaluated on one state.

    ``kind`` is ``"eq"`` (lhs = rhs within tolerance), ``"le"`` (lhs <= rhs +
    tolerance) or ``"skip"``.
    """

    name: str
    kind: str
    lhs: float
    rhs: float
    tolerance: float
    note: str = ""

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    @property
    def verdict(self) -> str:
        if self.kind == "skip":
            return "skip"
        if self.kind == "eq":
            return "pass" if abs(self.residual) <= self.tolerance else "fail"
        return "pass" if self.residual <= self.tolerance else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict != "fail"

    def as_record(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class ComplementarityReport:
    n_qubits: int
    pure: bool
    single: tuple[SingleParticleProfile, ...]
    distinguishability: tuple[DistinguishabilityResult, ...] = ()
    tangles: tuple[TangleProfile, ...] = ()
    concurrence: float | None = None
    v12_symmetric: float | None = None
    v12_max: float | None = None
    relations: tuple[RelationCheck, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.relations)

    @property
    def residuals(self) -> dict[str, float]:
        return {r.name: r.residual for r in self.relations if r.kind != "skip"}

    def __iter__(self) -> Iterator[RelationCheck]:
        return iter(self.relations)

    def relation(self, name: str) -> RelationCheck:
        for r in self.relations:
            if r.name == name:
                return r
        raise KeyError(name)

    def quantities(self) -> dict[str, float]:
        q: dict[str, float] = {}
        for s in self.single:
            q[f"V_{s.qubit}"] = s.visibility
            q[f"P_{s.qubit}"] = s.predictability
            q[f"S_{s.qubit}"] = s.character
        for d in self.distinguishability:
            q[f"D_{d.qubit}"] = d.distinguishability
        for t in self.tangles:
            q[f"C_{t.qubit}(rest)"] = t.bipartite_concurrence
            q[f"tau2_{t.qubit}"] = t.pairwise_tangle
            if t.three_tangle is not None:
                q[f"tau3_{t.qubit}"] = t.three_tangle
        if self.concurrence is not None:
            q["C"] = self.concurrence
        if self.v12_symmetric is not None:
            q["V12_sym"] = self.v12_symmetric
        if self.v12_max is not None:
            q["V12_max"] = self.v12_max
        return q


def verify_relations(state: PureState | DensityMatrix, tolerance: float | None = None,
                     maximize: bool = True) -> ComplementarityReport:
    """Evaluate every applicable complementarity relation on ``state``.

    Pure states get the equalities, mixed states only the inequalities.
    ``tolerance`` overrides every per-relation tolerance when given.
    """
    # late import: interferometer depends on this module
    from . import interferometer as itf

    if tolerance is not None and tolerance <= 0:
        raise ValueError("tolerance must be positive")

    def tol(default: float) -> float:
        return default if tolerance is None else tolerance

    if isinstance(state, DensityMatrix) and state.is_pure(1e-13):
        w, v = np.linalg.eigh(state.matrix)
        state = PureState(v[:, -1] / np.linalg.norm(v[:, -1]))
    pure = isinstance(state, PureState)
    n = state.n_qubits
    ks = range(1, n + 1)
    single = tuple(single_particle_character(state, k) for k in ks)
    rel: list[RelationCheck] = []

    for s in single:
        v2p2 = s.visibility**2 + s.predictability**2
        if pure and n == 1:
            rel.append(RelationCheck(f"P_{s.qubit}^2+V_{s.qubit}^2=1", "eq", v2p2, 1.0, tol(TWO_QUBIT_TOL)))
        else:
            rel.append(RelationCheck(f"P_{s.qubit}^2+V_{s.qubit}^2<=1", "le", v2p2, 1.0, tol(INEQUALITY_SLACK)))

    dist: tuple[DistinguishabilityResult, ...] = ()
    tangles: tuple[TangleProfile, ...] = ()
    conc = v12s = v12m = None

    if n == 2:
        conc = concurrence(state)
        for s in single:
            k = s.qubit
            lhs = conc**2 + s.visibility**2 + s.predictability**2
            if pure:
                rel.append(RelationCheck(f"C^2+V_{k}^2+P_{k}^2=1", "eq", lhs, 1.0, tol(TWO_QUBIT_TOL)))
            else:
                rel.append(RelationCheck(f"C^2+V_{k}^2+P_{k}^2<=1", "le", lhs, 1.0, tol(INEQUALITY_SLACK)))
        if pure:
            dist = tuple(distinguishability(state, k) for k in ks)
            cfg = itf.TransducerConfig.symmetric()
            v12s = itf.two_particle_visibility(state, cfg)
            if maximize:
                v12m = itf.maximize_v12(state)[0]
            for s, d in zip(single, dist):
                k = s.qubit
                D, V, P = d.distinguishability, s.visibility, s.predictability
                rel.append(RelationCheck(f"D_{k}^2+V_{k}^2=1", "eq", D**2 + V**2, 1.0, tol(TWO_QUBIT_TOL)))
                rel.append(RelationCheck(f"D_{k}^2=P_{k}^2+C^2", "eq", D**2, P**2 + conc**2, tol(TWO_QUBIT_TOL)))
                rel.append(RelationCheck(f"P_{k}<=D_{k}", "le", P, D, tol(1e-12)))
                vk = itf.single_particle_visibility(state, cfg, k)
                rel.append(RelationCheck(f"Vk_{k}^2+V12_sym^2<=1", "le", vk**2 + v12s**2, 1.0,
                                         tol(INEQUALITY_SLACK)))
                rel.append(RelationCheck(f"V12_sym^2+V_{k}^2+P_{k}^2<=1", "le", v12s**2 + vk**2 + P**2, 1.0,
                                         tol(INEQUALITY_SLACK)))
                if v12m is not None:
                    rel.append(RelationCheck(f"V12_max^2+S_{k}^2=1", "eq", v12m**2 + s.character**2, 1.0,
                                             tol(V12_MAX_TOL)))
            if v12m is not None:
                rel.append(RelationCheck("V12_max=C", "eq", v12m, conc, tol(V12_MAX_TOL)))
        else:
            for name in ("D_k^2+V_k^2=1", "D_k^2=P_k^2+C^2", "V12_max=C"):
                rel.append(RelationCheck(name, "skip", math.nan, math.nan, math.nan,
                                         "needs a pure state"))

    if pure and n >= 2:
        tangles = tuple(tangle_profile(state, k) for k in ks)
        tol_n = tol(TWO_QUBIT_TOL if n == 2 else THREE_QUBIT_TOL)
        total = 0.0
        for s, t in zip(single, tangles):
            k = s.qubit
            lhs = t.bipartite_concurrence**2 + s.character**2
            total += lhs
            rel.append(RelationCheck(f"C_{k}(rest)^2+S_{k}^2=1", "eq", lhs, 1.0, tol_n))
            rel.append(RelationCheck(f"tau2_{k}<=C_{k}(rest)^2", "le", t.pairwise_tangle,
                                     t.bipartite_concurrence**2, tol(INEQUALITY_SLACK)))
        rel.append(RelationCheck("sum_k[C_k(rest)^2+S_k^2]=n", "eq", total, float(n), tol(1e-8)))
        if n == 3:
            for s, t in zip(single, tangles):
                k = s.qubit
                rel.append(RelationCheck(f"tau3+tau2_{k}+S_{k}^2=1", "eq",
                                         t.three_tangle + t.pairwise_tangle + s.character**2, 1.0,
                                         tol(THREE_QUBIT_TOL)))
            t3 = [t.three_tangle for t in tangles]
            rel.append(RelationCheck("tau3 pivot spread", "eq", max(t3) - min(t3), 0.0,
                                     tol(THREE_QUBIT_TOL)))
    elif not pure and n >= 3:
        rel.append(RelationCheck("tangle relations", "skip", math.nan, math.nan, math.nan,
                                 "mixed multi-qubit tangles are not defined here"))

    return ComplementarityReport(
        n_qubits=n,
        pure=pure,
        single=single,
        distinguishability=dist,
        tangles=tangles,
        concurrence=conc,
        v12_symmetric=v12s,
        v12_max=v12m,
        relations=tuple(rel),
    )
