"""Named states used throughout: interferometer sources, the θ families, GHZ/W."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .qcore import PureState, tensor_all

SQRT1_2 = 1 / np.sqrt(2)

# complex two-qubit example; the quoted moduli have norm 1.0000081, normalized on use
COMPLEX_EXAMPLE_AMPLITUDES = (
    -0.3,
    -0.2 * np.exp(-3j * np.pi / 5),
    0.8 * np.exp(-1j * np.pi / 25),
    0.4796 * np.exp(-5j * np.pi / 12),
)


def qubit(theta: float, phase: float = 0.0) -> PureState:
    """cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>."""
    return PureState(np.array([np.cos(theta / 2), np.exp(1j * phase) * np.sin(theta / 2)]))


def plus() -> PureState:
    return qubit(np.pi / 2)


def phi_state() -> PureState:
    """Product source |Φ> = |+>|+>."""
    return tensor_all([plus(), plus()])


def bell_state() -> PureState:
    """Maximally entangled source |Ψ> = (|00> + |11>)/√2."""
    return PureState(np.array([SQRT1_2, 0, 0, SQRT1_2]))


def phi_theta(theta: float) -> PureState:
    return tensor_all([plus(), qubit(theta)])


def psi_pair(theta1: float, theta2: float) -> PureState:
    """(|0>|θ1> + |1>|θ2>)/√2 with |θ> = cos(θ/2)|0> + sin(θ/2)|1>."""
    a = qubit(theta1).amplitudes
    b = qubit(theta2).amplitudes
    return PureState(np.concatenate([a, b]) * SQRT1_2)


def psi_theta(theta: float) -> PureState:
    """(|0>|+> + |1>|θ>)/√2, the entangled source of the which-way experiments."""
    return psi_pair(np.pi / 2, theta)


def complex_example_state() -> PureState:
    return PureState.from_amplitudes(COMPLEX_EXAMPLE_AMPLITUDES)


def _check_coefficients(coeffs: Sequence[complex], count: int | None = None) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    if count is not None and c.size != count:
        raise ValueError(f"expected {count} coefficients, got {c.size}")
    if abs(np.sum(np.abs(c) ** 2) - 1) > 1e-12:
        raise ValueError("coefficients are not normalized")
    return c


def ghz_state(n: int, a1: complex, a2: complex) -> PureState:
    """a1|0...0> + a2|1...1>."""
    if n < 2:
        raise ValueError("GHZ state needs n >= 2")
    c = _check_coefficients([a1, a2])
    amps = np.zeros(2**n, dtype=complex)
    amps[0], amps[-1] = c
    return PureState(amps)


def w_state(coeffs: Sequence[complex]) -> PureState:
    """a1|10...0> + a2|010...0> + ... + an|0...01>.

    ``coeffs[k-1]`` always sits on the excitation of qubit k, so the closed
    forms read with a_k attached to qubit k for every n.
    """
    c = _check_coefficients(coeffs)
    n = c.size
    if n < 2:
        raise ValueError("W state needs n >= 2")
    amps = np.zeros(2**n, dtype=complex)
    for k in range(1, n + 1):
        amps[1 << (n - k)] = c[k - 1]
    return PureState(amps)


def product_state(thetas: Sequence[float], phases: Sequence[float] | None = None) -> PureState:
    phases = [0.0] * len(thetas) if phases is None else phases
    return tensor_all([qubit(t, p) for t, p in zip(thetas, phases)])


def bipartite_r_st(a1: complex, a2: complex, r: int = 1) -> PureState:
    """|0>_r (a1|00> + a2|11>)_{st} on three qubits; r selects the spectator."""
    if r not in (1, 2, 3):
        raise ValueError("r must be 1, 2 or 3")
    c = _check_coefficients([a1, a2])
    s, t = [q for q in (1, 2, 3) if q != r]
    amps = np.zeros(8, dtype=complex)
    amps[0] = c[0]
    amps[(1 << (3 - s)) | (1 << (3 - t))] = c[1]
    return PureState(amps)


def generalized_state_families(name: str, coefficients: Sequence[complex], n: int) -> PureState:
    """GHZ_n (two coefficients) or W_n (n coefficients)."""
    key = name.lower().replace("_", "")
    if n < 3:
        raise ValueError("generalized families are defined for n >= 3")
    if key in ("ghz", "ghzn"):
        c = _check_coefficients(coefficients, 2)
        return ghz_state(n, c[0], c[1])
    if key in ("w", "wn"):
        c = _check_coefficients(coefficients, n)
        return w_state(c)
    raise ValueError(f"unknown family {name!r}")
