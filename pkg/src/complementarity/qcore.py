"""Dense state and operator algebra for small qubit registers.

Qubits are labelled 1..n, qubit 1 being the most significant bit of the
computational-basis index, so ``|x1 x2 ... xn>`` sits at ``sum_k x_k 2**(n-k)``.
All value types are immutable; their arrays are flagged read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
DERIVED_TOL = 1e-10
PSD_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


def _n_qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 1 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be a 1-D vector")
        _n_qubits_for(amps.size)
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_amplitudes(cls, amplitudes: Iterable[complex], normalize: bool = True) -> "PureState":
        amps = np.asarray(list(amplitudes) if not isinstance(amplitudes, np.ndarray) else amplitudes,
                          dtype=complex)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise ValueError("zero vector cannot be normalized")
            amps = amps / norm
        return cls(amps)

    @classmethod
    def basis(cls, bits: str | Sequence[int]) -> "PureState":
        """Computational basis state, e.g. ``PureState.basis("01")``."""
        bits = [int(b) for b in bits]
        n = len(bits)
        amps = np.zeros(2**n, dtype=complex)
        amps[sum(b << (n - 1 - i) for i, b in enumerate(bits))] = 1.0
        return cls(amps)

    @property
    def n_qubits(self) -> int:
        return _n_qubits_for(self.amplitudes.size)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self):
        return f"PureState(n_qubits={self.n_qubits}, amplitudes={np.round(self.amplitudes, 6)!r})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        _n_qubits_for(m.shape[0])
        if np.max(np.abs(m - m.conj().T)) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise ValueError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        return cls(np.eye(2**n, dtype=complex) / 2**n)

    @property
    def n_qubits(self) -> int:
        return _n_qubits_for(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def is_pure(self, tol: float = DERIVED_TOL) -> bool:
        return abs(purity(self) - 1.0) < tol

    def __repr__(self):
        return f"DensityMatrix(n_qubits={self.n_qubits})"


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("unitary must be square")
        if np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) > DERIVED_TOL:
            raise ValueError("matrix is not unitary")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def identity(cls, dim: int) -> "UnitaryOperator":
        return cls(np.eye(dim, dtype=complex))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other: "UnitaryOperator") -> "UnitaryOperator":
        return UnitaryOperator(self.matrix @ other.matrix)

    def dagger(self) -> "UnitaryOperator":
        return UnitaryOperator(self.matrix.conj().T)


@dataclass(frozen=True)
class BlochVector:
    sx: float
    sy: float
    sz: float

    def __post_init__(self):
        if self.sx**2 + self.sy**2 + self.sz**2 > 1 + DERIVED_TOL:
            raise ValueError("Bloch vector longer than 1")

    @classmethod
    def from_array(cls, v: Sequence[float]) -> "BlochVector":
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def to_array(self) -> np.ndarray:
        return np.array([self.sx, self.sy, self.sz])

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.sx**2 + self.sy**2 + self.sz**2))

    @property
    def transverse(self) -> float:
        return float(np.hypot(self.sx, self.sy))

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix((I2 + self.sx * SX + self.sy * SY + self.sz * SZ) / 2)


def as_density_matrix(state: PureState | DensityMatrix) -> DensityMatrix:
    if isinstance(state, PureState):
        return state.density_matrix()
    if isinstance(state, DensityMatrix):
        return state
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


def tensor(a, b):
    """Kronecker product of two states or two unitaries (qubits of ``a`` first)."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, UnitaryOperator) and isinstance(b, UnitaryOperator):
        return UnitaryOperator(np.kron(a.matrix, b.matrix))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.matrix, b.matrix))
    raise TypeError("tensor operands must be of the same kind")


def tensor_all(items: Sequence):
    out = items[0]
    for it in items[1:]:
        out = tensor(out, it)
    return out


def _check_targets(targets: Sequence[int], n: int) -> list[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target qubits: {targets}")
    for t in targets:
        if not 1 <= t <= n:
            raise ValueError(f"qubit {t} out of range 1..{n}")
    return targets


def _apply_to_vector(vec: np.ndarray, u: np.ndarray, targets: list[int], n: int) -> np.ndarray:
    k = len(targets)
    psi = vec.reshape((2,) * n)
    axes = [t - 1 for t in targets]
    ut = u.reshape((2,) * (2 * k))
    out = np.tensordot(ut, psi, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the new target axes first; move them back in place
    return np.moveaxis(out, list(range(k)), axes).reshape(-1)


def embed(u: UnitaryOperator | np.ndarray, targets: Sequence[int], n: int) -> UnitaryOperator:
    """Full 2**n matrix of ``u`` acting on ``targets`` (in the given order)."""
    m = u.matrix if isinstance(u, UnitaryOperator) else np.asarray(u, dtype=complex)
    targets = _check_targets(targets, n)
    if m.shape[0] != 2 ** len(targets):
        raise ValueError("unitary dimension does not match the number of targets")
    eye = np.eye(2**n, dtype=complex)
    cols = [_apply_to_vector(eye[:, i], m, targets, n) for i in range(2**n)]
    return UnitaryOperator(np.stack(cols, axis=1))


def apply_unitary(state, u: UnitaryOperator | np.ndarray, targets: Sequence[int]):
    """Apply ``u`` to the listed qubits of a pure state or density matrix."""
    m = u.matrix if isinstance(u, UnitaryOperator) else np.asarray(u, dtype=complex)
    n = state.n_qubits
    targets = _check_targets(targets, n)
    if m.shape != (2 ** len(targets),) * 2:
        raise ValueError(
            f"unitary of dimension {m.shape[0]} cannot act on {len(targets)} qubit(s)")
    if isinstance(state, PureState):
        return PureState(_apply_to_vector(state.amplitudes, m, targets, n))
    if isinstance(state, DensityMatrix):
        full = embed(m, targets, n).matrix
        rho = full @ state.matrix @ full.conj().T
        return DensityMatrix((rho + rho.conj().T) / 2)
    raise TypeError(f"cannot apply a unitary to {type(state).__name__}")


def partial_trace(rho: PureState | DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the qubits in ``keep`` (returned in ascending qubit order)."""
    rho = as_density_matrix(rho)
    n = rho.n_qubits
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    _check_targets(keep, n)
    if len(keep) == n:
        return rho
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters) + 26:
        raise ValueError("too many qubits for einsum partial trace")
    letters += letters.upper()
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for q in range(1, n + 1):
        if q not in keep:
            col[q - 1] = row[q - 1]
    out_idx = "".join(row[q - 1] for q in keep) + "".join(col[q - 1] for q in keep)
    t = rho.matrix.reshape((2,) * (2 * n))
    red = np.einsum("".join(row) + "".join(col) + "->" + out_idx, t)
    d = 2 ** len(keep)
    red = red.reshape(d, d)
    return DensityMatrix((red + red.conj().T) / 2)


def marginal(state: PureState | DensityMatrix, *qubits: int) -> DensityMatrix:
    return partial_trace(state, qubits)


def bloch_vector(rho: DensityMatrix | PureState) -> BlochVector:
    rho = as_density_matrix(rho)
    if rho.n_qubits != 1:
        raise ValueError("Bloch vector is defined for single-qubit states only")
    m = rho.matrix
    return BlochVector(
        float(2 * m[0, 1].real),
        float(-2 * m[0, 1].imag),
        float((m[0, 0] - m[1, 1]).real),
    )


def purity(rho: DensityMatrix | PureState) -> float:
    m = as_density_matrix(rho).matrix
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(m) ** 2))


def expectation(state: PureState | DensityMatrix, op: np.ndarray) -> complex:
    rho = as_density_matrix(state).matrix
    return complex(np.trace(rho @ op))


def fidelity(a: PureState | DensityMatrix, b: PureState) -> float:
    """``<b|rho_a|b>``; equals ``|<a|b>|^2`` for pure ``a``. Global phase never matters."""
    if isinstance(a, PureState):
        return float(abs(np.vdot(b.amplitudes, a.amplitudes)) ** 2)
    return float(np.vdot(b.amplitudes, a.matrix @ b.amplitudes).real)


def same_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = DERIVED_TOL) -> bool:
    """Matrix/vector equality modulo one global phase factor."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[idx]) < tol:
        return False
    phase = b[idx] / a[idx]
    phase /= abs(phase)
    return bool(np.max(np.abs(a * phase - b)) <= tol)


def random_unitary(dim: int, rng: np.random.Generator) -> UnitaryOperator:
    """Haar-random unitary (QR of a Ginibre matrix with the phase fix)."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return UnitaryOperator(q * (d / np.abs(d)))


def random_pure_state(n: int, seed: int | np.random.Generator | None = None) -> PureState:
    if n < 1:
        raise ValueError("need at least one qubit")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return PureState(v / np.linalg.norm(v))


def random_mixed_state(n: int, seed: int | np.random.Generator | None = None,
                       env_qubits: int | None = None) -> DensityMatrix:
    """Random mixed state: marginal of a Haar-random purification."""
    env = n if env_qubits is None else env_qubits
    if env < 0:
        raise ValueError("env_qubits must be >= 0")
    psi = random_pure_state(n + env, seed) if env else random_pure_state(n, seed)
    return partial_trace(psi, range(1, n + 1))


def mix(states: Sequence[PureState | DensityMatrix], weights: Sequence[float]) -> DensityMatrix:
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1) > NORM_TOL:
        raise ValueError("mixture weights must be a probability vector")
    m = sum(wi * as_density_matrix(s).matrix for wi, s in zip(w, states))
    return DensityMatrix(m)


def dephase(rho: DensityMatrix | PureState) -> DensityMatrix:
    """Drop every off-diagonal element in the computational basis."""
    m = as_density_matrix(rho).matrix
    return DensityMatrix(np.diag(np.diag(m).real).astype(complex))


def rotation_operator(angle: float, axis: Sequence[float]) -> np.ndarray:
    """exp(-i angle/2 n.sigma) for a unit axis n; closed form, no expm."""
    nx, ny, nz = axis
    h = angle / 2
    return np.cos(h) * I2 - 1j * np.sin(h) * (nx * SX + ny * SY + nz * SZ)


def pauli_on(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    mats = [I2] * n
    mats[qubit - 1] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out
