"""Dense state-vector engine for small qubit registers.

Conventions used everywhere in this package: the basis label |q1 q2 ... qN>
maps to the integer index whose most significant bit is q1, so kets read left
to right and qubit positions are 0-based from the left.  States and density
matrices are immutable values; every operation returns a new object.  All
approximate comparisons share a single tolerance, overridable through the
BCST_TOLERANCE environment variable.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

TOLERANCE = float(os.environ.get("BCST_TOLERANCE", "1e-12"))
MAX_QUBITS = 12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitudes over an ordered qubit register."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(
                f"register size {self.num_qubits} outside [1, {MAX_QUBITS}]"
            )
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 1 << self.num_qubits:
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes, got {amps.size}"
            )
        if abs(np.vdot(amps, amps).real - 1.0) > TOLERANCE:
            raise ValueError("amplitudes are not normalized")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace operator on a qubit register."""

    num_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.complex128)
        d = 1 << self.num_qubits
        if m.shape != (d, d):
            raise ValueError(f"expected {d}x{d} matrix, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > TOLERANCE:
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TOLERANCE:
            raise ValueError("trace is not 1")
        object.__setattr__(self, "entries", _frozen(m))

    def validate(self) -> None:
        """Raise unless positive semidefinite (eigenvalues >= -1e-10)."""
        lo = float(np.linalg.eigvalsh(self.entries)[0])
        if lo < -1e-10:
            raise ValueError(f"negative eigenvalue {lo}")


def _check_targets(num_qubits: int, targets: Sequence[int]) -> tuple[int, ...]:
    t = tuple(int(q) for q in targets)
    if len(t) == 0:
        raise ValueError("empty target list")
    if len(set(t)) != len(t):
        raise ValueError(f"duplicate qubit positions in {t}")
    for q in t:
        if not 0 <= q < num_qubits:
            raise ValueError(f"qubit {q} outside register of {num_qubits}")
    return t


def ket(bits: str) -> StateVector:
    """Computational basis state from a bit string, e.g. ket("01")."""
    if not bits or any(b not in "01" for b in bits):
        raise ValueError(f"not a bit string: {bits!r}")
    amps = np.zeros(1 << len(bits), dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return StateVector(len(bits), amps)


def from_amplitudes(amplitudes, *, atol: float | None = None) -> StateVector:
    """Wrap raw amplitudes, renormalizing when within atol of unit norm."""
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    n = amps.size
    if n < 2 or n & (n - 1):
        raise ValueError(f"amplitude count {n} is not a power of two")
    norm = float(np.linalg.norm(amps))
    if atol is not None:
        if abs(norm - 1.0) > atol:
            raise ValueError(f"norm {norm} further than {atol} from 1")
        amps = amps / norm
    return StateVector(n.bit_length() - 1, amps)


def tensor(*states: StateVector) -> StateVector:
    """Tensor product; the first argument supplies the leftmost qubits."""
    if not states:
        raise ValueError("tensor of nothing")
    amps = states[0].amplitudes
    for s in states[1:]:
        amps = np.kron(amps, s.amplitudes)
    return StateVector(sum(s.num_qubits for s in states), amps)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("register size mismatch")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def apply_unitary(state: StateVector, u, targets: Sequence[int]) -> StateVector:
    """Apply a unitary to the listed qubits, first target = leftmost bit of u."""
    t = _check_targets(state.num_qubits, targets)
    k = len(t)
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (1 << k, 1 << k):
        raise ValueError(f"operator shape {u.shape} does not act on {k} qubits")
    if np.max(np.abs(u @ u.conj().T - np.eye(1 << k))) > 1e-10:
        raise ValueError("operator is not unitary")
    n = state.num_qubits
    psi = state.amplitudes.reshape([2] * n)
    psi = np.moveaxis(psi, t, range(k))
    psi = (u @ psi.reshape(1 << k, -1)).reshape([2] * n)
    psi = np.moveaxis(psi, range(k), t)
    return StateVector(n, psi.reshape(-1))


def permute_qubits(state: StateVector, order: Sequence[int]) -> StateVector:
    """Reorder the register so new position k holds old qubit order[k]."""
    t = _check_targets(state.num_qubits, order)
    if len(t) != state.num_qubits:
        raise ValueError("order must list every qubit exactly once")
    psi = state.amplitudes.reshape([2] * state.num_qubits).transpose(t)
    return StateVector(state.num_qubits, psi.reshape(-1))


def _project_matrix(state: StateVector, targets: tuple[int, ...]):
    """Amplitudes as a (target block) x (rest block) matrix, plus rest count."""
    n, k = state.num_qubits, len(targets)
    psi = state.amplitudes.reshape([2] * n)
    psi = np.moveaxis(psi, targets, range(k))
    return psi.reshape(1 << k, -1), n - k


def project_onto(
    state: StateVector, targets: Sequence[int], element: StateVector
) -> tuple[float, StateVector | None]:
    """Project the target qubits onto element; (probability, collapsed state).

    The collapsed state keeps the full register, with the targets factored
    into element exactly.  Returns (p, None) when p is numerically zero.
    """
    t = _check_targets(state.num_qubits, targets)
    if element.num_qubits != len(t):
        raise ValueError("element size does not match target count")
    mat, _ = _project_matrix(state, t)
    resid = element.amplitudes.conj() @ mat
    prob = float(np.vdot(resid, resid).real)
    if prob < 1e-15:
        return prob, None
    resid = resid / np.sqrt(prob)
    n, k = state.num_qubits, len(t)
    full = np.outer(element.amplitudes, resid).reshape([2] * n)
    full = np.moveaxis(full, range(k), t)
    return prob, StateVector(n, full.reshape(-1))


def split_factor(
    state: StateVector, targets: Sequence[int], element: StateVector
) -> tuple[float, StateVector | None]:
    """Like project_onto but returns the normalized residual state over the
    remaining qubits (in increasing position order)."""
    t = _check_targets(state.num_qubits, targets)
    if element.num_qubits != len(t):
        raise ValueError("element size does not match target count")
    if len(t) >= state.num_qubits:
        raise ValueError("no qubits would remain")
    mat, rest = _project_matrix(state, t)
    resid = element.amplitudes.conj() @ mat
    prob = float(np.vdot(resid, resid).real)
    if prob < 1e-15:
        return prob, None
    return prob, StateVector(rest, resid / np.sqrt(prob))


def factor_out(
    state: StateVector, targets: Sequence[int], element: StateVector
) -> StateVector:
    """Strip a subsystem known to be exactly in `element` (weight must be 1)."""
    prob, resid = split_factor(state, targets, element)
    if resid is None or prob < 1.0 - 1e-9:
        raise ValueError(f"subsystem carries weight {prob}, cannot factor out")
    return resid


def measure_in_basis(
    state: StateVector,
    targets: Sequence[int],
    basis: Sequence[StateVector],
    rng: np.random.Generator,
) -> tuple[int, float, StateVector]:
    """Projective measurement of the targets in a complete orthonormal basis.

    Samples an outcome with Born probabilities from rng and collapses by
    projection plus renormalization (the basis is never silently extended).
    Returns (outcome index, outcome probability, collapsed state).
    """
    t = _check_targets(state.num_qubits, targets)
    k = len(t)
    if len(basis) != 1 << k:
        raise ValueError(f"basis has {len(basis)} elements, need {1 << k}")
    b = np.stack([e.amplitudes for e in basis])
    if b.shape[1] != 1 << k:
        raise ValueError("basis element size does not match target count")
    gram = b.conj() @ b.T
    if np.max(np.abs(gram - np.eye(1 << k))) > TOLERANCE:
        raise ValueError("basis is not orthonormal")
    mat, _ = _project_matrix(state, t)
    resid = b.conj() @ mat  # row k = unnormalized residual for outcome k
    probs = np.einsum("ij,ij->i", resid.conj(), resid).real
    idx = int(rng.choice(len(basis), p=probs / probs.sum()))
    prob = float(probs[idx])
    r = resid[idx] / np.sqrt(prob)
    n = state.num_qubits
    full = np.outer(b[idx], r).reshape([2] * n)
    full = np.moveaxis(full, range(k), t)
    return idx, prob, StateVector(n, full.reshape(-1))


def partial_trace(state: StateVector, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix over `keep`, ordered as listed."""
    t = _check_targets(state.num_qubits, keep)
    mat, _ = _project_matrix(state, t)
    return DensityMatrix(len(t), mat @ mat.conj().T)


def pure_density(state: StateVector) -> DensityMatrix:
    a = state.amplitudes
    return DensityMatrix(state.num_qubits, np.outer(a, a.conj()))


def fidelity_up_to_phase(a: StateVector, b: StateVector) -> float:
    """|<a|b>| — insensitive to global phase, 1 iff equal up to phase."""
    return min(1.0, abs(inner(a, b)))


def state_fidelity(rho: DensityMatrix, target: StateVector) -> float:
    """sqrt(<target|rho|target>); equals |<target|psi>| when rho = |psi><psi|."""
    if rho.num_qubits != target.num_qubits:
        raise ValueError("register size mismatch")
    v = target.amplitudes
    return float(np.sqrt(max(0.0, np.vdot(v, rho.entries @ v).real)))


def trace_distance(r1: DensityMatrix, r2: DensityMatrix) -> float:
    """(1/2) * trace norm of the difference."""
    if r1.num_qubits != r2.num_qubits:
        raise ValueError("register size mismatch")
    return float(0.5 * np.linalg.svd(r1.entries - r2.entries, compute_uv=False).sum())


def purity(rho: DensityMatrix) -> float:
    """trace(rho^2); 1 for pure states, 1/d for the maximally mixed state."""
    return float(np.trace(rho.entries @ rho.entries).real)


def principal_state(rho: DensityMatrix, *, min_purity: float = 1.0 - 1e-9) -> StateVector:
    """Extract the pure state from a (numerically) rank-one density matrix."""
    if purity(rho) < min_purity:
        raise ValueError(f"not pure enough: purity {purity(rho)}")
    vals, vecs = np.linalg.eigh(rho.entries)
    return StateVector(rho.num_qubits, vecs[:, -1])


def random_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state."""
    d = 1 << num_qubits
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return StateVector(num_qubits, v / np.linalg.norm(v))
