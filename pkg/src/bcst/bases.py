"""Entangled pair bases and controller measurement bases.

Bell order is fixed as psi+ (|00>+|11>), psi- (|00>-|11>), phi+ (|01>+|10>),
phi- (|01>-|10>), all over sqrt(2).  Three-qubit GHZ-class states are
(|b> + sign*|~b>)/sqrt(2) with b the 3-bit pattern of x; x and 7-x label the
same ray, so labels normalize into x in [0, 3].
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .qstate import TOLERANCE, StateVector, ket, tensor

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


class BellKind(IntEnum):
    PSI_PLUS = 0
    PSI_MINUS = 1
    PHI_PLUS = 2
    PHI_MINUS = 3

    @property
    def symbol(self) -> str:
        return ("psi+", "psi-", "phi+", "phi-")[self]


def bell(kind: BellKind) -> StateVector:
    amps = np.zeros(4, dtype=np.complex128)
    if kind in (BellKind.PSI_PLUS, BellKind.PSI_MINUS):
        amps[0] = _INV_SQRT2
        amps[3] = _INV_SQRT2 if kind == BellKind.PSI_PLUS else -_INV_SQRT2
    else:
        amps[1] = _INV_SQRT2
        amps[2] = _INV_SQRT2 if kind == BellKind.PHI_PLUS else -_INV_SQRT2
    return StateVector(2, amps)


@dataclass(frozen=True)
class GhzLabel:
    """Label (x, sign) for (|x:3bits> + sign*|complement>)/sqrt(2)."""

    x: int
    sign: int

    def __post_init__(self):
        if not 0 <= self.x <= 7:
            raise ValueError(f"x={self.x} outside [0, 7]")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +-1, got {self.sign}")

    def canonical(self) -> "GhzLabel":
        return GhzLabel(7 - self.x, self.sign) if self.x > 3 else self

    @property
    def symbol(self) -> str:
        return f"ghz{self.x}{'+' if self.sign == 1 else '-'}"


def ghz(label: GhzLabel) -> StateVector:
    amps = np.zeros(8, dtype=np.complex128)
    amps[label.x] = _INV_SQRT2
    amps[7 - label.x] += label.sign * _INV_SQRT2
    return StateVector(3, amps)


@dataclass(frozen=True)
class EntangledBasis:
    """Complete orthonormal basis of p-qubit entangled states."""

    name: str
    p: int
    elements: tuple[StateVector, ...]

    @property
    def size(self) -> int:
        return len(self.elements)


def bell_basis() -> EntangledBasis:
    return EntangledBasis("bell", 2, tuple(bell(k) for k in BellKind))


def ghz_basis() -> EntangledBasis:
    labels = [GhzLabel(x, s) for x in range(4) for s in (1, -1)]
    return EntangledBasis("ghz", 3, tuple(ghz(lb) for lb in labels))


GHZ_BASIS_LABELS = tuple(GhzLabel(x, s) for x in range(4) for s in (1, -1))


@dataclass(frozen=True)
class ControllerBasis:
    """Complete orthonormal basis for the controller's l-qubit register."""

    name: str
    l: int
    elements: tuple[StateVector, ...]

    def __post_init__(self):
        if len(self.elements) != 1 << self.l:
            raise ValueError(
                f"{len(self.elements)} elements do not form a complete basis "
                f"on {self.l} qubits"
            )
        report = validate_orthonormal(self.elements)
        if not report.orthonormal:
            raise ValueError(f"controller basis not orthonormal: {report}")


@dataclass(frozen=True)
class OrthonormalityReport:
    orthonormal: bool
    complete: bool
    max_deviation: float
    worst_pair: tuple[int, int] | None

    def __bool__(self) -> bool:
        return self.orthonormal


def validate_orthonormal(states) -> OrthonormalityReport:
    """Pairwise orthonormality within tolerance; completeness flagged separately."""
    states = list(states)
    if not states:
        raise ValueError("no states given")
    dim = states[0].dim
    if any(s.dim != dim for s in states):
        raise ValueError("states live on different registers")
    b = np.stack([s.amplitudes for s in states])
    dev = np.abs(b.conj() @ b.T - np.eye(len(states)))
    worst = np.unravel_index(int(np.argmax(dev)), dev.shape)
    max_dev = float(dev[worst])
    return OrthonormalityReport(
        orthonormal=max_dev <= TOLERANCE,
        complete=len(states) == dim,
        max_deviation=max_dev,
        worst_pair=(int(worst[0]), int(worst[1])) if max_dev > TOLERANCE else None,
    )


_PLUS = StateVector(1, np.array([1, 1]) * _INV_SQRT2)
_MINUS = StateVector(1, np.array([1, -1]) * _INV_SQRT2)


def product_axis_basis(axes: str) -> ControllerBasis:
    """Product basis with a measurement axis per qubit: 'z' gives |0>,|1>,
    'x' gives |+>,|->.  Elements are ordered by the binary counter over per-
    qubit choices (bit 0 selects |0> or |+>)."""
    if not axes or any(a not in "zx" for a in axes):
        raise ValueError(f"axes must be a string over 'z'/'x', got {axes!r}")
    l = len(axes)
    elements = []
    for idx in range(1 << l):
        parts = []
        for pos, axis in enumerate(axes):
            bit = (idx >> (l - 1 - pos)) & 1
            if axis == "z":
                parts.append(ket("1" if bit else "0"))
            else:
                parts.append(_MINUS if bit else _PLUS)
        elements.append(tensor(*parts))
    name = {"z" * l: "computational", "x" * l: "hadamard-product"}.get(
        axes, f"axes:{axes}"
    )
    return ControllerBasis(name, l, tuple(elements))


def controller_basis(name: str, l: int) -> ControllerBasis:
    """Named controller basis family on l qubits."""
    if name == "computational":
        return product_axis_basis("z" * l)
    if name == "hadamard-product":
        return product_axis_basis("x" * l)
    if name == "ghz":
        if l != 3:
            raise ValueError("ghz controller basis requires l=3")
        gb = ghz_basis()
        return ControllerBasis("ghz", 3, gb.elements)
    if name.startswith("axes:"):
        axes = name[len("axes:"):]
        if len(axes) != l:
            raise ValueError(f"axes {axes!r} do not cover {l} qubits")
        return product_axis_basis(axes)
    raise ValueError(f"unknown controller basis family {name!r}")


def complete_basis(elements) -> tuple[StateVector, ...]:
    """Extend orthonormal states to a full basis via the SVD null space.

    The given states come first, unchanged; the completion is deterministic.
    """
    elements = tuple(elements)
    report = validate_orthonormal(elements)
    if not report.orthonormal:
        raise ValueError("states to complete are not orthonormal")
    dim = elements[0].dim
    n = len(elements)
    if n == dim:
        return elements
    if n > dim:
        raise ValueError("more states than the space can hold")
    m = np.stack([e.amplitudes.conj() for e in elements])
    _, _, vh = np.linalg.svd(m, full_matrices=True)
    extra = vh[n:].conj()
    nq = elements[0].num_qubits
    return elements + tuple(StateVector(nq, row) for row in extra)


def custom_controller_basis(elements, name: str = "custom") -> ControllerBasis:
    """Controller basis from explicit states, completed if fewer than 2^l."""
    full = complete_basis(elements)
    return ControllerBasis(name, full[0].num_qubits, full)
