"""Catalog of published controlled-teleportation channels, plus a recognizer.

Each entry carries the machine-readable spec that reproduces the channel as
printed in its source proposal.  Three entries are printed with structural
defects and are flagged rather than repaired: the Li and CQSDC five-qubit
channels hold one pair fixed (a Rule 1 violation, which is exactly why their
control is one-sided), and the second six-qubit four-term variant repeats
cells (Rule 2).  literal_state() expands every printed expression directly
from hand-written vectors, independent of the channel builder, so the two
paths can be compared.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import qstate
from .bases import (
    ControllerBasis,
    EntangledBasis,
    bell_basis,
    controller_basis,
    ghz_basis,
)
from .channel import (
    ChannelSpec,
    QubitLayout,
    RuleViolation,
    bcst_layout,
    bcst_spec,
    build_bcst_channel,
    build_bcst_channel_unchecked,
    validate_selection,
)
from .qstate import StateVector


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    source_ref: str
    spec: ChannelSpec
    qubit_count: int
    control_sides: str  # "both" | "first-only" | "second-only"
    rule_violation: RuleViolation | None


def _entry(id, source_ref, selection, family, l, subset, phases, sides) -> CatalogEntry:
    spec = bcst_spec(
        selection,
        controller_basis(family, l),
        subset=subset,
        phases=phases,
    )
    return CatalogEntry(
        id=id,
        source_ref=source_ref,
        spec=spec,
        qubit_count=4 + l,
        control_sides=sides,
        rule_violation=validate_selection(selection, 4),
    )


@lru_cache(maxsize=1)
def catalog_entries() -> tuple[CatalogEntry, ...]:
    return (
        # (|psi+ psi+>|+> + |psi- psi->|->)/sqrt2
        _entry("zha5", "Zha et al., five-qubit two-way proposal",
               [(1, 1), (2, 2)], "hadamard-product", 1, (0, 1), (1, 1), "both"),
        # (|psi+ psi+>|0> - |psi- phi->|1>)/sqrt2
        _entry("zha_ii5", "Zha et al., second five-qubit proposal",
               [(1, 1), (2, 4)], "computational", 1, (0, 1), (1, -1), "both"),
        # (|psi+>|+> + |psi->|->)/sqrt2 on the first pair, |psi+> fixed second
        _entry("li5", "Li et al., five-qubit proposal (one-sided control)",
               [(1, 1), (2, 1)], "hadamard-product", 1, (0, 1), (1, 1), "first-only"),
        # |phi+> fixed first pair, (|psi+>|0> + |psi->|1>)/sqrt2 on the second
        _entry("cqsdc5", "controlled secure direct communication five-qubit channel",
               [(3, 1), (3, 2)], "computational", 1, (0, 1), (1, 1), "second-only"),
        # (|psi+ phi+>|00> + |phi+ psi+>|11>)/sqrt2
        _entry("six1", "six-qubit two-term channel",
               [(1, 3), (3, 1)], "computational", 2, (0, 3), (1, 1), "both"),
        # (|psi+ psi+>|0+> + |psi+ psi->|0-> + |phi+ phi+>|1+> - |phi+ phi->|1->)/2
        _entry("six3", "six-qubit four-term channel",
               [(1, 1), (1, 2), (3, 3), (3, 4)], "axes:zx", 2, (0, 1, 2, 3),
               (1, 1, 1, -1), "both"),
        # (|psi+ psi+>|++> + |psi+ phi->|+-> + |phi- psi+>|-+> + |phi- phi->|-->)/2
        _entry("six4a", "six-qubit four-term channel, product-of-|+-> keying",
               [(1, 1), (1, 4), (4, 1), (4, 4)], "hadamard-product", 2, (0, 1, 2, 3),
               (1, 1, 1, 1), "both"),
        # (|psi+ phi+>|0+> + |psi+ phi+>|0-> + |phi+ psi+>|1+> - |phi+ psi+>|1->)/2
        # printed with repeated cells; algebraically equal to six1
        _entry("six4b", "six-qubit four-term variant as printed (repeats cells)",
               [(1, 3), (1, 3), (3, 1), (3, 1)], "axes:zx", 2, (0, 1, 2, 3),
               (1, 1, 1, -1), "both"),
        # (|psi+ psi+>G0+ - |psi- phi->G2+ - |phi+ phi+>G3+ - |phi- psi->G1+)/2
        _entry("seven", "seven-qubit four-term channel, GHZ-keyed",
               [(1, 1), (2, 4), (3, 3), (4, 2)], "ghz", 3, (0, 4, 6, 2),
               (1, -1, -1, -1), "both"),
    )


def entry(entry_id: str) -> CatalogEntry:
    for e in catalog_entries():
        if e.id == entry_id:
            return e
    raise KeyError(f"no catalog entry {entry_id!r}")


def reconstruct(e: CatalogEntry) -> StateVector:
    """Channel state from the entry's spec (bypassing rules when flagged)."""
    if e.rule_violation is None:
        state, _ = build_bcst_channel(e.spec)
    else:
        state, _ = build_bcst_channel_unchecked(e.spec)
    return state


# ---------------------------------------------------------------------------
# literal expansions, hand-written from the printed channel expressions

_S2 = np.sqrt(2.0)
_PSI_P = np.array([1, 0, 0, 1]) / _S2
_PSI_M = np.array([1, 0, 0, -1]) / _S2
_PHI_P = np.array([0, 1, 1, 0]) / _S2
_PHI_M = np.array([0, 1, -1, 0]) / _S2
_K0 = np.array([1.0, 0.0])
_K1 = np.array([0.0, 1.0])
_PLUS = np.array([1, 1]) / _S2
_MINUS = np.array([1, -1]) / _S2
_G0P = np.array([1, 0, 0, 0, 0, 0, 0, 1]) / _S2  # |000>+|111>
_G1P = np.array([0, 1, 0, 0, 0, 0, 1, 0]) / _S2  # |001>+|110>
_G2P = np.array([0, 0, 1, 0, 0, 1, 0, 0]) / _S2  # |010>+|101>
_G3P = np.array([0, 0, 0, 1, 1, 0, 0, 0]) / _S2  # |011>+|100>

_LITERAL_TERMS: dict[str, list[tuple[float, tuple[np.ndarray, ...]]]] = {
    "zha5": [(1, (_PSI_P, _PSI_P, _PLUS)), (1, (_PSI_M, _PSI_M, _MINUS))],
    "zha_ii5": [(1, (_PSI_P, _PSI_P, _K0)), (-1, (_PSI_M, _PHI_M, _K1))],
    "li5": [(1, (_PSI_P, _PSI_P, _PLUS)), (1, (_PSI_M, _PSI_P, _MINUS))],
    "cqsdc5": [(1, (_PHI_P, _PSI_P, _K0)), (1, (_PHI_P, _PSI_M, _K1))],
    "six1": [(1, (_PSI_P, _PHI_P, _K0, _K0)), (1, (_PHI_P, _PSI_P, _K1, _K1))],
    "six3": [
        (1, (_PSI_P, _PSI_P, _K0, _PLUS)),
        (1, (_PSI_P, _PSI_M, _K0, _MINUS)),
        (1, (_PHI_P, _PHI_P, _K1, _PLUS)),
        (-1, (_PHI_P, _PHI_M, _K1, _MINUS)),
    ],
    "six4a": [
        (1, (_PSI_P, _PSI_P, _PLUS, _PLUS)),
        (1, (_PSI_P, _PHI_M, _PLUS, _MINUS)),
        (1, (_PHI_M, _PSI_P, _MINUS, _PLUS)),
        (1, (_PHI_M, _PHI_M, _MINUS, _MINUS)),
    ],
    "six4b": [
        (1, (_PSI_P, _PHI_P, _K0, _PLUS)),
        (1, (_PSI_P, _PHI_P, _K0, _MINUS)),
        (1, (_PHI_P, _PSI_P, _K1, _PLUS)),
        (-1, (_PHI_P, _PSI_P, _K1, _MINUS)),
    ],
    "seven": [
        (1, (_PSI_P, _PSI_P, _G0P)),
        (-1, (_PSI_M, _PHI_M, _G2P)),
        (-1, (_PHI_P, _PHI_P, _G3P)),
        (-1, (_PHI_M, _PSI_M, _G1P)),
    ],
}


def literal_state(entry_id: str) -> StateVector:
    """Printed channel expression expanded term by term, builder-free."""
    terms = _LITERAL_TERMS[entry_id]
    acc = None
    for sign, factors in terms:
        v = factors[0]
        for f in factors[1:]:
            v = np.kron(v, f)
        acc = sign * v if acc is None else acc + sign * v
    acc = acc / np.sqrt(len(terms))
    return StateVector(int(np.log2(acc.size)), acc)


# ---------------------------------------------------------------------------
# recognition: decompose an amplitude vector back into a channel spec

def candidate_bases(l: int) -> list[ControllerBasis]:
    """Default controller-basis candidates for an l-qubit controller: every
    per-qubit z/x measurement-axis product, plus the GHZ basis when l = 3."""
    seen = []
    axes_strings = ["z" * l, "x" * l]
    axes_strings += ["".join(c) for c in itertools.product("zx", repeat=l)]
    for axes in axes_strings:
        if axes not in seen:
            seen.append(axes)
    out = [controller_basis(f"axes:{a}", l) for a in seen]
    if l == 3:
        gb = ghz_basis()
        out.append(ControllerBasis("ghz", 3, gb.elements))
    return out


def recognize(
    state: StateVector,
    layout: QubitLayout | None = None,
    candidates: list[ControllerBasis] | None = None,
    pair_basis: EntangledBasis | None = None,
    *,
    uniform_tol: float = 1e-9,
) -> ChannelSpec | None:
    """Recover the channel spec that produced `state`, or None.

    For each candidate controller basis: projects the controller qubits onto
    every basis state, requires the surviving projections to have uniform
    weight 1/n, and requires each residual to be a single grid product up to
    a unit phase.  Among candidates that decompose the whole state, the one
    with the fewest terms wins and candidate order breaks ties.  (A state
    keyed to n distinct cells can also split into n' > n terms with repeated
    cells under another basis, e.g. GHZ keying seen computationally, so the
    smallest decomposition is the originating one.)
    """
    pb = pair_basis if pair_basis is not None else bell_basis()
    p = pb.p
    l = state.num_qubits - 2 * p
    if l < 1:
        return None
    if layout is None:
        layout = bcst_layout(p, l)
    if len(layout.roles) != state.num_qubits:
        raise ValueError("layout does not match the register size")
    ctrl_pos = layout.controller_positions
    if len(ctrl_pos) != l:
        return None
    group1, group2 = layout.pair_groups()

    # residuals come out in ascending-position order; build the permutation
    # that restores [first pair, second pair] role order
    remaining = [q for q in range(state.num_qubits) if q not in ctrl_pos]
    desired = list(group1 + group2)
    perm = tuple(remaining.index(q) for q in desired)

    if candidates is None:
        candidates = candidate_bases(l)

    grid = [
        (i, j, np.kron(pb.elements[i - 1].amplitudes, pb.elements[j - 1].amplitudes))
        for i in range(1, pb.size + 1)
        for j in range(1, pb.size + 1)
    ]

    best: ChannelSpec | None = None
    for cand in candidates:
        if cand.l != l:
            continue
        found: list[tuple[int, tuple[int, int], complex]] = []
        probs: list[float] = []
        ok = True
        for idx, a in enumerate(cand.elements):
            prob, resid = qstate.split_factor(state, ctrl_pos, a)
            if resid is None:
                continue
            resid = qstate.permute_qubits(resid, perm)
            match = None
            for i, j, v in grid:
                overlap = complex(np.vdot(v, resid.amplitudes))
                if abs(overlap) >= 1.0 - uniform_tol:
                    match = (i, j, overlap)
                    break
            if match is None:
                ok = False
                break
            found.append((idx, (match[0], match[1]), match[2]))
            probs.append(prob)
        if not ok or len(found) < 2:
            continue
        n = len(found)
        if any(abs(pr - 1.0 / n) > uniform_tol for pr in probs):
            continue
        if abs(sum(probs) - 1.0) > uniform_tol:
            continue
        spec = ChannelSpec(
            kind="bcst",
            pair_basis=pb,
            selection=tuple(cell for _, cell, _ in found),
            phases=tuple(_snap_phase(ph) for _, _, ph in found),
            controller=cand,
            subset=tuple(idx for idx, _, _ in found),
        )
        rebuilt, _ = build_bcst_channel_unchecked(spec)
        if qstate.fidelity_up_to_phase(rebuilt, state) < 1.0 - uniform_tol:
            continue
        if best is None or spec.n < best.n:
            best = spec
    return best


def _snap_phase(ph: complex) -> complex:
    """Clean up unit phases that are numerically +-1 or +-i."""
    for exact in (1, -1, 1j, -1j):
        if abs(ph - exact) < 1e-9:
            return complex(exact)
    return ph / abs(ph)
