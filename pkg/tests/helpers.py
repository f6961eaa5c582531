"""Shared generators for the property suites: random rule-valid specs."""
import numpy as np

from bcst.bases import controller_basis
from bcst.channel import ChannelSpec, bcst_spec, validate_selection

# controller families usable at each register size (all appear in the
# recognizer's default candidate list)
FAMILIES_BY_L = {
    1: ("computational", "hadamard-product"),
    2: ("computational", "hadamard-product", "axes:zx", "axes:xz"),
    3: ("computational", "hadamard-product", "ghz"),
}

ALL_CELLS = [(i, j) for i in range(1, 5) for j in range(1, 5)]


def random_selection(rng: np.random.Generator, n: int) -> tuple:
    """Ordered rule-valid selection on the 4x4 Bell grid, by rejection."""
    while True:
        idx = rng.choice(len(ALL_CELLS), size=n, replace=False)
        sel = tuple(ALL_CELLS[k] for k in idx)
        if validate_selection(sel, 4) is None:
            return sel


def random_spec(rng: np.random.Generator, n: int | None = None,
                l: int | None = None) -> ChannelSpec:
    """Random valid BCST spec: rule-valid cells, family controller, +-1 phases."""
    if n is None:
        n = int(rng.choice([2, 3, 4]))
    if l is None:
        l = max(1, (n - 1).bit_length())
    family = str(rng.choice(FAMILIES_BY_L[l]))
    ctrl = controller_basis(family, l)
    subset = tuple(int(k) for k in rng.choice(1 << l, size=n, replace=False))
    phases = tuple(complex(rng.choice([1.0, -1.0])) for _ in range(n))
    return bcst_spec(random_selection(rng, n), ctrl, subset=subset, phases=phases)


def spec_key(spec: ChannelSpec):
    """Order-insensitive identity of a spec: which controller state keys
    which grid cell with which phase."""
    terms = frozenset(
        (spec.subset[m], spec.selection[m],
         round(complex(spec.phases[m]).real, 9),
         round(complex(spec.phases[m]).imag, 9))
        for m in range(spec.n)
    )
    return (spec.kind, spec.pair_basis.name, spec.controller.name, terms)
