"""Draw random admissible channels and exercise them end to end.

For each drawn spec: build the channel, check which directions the
controller actually controls, then run seeded two-way teleportation trials
with Haar-random payloads and report the worst fidelity seen.  Alternatively
run a named catalog entry with --entry.
"""
import argparse

import numpy as np

from bcst import bcst_spec, controller_basis, run_bcst, validate_selection, verify_control
from bcst.catalog import entry
from bcst.qstate import random_state

FAMILIES_BY_L = {
    1: ("computational", "hadamard-product"),
    2: ("computational", "hadamard-product", "axes:zx", "axes:xz"),
    3: ("computational", "hadamard-product", "ghz"),
}


def draw_spec(rng: np.random.Generator, n: int):
    """Rejection-sample a rule-respecting ordered selection, then dress it
    with a random controller family, keyed subset and +-1 phases."""
    while True:
        cells = [(int(i), int(j)) for i, j in rng.integers(1, 5, size=(n, 2))]
        if len(set(cells)) == n and validate_selection(cells, 4) is None:
            break
    l = max(1, (n - 1).bit_length())
    family = str(rng.choice(FAMILIES_BY_L[l]))
    subset = [int(k) for k in rng.choice(1 << l, size=n, replace=False)]
    phases = [int(s) for s in rng.choice([-1, 1], size=n)]
    return bcst_spec(cells, controller_basis(family, l), subset=subset, phases=phases)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Random-channel teleportation trials"
    )
    parser.add_argument("--specs", type=int, default=5,
                        help="number of random channels to draw")
    parser.add_argument("--terms", type=int, default=2, choices=(2, 3, 4),
                        help="terms per channel")
    parser.add_argument("--trials", type=int, default=20,
                        help="teleportation trials per channel")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--entry", type=str, default=None,
                        help="run this catalog entry instead of random draws")
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    if args.entry is not None:
        specs = [(args.entry, entry(args.entry).spec)]
    else:
        specs = [(f"random-{k}", draw_spec(rng, args.terms))
                 for k in range(args.specs)]

    for name, spec in specs:
        control = verify_control(spec)
        worst = 1.0
        for _ in range(args.trials):
            a, b = random_state(1, rng), random_state(1, rng)
            _, _, tr = run_bcst(spec, a, b, rng=rng)
            worst = min(worst, tr.fidelity_bob, tr.fidelity_alice)
        cells = " ".join(f"({i},{j})" for i, j in spec.selection)
        print(f"{name}: cells {cells}  controller {spec.controller.name}  "
              f"control={control.sides}  worst fidelity {worst:.15f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
