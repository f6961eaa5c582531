"""Sweep the selection census over a range of term counts.

Prints, for each n, the closed-form count next to the two exhaustive
counters so the formula-vs-oracle disagreement is visible in one table.
"""
import argparse

from bcst import census_report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Cross-check selection counts over the 2^p x 2^p pair grid"
    )
    parser.add_argument("--p", type=int, default=2,
                        help="pairs of qubits per term (grid is 2^p x 2^p)")
    parser.add_argument("--min-n", type=int, default=2, help="smallest term count")
    parser.add_argument("--max-n", type=int, default=5, help="largest term count")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.min_n < 2 or args.max_n < args.min_n:
        build_parser().error("need 2 <= min-n <= max-n")
    for n in range(args.min_n, args.max_n + 1):
        report = census_report(args.p, n)
        for line in report.lines():
            print(line)
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
