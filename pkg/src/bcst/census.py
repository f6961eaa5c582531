"""Counting admissible channel selections three independent ways.

formula_count evaluates a closed-form expression for the number of ordered
rule-respecting selections over the 2^p x 2^p grid.  oracle_count filters
every one of the (rows*cols)^n ordered cell tuples through the structural
rules.  enumerate_selections generates only duplicate-free tuples and filters
the row/column rule, in lexicographic order.  The oracle and the enumerator
must always agree; the closed form does not for some n, and census_report
records that honestly rather than reconciling it.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .channel import PairCell

ORACLE_LIMIT = 10**8
_CHUNK = 1 << 18


class IntractableError(ValueError):
    pass


def formula_count(p: int, n: int) -> int:
    """Closed-form selection count for n terms over the 2^p x 2^p grid.

    Two branches: a falling factorial of grid cells when n exceeds the basis
    size 2^p, otherwise 2^(pn) * (2^(pn) - 2^(p+1) + 1).  The n == 2^p
    boundary uses the second branch (it reproduces the published figure for
    p=2, n=4).  Treated as a conjectured count and audited by census_report.
    """
    if p < 1 or n < 2:
        raise ValueError("need p >= 1 and n >= 2")
    cells = 4**p
    if n > cells:
        raise ValueError(f"cannot select {n} distinct cells from {cells}")
    if n > 2**p:
        return math.perm(cells, n)
    return 2 ** (p * n) * (2 ** (p * n) - 2 ** (p + 1) + 1)


def _guard(rows: int, cols: int, n: int) -> None:
    if rows < 2 or cols < 2 or n < 2:
        raise ValueError("need rows, cols and n all >= 2")
    if n > rows * cols:
        raise ValueError(f"cannot select {n} distinct cells from {rows * cols}")
    if (rows * cols) ** n > ORACLE_LIMIT:
        raise IntractableError(
            f"{(rows * cols) ** n} tuples exceed the exhaustive limit {ORACLE_LIMIT}"
        )


def oracle_count(rows: int, cols: int, n: int) -> int:
    """Count valid ordered selections by filtering all (rows*cols)^n tuples.

    Chunked map-reduce over the flat tuple index; each tuple is decoded into
    cells and kept iff all cells are distinct and neither the row nor the
    column coordinate is constant.
    """
    _guard(rows, cols, n)
    base = rows * cols
    total = base**n
    count = 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = np.empty((idx.size, n), dtype=np.int64)
        rem = idx
        for pos in range(n - 1, -1, -1):
            digits[:, pos] = rem % base
            rem = rem // base
        r = digits // cols
        c = digits % cols
        distinct = np.all(np.diff(np.sort(digits, axis=1), axis=1) != 0, axis=1)
        same_row = np.all(r == r[:, :1], axis=1)
        same_col = np.all(c == c[:, :1], axis=1)
        count += int(np.count_nonzero(distinct & ~same_row & ~same_col))
    return count


def enumerate_selections(rows: int, cols: int, n: int) -> Iterator[tuple[PairCell, ...]]:
    """Yield valid ordered selections (1-based cells) in lexicographic order.

    Constructive counterpart to oracle_count: duplicates are never generated,
    only the row/column rule is filtered.
    """
    _guard(rows, cols, n)
    cells = [(i, j) for i in range(1, rows + 1) for j in range(1, cols + 1)]
    for combo in itertools.permutations(cells, n):
        first_row = combo[0][0]
        first_col = combo[0][1]
        if all(i == first_row for i, _ in combo):
            continue
        if all(j == first_col for _, j in combo):
            continue
        yield combo


def multiplicity_factor(l: int, n: int) -> int:
    """Ordered ways to key n terms to an l-qubit controller: (2^l)!/(2^l-n)!."""
    if l < 1 or n < 1:
        raise ValueError("need l >= 1 and n >= 1")
    if n > 1 << l:
        raise ValueError(f"{l} controller qubits cannot key {n} terms")
    return math.perm(1 << l, n)


@dataclass(frozen=True)
class CensusReport:
    p: int
    n: int
    formula_value: int
    oracle_value: int | None
    constructive_value: int | None
    controller_qubits: int
    controller_multiplicity: int
    formula_matches_oracle: bool | None
    oracle_matches_constructive: bool | None

    def lines(self) -> list[str]:
        rows = 1 << self.p
        out = [
            f"census p={self.p} n={self.n} (grid {rows}x{rows})",
            f"  closed form:  {self.formula_value}",
        ]
        if self.oracle_value is None:
            out.append(f"  oracle:       intractable (limit {ORACLE_LIMIT})")
        else:
            out.append(f"  oracle:       {self.oracle_value}")
            out.append(f"  constructive: {self.constructive_value}")
            verdict = "MATCH" if self.formula_matches_oracle else "MISMATCH"
            out.append(f"  closed form vs oracle: {verdict}")
        out.append(
            f"  controller orderings (l={self.controller_qubits}): "
            f"x{self.controller_multiplicity}"
        )
        return out


def census_report(p: int, n: int) -> CensusReport:
    """Cross-check the closed form against both exhaustive counters.

    Intractable grid sizes leave the exhaustive values absent; a closed form
    vs oracle mismatch is a reportable finding, never an exception.
    """
    formula = formula_count(p, n)
    size = 1 << p
    try:
        oracle = oracle_count(size, size, n)
        constructive = sum(1 for _ in enumerate_selections(size, size, n))
    except IntractableError:
        oracle = constructive = None
    l = max(1, math.ceil(math.log2(n)))
    return CensusReport(
        p=p,
        n=n,
        formula_value=formula,
        oracle_value=oracle,
        constructive_value=constructive,
        controller_qubits=l,
        controller_multiplicity=multiplicity_factor(l, n),
        formula_matches_oracle=None if oracle is None else formula == oracle,
        oracle_matches_constructive=None if oracle is None else oracle == constructive,
    )
