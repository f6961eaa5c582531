"""Channel spec documents (JSON) and amplitude files (plain text).

A spec document carries: version, kind ("bcst" | "qd"), pair_basis ("bell" |
"ghz"), selection ([[i, j], ...] 1-based, or [i, ...] for dialogue), phases
(+-1, or [re, im]), controller (a named family with an ordered subset, or
explicit custom states), and an optional layout override (role-name
permutation of the canonical register order).

Amplitudes in custom controllers may be written exactly as integer multiples
of powers of 1/sqrt(2): {"num": k, "den_sqrt2_power": p} denotes
k * 2**(-p/2), and that decoding expression is canonical so symbolic values
round-trip bit-exactly through serialize/parse.
"""
from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .bases import bell_basis, controller_basis, custom_controller_basis, ghz_basis
from .channel import ChannelSpec, bcst_layout, qd_layout
from .qstate import StateVector, from_amplitudes

DOCUMENT_VERSION = 1


class SpecDocumentError(ValueError):
    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field!r}")
        super().__init__(f"{message}" + (f" ({', '.join(loc)})" if loc else ""))
        self.line = line
        self.field = field


# -- exact sqrt(2)-power scalars -------------------------------------------

def sqrt2_decode(value: Any, field: str) -> float:
    """Number, or {"num": k, "den_sqrt2_power": p} meaning k * 2**(-p/2)."""
    if isinstance(value, bool):
        raise SpecDocumentError("expected a number", field=field)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, dict):
        extra = set(value) - {"num", "den_sqrt2_power"}
        if extra or "num" not in value or "den_sqrt2_power" not in value:
            raise SpecDocumentError(
                "symbolic scalar needs exactly num and den_sqrt2_power", field=field
            )
        num, k = value["num"], value["den_sqrt2_power"]
        if not isinstance(num, int) or not isinstance(k, int) or k < 0:
            raise SpecDocumentError(
                "num must be an integer, den_sqrt2_power a non-negative integer",
                field=field,
            )
        return _sqrt2_value(num, k)
    raise SpecDocumentError(f"cannot read scalar {value!r}", field=field)


def _sqrt2_value(num: int, k: int) -> float:
    """num / sqrt(2)^k, staged so even powers divide by exact integers.

    This reproduces bit-for-bit the doubles the builders emit (1/sqrt(2)
    factors followed by halvings); a single 2**(-k/2) power can land one
    ulp away for odd k.
    """
    value = num / float(1 << (k // 2))
    if k % 2:
        value /= math.sqrt(2.0)
    return value


def sqrt2_encode(x: float, max_power: int = 40) -> Any:
    """Render x symbolically as {"num", "den_sqrt2_power"} when possible."""
    if x == 0:
        return 0
    for k in range(max_power + 1):
        scaled = x * 2.0 ** (k / 2)
        num = round(scaled)
        if num != 0 and abs(scaled - num) <= 1e-9 * max(1, abs(num)):
            if _sqrt2_value(num, k) == x:
                return {"num": int(num), "den_sqrt2_power": k} if k else int(num)
    return float(f"{x:.17g}")


# -- parsing ----------------------------------------------------------------

def _require(doc: dict, key: str):
    if key not in doc:
        raise SpecDocumentError(f"missing required field {key!r}", field=key)
    return doc[key]


def _parse_phase(raw, field: str) -> complex:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return complex(raw)
    if isinstance(raw, list) and len(raw) == 2:
        return complex(
            sqrt2_decode(raw[0], field=field), sqrt2_decode(raw[1], field=field)
        )
    raise SpecDocumentError(
        "phase must be a number or an [re, im] pair", field=field
    )


def _parse_amplitude(raw, field: str) -> complex:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return complex(raw)
    if isinstance(raw, dict):
        return complex(sqrt2_decode(raw, field))
    if isinstance(raw, list) and len(raw) == 2:
        return complex(
            sqrt2_decode(raw[0], field=field), sqrt2_decode(raw[1], field=field)
        )
    raise SpecDocumentError(
        "amplitude must be a number, [re, im] pair, or symbolic scalar", field=field
    )


def _parse_controller(raw, n: int):
    if not isinstance(raw, dict):
        raise SpecDocumentError("controller must be an object", field="controller")
    if "custom" in raw:
        rows = raw["custom"]
        if not isinstance(rows, list) or not rows:
            raise SpecDocumentError(
                "custom controller needs a list of states", field="controller.custom"
            )
        states = []
        for r, row in enumerate(rows):
            if not isinstance(row, list):
                raise SpecDocumentError(
                    "each custom state is a list of amplitudes",
                    field=f"controller.custom[{r}]",
                )
            amps = [
                _parse_amplitude(a, f"controller.custom[{r}][{k}]")
                for k, a in enumerate(row)
            ]
            try:
                states.append(from_amplitudes(amps, atol=1e-9))
            except ValueError as exc:
                raise SpecDocumentError(str(exc), field=f"controller.custom[{r}]")
        try:
            basis = custom_controller_basis(states)
        except ValueError as exc:
            raise SpecDocumentError(str(exc), field="controller.custom")
        subset = raw.get("subset", list(range(len(states))))
        return basis, _parse_subset(subset, n)
    family = raw.get("family")
    if not isinstance(family, str):
        raise SpecDocumentError(
            "controller needs either a family name or custom states",
            field="controller.family",
        )
    if family == "ghz":
        l = 3
    elif family.startswith("axes:"):
        l = len(family) - len("axes:")
    else:
        l = raw.get("l", max(1, (n - 1).bit_length()))
    if not isinstance(l, int) or l < 1:
        raise SpecDocumentError("l must be a positive integer", field="controller.l")
    try:
        basis = controller_basis(family, l)
    except ValueError as exc:
        raise SpecDocumentError(str(exc), field="controller.family")
    subset = raw.get("subset", list(range(n)))
    return basis, _parse_subset(subset, n)


def _parse_subset(raw, n: int) -> tuple[int, ...]:
    if (
        not isinstance(raw, list)
        or len(raw) != n
        or any(not isinstance(k, int) or isinstance(k, bool) for k in raw)
    ):
        raise SpecDocumentError(
            f"subset must list {n} integer indices", field="controller.subset"
        )
    return tuple(raw)


def parse_spec_document(text: str) -> tuple[ChannelSpec, tuple[str, ...] | None]:
    """Parse a spec document; returns (spec, layout override or None).

    Structural problems raise SpecDocumentError anchored to a line (JSON
    breakage) or a field path; rule violations are NOT checked here, they
    surface when the channel is built.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecDocumentError(f"not valid JSON: {exc.msg}", line=exc.lineno)
    if not isinstance(doc, dict):
        raise SpecDocumentError("document must be a JSON object")

    version = _require(doc, "version")
    if version != DOCUMENT_VERSION:
        raise SpecDocumentError(
            f"unsupported version {version!r}", field="version"
        )
    kind = _require(doc, "kind")
    if kind not in ("bcst", "qd"):
        raise SpecDocumentError(f"kind must be bcst or qd, got {kind!r}", field="kind")
    basis_name = _require(doc, "pair_basis")
    if basis_name == "bell":
        pb = bell_basis()
    elif basis_name == "ghz":
        pb = ghz_basis()
    else:
        raise SpecDocumentError(
            f"pair_basis must be bell or ghz, got {basis_name!r}", field="pair_basis"
        )

    raw_sel = _require(doc, "selection")
    if not isinstance(raw_sel, list) or len(raw_sel) < 2:
        raise SpecDocumentError(
            "selection must list at least two entries", field="selection"
        )
    selection: tuple
    if kind == "bcst":
        cells = []
        for k, it in enumerate(raw_sel):
            if (
                not isinstance(it, list)
                or len(it) != 2
                or any(not isinstance(x, int) or isinstance(x, bool) for x in it)
            ):
                raise SpecDocumentError(
                    "each selection entry is a 1-based [i, j] pair",
                    field=f"selection[{k}]",
                )
            cells.append((it[0], it[1]))
        selection = tuple(cells)
    else:
        for k, it in enumerate(raw_sel):
            if not isinstance(it, int) or isinstance(it, bool):
                raise SpecDocumentError(
                    "dialogue selection entries are single 1-based indices",
                    field=f"selection[{k}]",
                )
        selection = tuple(raw_sel)
    n = len(selection)

    raw_phases = doc.get("phases", [1] * n)
    if not isinstance(raw_phases, list) or len(raw_phases) != n:
        raise SpecDocumentError(
            f"phases must list {n} values", field="phases"
        )
    phases = tuple(
        _parse_phase(p, field=f"phases[{k}]") for k, p in enumerate(raw_phases)
    )

    controller, subset = _parse_controller(_require(doc, "controller"), n)

    layout = doc.get("layout")
    if layout is not None:
        if not isinstance(layout, list) or any(not isinstance(r, str) for r in layout):
            raise SpecDocumentError(
                "layout must be a list of role names", field="layout"
            )
        layout = tuple(layout)

    spec = ChannelSpec(
        kind=kind,
        pair_basis=pb,
        selection=selection,
        phases=phases,
        controller=controller,
        subset=subset,
    )
    try:
        spec.validate(require_rules=False)
    except ValueError as exc:
        raise SpecDocumentError(str(exc))
    return spec, layout


def load_spec_document(path) -> tuple[ChannelSpec, tuple[str, ...] | None]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec_document(fh.read())


# -- serialization ----------------------------------------------------------

def _encode_phase(ph: complex):
    if abs(ph.imag) < 1e-15 and float(ph.real) in (1.0, -1.0):
        return int(ph.real)
    return [sqrt2_encode(ph.real), sqrt2_encode(ph.imag)]


def serialize_spec(
    spec: ChannelSpec, layout: tuple[str, ...] | None = None
) -> str:
    """Spec document text that parse_spec_document maps back to `spec`."""
    doc: dict[str, Any] = {
        "version": DOCUMENT_VERSION,
        "kind": spec.kind,
        "pair_basis": spec.pair_basis.name,
        "selection": [list(c) for c in spec.selection]
        if spec.kind == "bcst"
        else list(spec.selection),
        "phases": [_encode_phase(complex(p)) for p in spec.phases],
    }
    name = spec.controller.name
    if name in ("computational", "hadamard-product", "ghz") or name.startswith("axes:"):
        ctrl: dict[str, Any] = {"family": name, "subset": list(spec.subset)}
        if name in ("computational", "hadamard-product"):
            ctrl["l"] = spec.controller.l
    else:
        ctrl = {
            "custom": [
                [
                    [sqrt2_encode(a.real), sqrt2_encode(a.imag)]
                    for a in spec.controller.elements[k].amplitudes
                ]
                for k in spec.subset
            ]
        }
    doc["controller"] = ctrl
    if layout is not None:
        doc["layout"] = list(layout)
    return json.dumps(doc, indent=2) + "\n"


# -- amplitude files ---------------------------------------------------------

def write_amplitude_file(path, state: StateVector) -> None:
    """One `index re im` row per basis state, 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# qubits: {state.num_qubits}\n")
        for k, a in enumerate(state.amplitudes):
            fh.write(f"{k} {a.real:.17g} {a.imag:.17g}\n")


def read_amplitude_file(path, *, atol: float = 1e-9) -> StateVector:
    """Inverse of write_amplitude_file; norm checked within atol, then fixed."""
    rows: dict[int, complex] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise SpecDocumentError(
                    f"expected 'index re im', got {line!r}", line=ln
                )
            try:
                k, re, im = int(parts[0]), float(parts[1]), float(parts[2])
            except ValueError:
                raise SpecDocumentError(f"unreadable row {line!r}", line=ln)
            if k in rows:
                raise SpecDocumentError(f"duplicate index {k}", line=ln)
            rows[k] = complex(re, im)
    size = len(rows)
    if size < 2 or size & (size - 1) or set(rows) != set(range(size)):
        raise SpecDocumentError(
            f"rows must cover exactly 0..2^n-1, got {size} rows"
        )
    amps = np.array([rows[k] for k in range(size)])
    try:
        return from_amplitudes(amps, atol=atol)
    except ValueError as exc:
        raise SpecDocumentError(str(exc))
