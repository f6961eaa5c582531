"""Channel-spec documents and amplitude files."""
import json

import numpy as np
import pytest

from bcst.bases import controller_basis, custom_controller_basis
from bcst.catalog import catalog_entries, entry
from bcst.channel import bcst_spec, build_bcst_channel, build_bcst_channel_unchecked, qd_spec
from bcst.qstate import fidelity_up_to_phase, ket, random_state
from bcst.specdoc import (
    SpecDocumentError,
    parse_spec_document,
    read_amplitude_file,
    serialize_spec,
    sqrt2_decode,
    sqrt2_encode,
    write_amplitude_file,
)


def test_sqrt2_encoding_is_bit_exact():
    for value in (0.5, -0.5, 1 / np.sqrt(2), -1 / np.sqrt(2), 0.25,
                  1 / (2 * np.sqrt(2)), 1.0, 0.0, -1.0):
        encoded = sqrt2_encode(value)
        assert sqrt2_decode(encoded, "x") == value  # exact, not approx


def test_sqrt2_plain_integers_stay_plain():
    assert sqrt2_encode(1.0) == 1
    assert sqrt2_encode(-1.0) == -1
    assert sqrt2_encode(0.0) == 0


def test_sqrt2_symbolic_form():
    enc = sqrt2_encode(1 / np.sqrt(2))
    assert enc == {"num": 1, "den_sqrt2_power": 1}
    assert sqrt2_decode({"num": 3, "den_sqrt2_power": 4}, "x") == 3 * 2.0 ** -2


def test_sqrt2_decode_rejects_malformed():
    with pytest.raises(SpecDocumentError):
        sqrt2_decode({"num": 1}, "phases[0]")
    with pytest.raises(SpecDocumentError):
        sqrt2_decode("one", "phases[0]")


@pytest.mark.parametrize("entry_id", [e.id for e in catalog_entries()])
def test_serialize_parse_round_trip(entry_id):
    spec = entry(entry_id).spec
    parsed, layout = parse_spec_document(serialize_spec(spec))
    assert layout is None
    assert parsed.kind == spec.kind
    assert parsed.selection == spec.selection
    assert parsed.subset == spec.subset
    assert parsed.phases == spec.phases
    assert parsed.controller.name == spec.controller.name
    rebuilt, _ = build_bcst_channel_unchecked(parsed)
    original, _ = build_bcst_channel_unchecked(spec)
    assert fidelity_up_to_phase(rebuilt, original) >= 1.0 - 1e-12


def test_round_trip_preserves_qd_documents():
    spec = qd_spec([1, 2], controller_basis("computational", 1))
    parsed, _ = parse_spec_document(serialize_spec(spec))
    assert parsed.kind == "qd"
    assert parsed.selection == (1, 2)


def test_round_trip_preserves_custom_controllers():
    ctrl = custom_controller_basis([ket("00"), ket("11")])
    spec = bcst_spec([(1, 1), (2, 2)], ctrl, subset=[0, 1])
    parsed, _ = parse_spec_document(serialize_spec(spec))
    states = parsed.controller_states()
    assert fidelity_up_to_phase(states[0], ket("00")) == pytest.approx(1.0)
    assert fidelity_up_to_phase(states[1], ket("11")) == pytest.approx(1.0)
    a, _ = build_bcst_channel(spec)
    b, _ = build_bcst_channel(parsed)
    assert fidelity_up_to_phase(a, b) >= 1.0 - 1e-12


def test_layout_override_round_trips():
    spec = entry("zha5").spec
    text = serialize_spec(spec, layout=("C1", "A1", "B1", "A2", "B2"))
    _, layout = parse_spec_document(text)
    assert layout == ("C1", "A1", "B1", "A2", "B2")


def test_parse_error_carries_line_number():
    bad = '{\n  "version": 1,\n  "kind": ???\n}\n'
    with pytest.raises(SpecDocumentError) as err:
        parse_spec_document(bad)
    assert err.value.line == 3
    assert "line 3" in str(err.value)


def test_parse_error_names_the_field():
    doc = {
        "version": 1,
        "kind": "bcst",
        "pair_basis": "bell",
        "selection": [[1, 1], [2, 2]],
        "phases": [1, "wat"],
        "controller": {"family": "computational", "l": 1, "subset": [0, 1]},
    }
    with pytest.raises(SpecDocumentError) as err:
        parse_spec_document(json.dumps(doc))
    assert err.value.field == "phases[1]"


def test_parse_rejects_unknown_version_and_kind():
    with pytest.raises(SpecDocumentError):
        parse_spec_document(json.dumps({"version": 2, "kind": "bcst"}))
    doc = {"version": 1, "kind": "teleport", "pair_basis": "bell",
           "selection": [[1, 1], [2, 2]], "phases": [1, 1],
           "controller": {"family": "computational", "l": 1}}
    with pytest.raises(SpecDocumentError):
        parse_spec_document(json.dumps(doc))


def test_parse_rejects_missing_controller():
    doc = {"version": 1, "kind": "bcst", "pair_basis": "bell",
           "selection": [[1, 1], [2, 2]], "phases": [1, 1]}
    with pytest.raises(SpecDocumentError) as err:
        parse_spec_document(json.dumps(doc))
    assert err.value.field == "controller"


def test_parse_defers_rule_checks_to_the_builder():
    # a rule-violating document still parses; the builder raises instead
    doc = {"version": 1, "kind": "bcst", "pair_basis": "bell",
           "selection": [[3, 1], [3, 2]], "phases": [1, 1],
           "controller": {"family": "hadamard-product", "l": 1}}
    spec, _ = parse_spec_document(json.dumps(doc))
    from bcst.channel import SelectionRuleError
    with pytest.raises(SelectionRuleError):
        build_bcst_channel(spec)


# ---- amplitude files ---------------------------------------------------------

def test_amplitude_file_round_trip(tmp_path):
    state = random_state(4, np.random.default_rng(17))
    path = tmp_path / "amps.txt"
    write_amplitude_file(path, state)
    text = path.read_text()
    assert text.startswith("# qubits: 4\n")
    back = read_amplitude_file(path)
    # the reader re-normalizes, which may touch the last bit of each entry
    np.testing.assert_allclose(back.amplitudes, state.amplitudes, rtol=0, atol=1e-13)


def test_amplitude_file_rejects_unnormalized(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 1.0 0.0\n1 1.0 0.0\n")
    with pytest.raises(SpecDocumentError):
        read_amplitude_file(path)


def test_amplitude_file_rejects_gaps_and_duplicates(tmp_path):
    path = tmp_path / "gap.txt"
    path.write_text("0 1.0 0.0\n2 0.0 0.0\n")
    with pytest.raises(SpecDocumentError):
        read_amplitude_file(path)
    path.write_text("0 1.0 0.0\n0 0.0 0.0\n")
    with pytest.raises(SpecDocumentError) as err:
        read_amplitude_file(path)
    assert err.value.line == 2


def test_amplitude_file_rejects_malformed_rows(tmp_path):
    path = tmp_path / "rows.txt"
    path.write_text("0 1.0\n")
    with pytest.raises(SpecDocumentError):
        read_amplitude_file(path)
