"""The adjusts relation: narrowing arrows hold, reversals fail, and passing
pairs really do substitute for each other step by step."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adjusted.seqspec import (
    BOTTOM,
    VOID,
    OpInstance,
    apply,
    apply_seq,
    catalog,
    check_adjusts,
    reachable_states,
    state_key,
)

# (adjusted, base) pairs, one per specialization arrow
ARROWS = [
    ("R2", "R1"),
    ("S2", "S1"),
    ("S3", "S2"),
    ("C2", "C1"),
    ("C3", "C2"),
    ("M2", "M1"),
]


@pytest.mark.parametrize("adjusted,base", ARROWS)
def test_arrow_passes_forward(adjusted, base):
    report = check_adjusts(catalog(adjusted), catalog(base))
    assert report.passed, report.to_doc()


@pytest.mark.parametrize("adjusted,base", [(b, a) for a, b in ARROWS])
def test_arrow_fails_reversed(adjusted, base):
    report = check_adjusts(catalog(adjusted), catalog(base))
    assert not report.passed
    assert report.counterexamples  # a failure always carries evidence


def test_boolean_responses_are_not_weakenable():
    # blind sets admit value-returning sets, never the other way round
    report = check_adjusts(catalog("S1"), catalog("S2"))
    assert not report.passed
    assert not report.ops["add"].post_implication
    assert not report.ops["remove"].post_implication
    assert report.ops["contains"].post_implication


def test_explicit_grid_matches_default():
    report = check_adjusts(
        catalog("R2"),
        catalog("R1"),
        state_sample=[BOTTOM, 1, 2],
        arg_sample={"set": [(1,), (2,)], "get": [()]},
    )
    assert report.passed


def test_interface_mismatch_is_recorded_not_raised():
    report = check_adjusts(catalog("S1"), catalog("R1"))
    assert not report.passed
    assert not report.narrowness
    assert report.missing_templates == ["get", "set"]


def test_report_document_shape():
    doc = check_adjusts(catalog("S1"), catalog("S2")).to_doc()
    assert doc["schema"] == "v1"
    assert doc["pass"] is False
    assert set(doc["ops"]) == {"add", "remove", "contains"}
    cex = doc["counterexamples"][0]
    assert set(cex) == {"state", "op", "expected", "got"}


def test_overall_verdict_matches_per_op_conjunction():
    for adjusted, base in ARROWS + [(b, a) for a, b in ARROWS]:
        report = check_adjusts(catalog(adjusted), catalog(base))
        conj = report.narrowness and all(
            v.pre_implication and v.post_implication for v in report.ops.values()
        )
        assert report.passed == conj


# ---------------------------------------------------------------------------
# substitution: running the adjusted spec without ⊥ tracks the base spec


@st.composite
def bottomless_run(draw):
    adjusted_name, base_name = draw(st.sampled_from(ARROWS))
    adjusted, base = catalog(adjusted_name), catalog(base_name)
    state = adjusted.init_state
    seq = []
    for _ in range(draw(st.integers(0, 4))):
        choices = [
            OpInstance(t, a)
            for t, a in adjusted.instances()
            if apply(adjusted, state, OpInstance(t, a))[1] is not BOTTOM
            or state_key(apply(adjusted, state, OpInstance(t, a))[0])
            != state_key(state)
        ]
        if not choices:
            break
        op = draw(st.sampled_from(choices))
        seq.append(op)
        state, _ = apply(adjusted, state, op)
    return adjusted, base, seq


@given(bottomless_run())
@settings(max_examples=150, deadline=None)
def test_substitution_on_bottom_free_sequences(case):
    adjusted, base, seq = case
    s_adj, r_adj = apply_seq(adjusted, adjusted.init_state, seq)
    s_base, r_base = apply_seq(base, base.init_state, seq)
    assert state_key(s_adj) == state_key(s_base)
    for got, want in zip(r_base, r_adj):
        if want is not VOID:
            assert got == want
