import inspect
import random

import pytest
from hypothesis import given, strategies as st

from fsmkit.model import (
    And, Const, ContractViolation, FsmSpec, GAP, Not, Or, OVERLAP, StateDef,
    STRUCTURAL, StructuralError, Transition, Var, all_valuations, eval_guard,
    moore_output, step_spec, validate,
)

from conftest import guard_exprs, valid_machines


class TestEvalGuard:
    def test_conjunction_of_expiry_and_sensor(self):
        assert eval_guard(And(Var("tl"), Var("c")), {"tl": 1, "c": 1}) == 1
        assert eval_guard(And(Var("tl"), Var("c")), {"tl": 1, "c": 0}) == 0

    def test_constant_true_ignores_valuation(self):
        assert eval_guard(Const(1), {}) == 1
        assert eval_guard(Const(1), {"x": 0}) == 1

    def test_nested_negation(self):
        expr = Not(Or(Var("c"), Var("ts")))
        assert eval_guard(expr, {"c": 0, "ts": 0, "tl": 1}) == 1
        assert eval_guard(expr, {"c": 1, "ts": 0, "tl": 1}) == 0

    def test_unknown_variable_named_in_error(self):
        with pytest.raises(StructuralError, match="ghost"):
            eval_guard(Var("ghost"), {"c": 1})

    @given(guard_exprs(), st.tuples(*[st.integers(0, 1)] * 3))
    def test_de_morgan_duals(self, expr, bits):
        v = dict(zip(("a", "b", "c"), bits))
        lhs = Not(And(expr, Var("a")))
        rhs = Or(Not(expr), Not(Var("a")))
        assert eval_guard(lhs, v) == eval_guard(rhs, v)
        lhs2 = Not(Or(expr, Var("b")))
        rhs2 = And(Not(expr), Not(Var("b")))
        assert eval_guard(lhs2, v) == eval_guard(rhs2, v)


def _single_state_spec(transitions):
    return FsmSpec(
        name="m", inputs=("c",), moore_outputs=("y",), pulse_outputs=(),
        states=(StateDef("A", {}, tuple(transitions)),), initial_state="A")


class TestValidate:
    def test_bundled_controller_is_clean(self, itlc_spec):
        assert validate(itlc_spec).findings == ()

    def test_tautology_self_loop_is_clean(self):
        spec = _single_state_spec([Transition(Const(1), "A")])
        assert validate(spec).ok

    def test_overlap_reported_with_valuation(self):
        spec = _single_state_spec(
            [Transition(Var("c"), "A"), Transition(Const(1), "A")])
        findings = validate(spec).findings
        assert [f.kind for f in findings] == [OVERLAP]
        assert findings[0].state == "A"
        assert findings[0].valuation == {"c": 1}

    def test_gap_reported_with_valuation(self):
        spec = _single_state_spec([Transition(Var("c"), "A")])
        findings = validate(spec).findings
        assert [f.kind for f in findings] == [GAP]
        assert findings[0].valuation == {"c": 0}

    def test_structural_findings(self):
        spec = FsmSpec(
            name="m", inputs=("c", "c"), moore_outputs=("y",),
            pulse_outputs=(),
            states=(
                StateDef("A", {"nope": 1}, (Transition(Var("x"), "B"),)),
                StateDef("A", {}, (Transition(Const(1), "A"),)),
            ),
            initial_state="Z")
        kinds = {f.kind for f in validate(spec).findings}
        assert kinds == {STRUCTURAL}
        messages = " | ".join(f.message for f in validate(spec).findings)
        assert "duplicate state name 'A'" in messages
        assert "duplicate signal name 'c'" in messages
        assert "initial state 'Z'" in messages
        assert "unknown state 'B'" in messages
        assert "unknown input 'x'" in messages
        assert "unknown output 'nope'" in messages

    def test_reset_valuations_skipped_in_coverage(self):
        # Guards ignore reset entirely; with reset declared the spec is
        # still exhaustive because reset=1 valuations are overridden.
        spec = FsmSpec(
            name="m", inputs=("rst", "c"), moore_outputs=(), pulse_outputs=(),
            states=(StateDef("A", {}, (
                Transition(Var("c"), "A"), Transition(Not(Var("c")), "A"))),),
            initial_state="A", reset_input="rst")
        assert validate(spec).ok

    @given(valid_machines())
    def test_generated_machines_are_clean(self, spec):
        assert validate(spec).findings == ()

    @given(valid_machines(), st.randoms(use_true_random=False))
    def test_clean_verdict_invariant_under_transition_reorder(self, spec, rnd):
        shuffled_states = []
        for s in spec.states:
            transitions = list(s.transitions)
            rnd.shuffle(transitions)
            shuffled_states.append(
                StateDef(s.name, s.moore_assignments, tuple(transitions)))
        shuffled = FsmSpec(
            spec.name, spec.inputs, spec.moore_outputs, spec.pulse_outputs,
            tuple(shuffled_states), spec.initial_state, spec.reset_input)
        assert validate(shuffled).ok == validate(spec).ok


class TestStepSpec:
    def test_sensor_and_long_expiry_leave_idle(self, itlc_spec):
        assert step_spec(itlc_spec, "S0", {"reset": 0, "c": 1, "ts": 0, "tl": 1}) \
            == ("S1", frozenset({"st"}))

    def test_idle_dwell_without_sensor(self, itlc_spec):
        assert step_spec(itlc_spec, "S0", {"reset": 0, "c": 0, "ts": 1, "tl": 1}) \
            == ("S0", frozenset())

    def test_side_amber_returns_to_idle(self, itlc_spec):
        assert step_spec(itlc_spec, "S3", {"reset": 0, "c": 1, "ts": 1, "tl": 1}) \
            == ("S0", frozenset({"st"}))

    def test_reset_overrides_guards_without_pulses(self, itlc_spec):
        for state in itlc_spec.state_names():
            assert step_spec(itlc_spec, state,
                             {"reset": 1, "c": 1, "ts": 1, "tl": 1}) \
                == ("S0", frozenset())

    def test_unvalidated_overlap_raises(self):
        spec = _single_state_spec(
            [Transition(Var("c"), "A"), Transition(Const(1), "A")])
        with pytest.raises(ContractViolation):
            step_spec(spec, "A", {"c": 1})

    def test_unvalidated_gap_raises(self):
        spec = _single_state_spec([Transition(Var("c"), "A")])
        with pytest.raises(ContractViolation):
            step_spec(spec, "A", {"c": 0})

    def test_unknown_state_raises(self, itlc_spec):
        with pytest.raises(StructuralError):
            step_spec(itlc_spec, "S9", {"reset": 0, "c": 0, "ts": 0, "tl": 0})

    @given(valid_machines())
    def test_determinism_and_totality(self, spec):
        for s in spec.states:
            for v in all_valuations(spec.inputs):
                nxt, _pulses = step_spec(spec, s.name, v)
                assert nxt in spec.state_names()


class TestMooreOutput:
    def test_idle_lights(self, itlc_spec):
        assert moore_output(itlc_spec, "S0") == {
            "mg": 1, "my": 0, "mr": 0, "sg": 0, "sy": 0, "sr": 1}

    def test_side_green_lights(self, itlc_spec):
        assert moore_output(itlc_spec, "S2") == {
            "mg": 0, "my": 0, "mr": 1, "sg": 1, "sy": 0, "sr": 0}

    def test_unassigned_outputs_default_to_zero(self):
        spec = _single_state_spec([Transition(Const(1), "A")])
        assert moore_output(spec, "A") == {"y": 0}

    def test_unknown_state_raises(self, itlc_spec):
        with pytest.raises(StructuralError):
            moore_output(itlc_spec, "S7")

    def test_signature_admits_no_valuation(self):
        # Moore property by construction: outputs are a function of the
        # state alone, so the operation cannot even accept inputs.
        params = list(inspect.signature(moore_output).parameters)
        assert params == ["spec", "state"]
