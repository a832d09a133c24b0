"""In-memory model of clocked Moore machines with guarded transition pulses.

A machine is a set of states, each carrying fixed output levels (Moore
outputs) and an ordered list of guarded transitions.  Transitions may emit
one-cycle pulses while they fire, which is how timer restarts are expressed.
Everything here is immutable and purely functional; validation and stepping
never mutate the spec.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping

Bit = int


class FsmError(Exception):
    """Base class for all errors raised by the FSM model."""


class StructuralError(FsmError):
    """A name or reference does not resolve against the spec."""


class ContractViolation(FsmError):
    """An operation was applied to a spec that breaks its preconditions,
    e.g. stepping an unvalidated machine whose guards overlap."""


# ---------------------------------------------------------------------------
# Guard expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    operand: "GuardExpr"


@dataclass(frozen=True)
class And:
    left: "GuardExpr"
    right: "GuardExpr"


@dataclass(frozen=True)
class Or:
    left: "GuardExpr"
    right: "GuardExpr"


@dataclass(frozen=True)
class Const:
    value: Bit


GuardExpr = Var | Not | And | Or | Const


def eval_guard(expr: GuardExpr, valuation: Mapping[str, Bit]) -> Bit:
    """Evaluate a guard under an input valuation, returning 0 or 1."""
    if isinstance(expr, Var):
        try:
            return 1 if valuation[expr.name] else 0
        except KeyError:
            raise StructuralError(f"guard references unknown input '{expr.name}'") from None
    if isinstance(expr, Not):
        return 1 - eval_guard(expr.operand, valuation)
    if isinstance(expr, And):
        return eval_guard(expr.left, valuation) & eval_guard(expr.right, valuation)
    if isinstance(expr, Or):
        return eval_guard(expr.left, valuation) | eval_guard(expr.right, valuation)
    if isinstance(expr, Const):
        return 1 if expr.value else 0
    raise TypeError(f"not a guard expression: {expr!r}")


def guard_variables(expr: GuardExpr) -> set[str]:
    """Names of all inputs referenced by a guard."""
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Not):
        return guard_variables(expr.operand)
    if isinstance(expr, (And, Or)):
        return guard_variables(expr.left) | guard_variables(expr.right)
    return set()


# ---------------------------------------------------------------------------
# Machine structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Transition:
    guard: GuardExpr
    destination: str
    pulses: frozenset[str] = frozenset()


@dataclass(frozen=True)
class StateDef:
    name: str
    moore_assignments: Mapping[str, Bit] = field(default_factory=dict)
    transitions: tuple[Transition, ...] = ()


@dataclass(frozen=True)
class FsmSpec:
    name: str
    inputs: tuple[str, ...]
    moore_outputs: tuple[str, ...]
    pulse_outputs: tuple[str, ...]
    states: tuple[StateDef, ...]
    initial_state: str
    reset_input: str | None = None

    def state(self, name: str) -> StateDef:
        for s in self.states:
            if s.name == name:
                return s
        raise StructuralError(f"unknown state '{name}'")

    def state_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.states)


def all_valuations(names: tuple[str, ...]) -> Iterator[dict[str, Bit]]:
    """All 2^n valuations of the given inputs, in binary counting order."""
    for bits in itertools.product((0, 1), repeat=len(names)):
        yield dict(zip(names, bits))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

OVERLAP = "overlap"
GAP = "gap"
STRUCTURAL = "structural"


@dataclass(frozen=True)
class Finding:
    kind: str  # overlap | gap | structural
    state: str | None
    valuation: Mapping[str, Bit] | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not self.findings


def validate(spec: FsmSpec) -> ValidationReport:
    """Check structure plus guard determinism and exhaustiveness.

    Guard coverage is checked by enumerating every valuation of the declared
    inputs.  Valuations with the reset input high are skipped: reset
    overrides guard matching entirely, so specs need not make their guards
    exclusive with respect to it.
    """
    findings: list[Finding] = []

    def structural(message: str, state: str | None = None) -> None:
        findings.append(Finding(STRUCTURAL, state, None, message))

    seen_states: set[str] = set()
    for s in spec.states:
        if s.name in seen_states:
            structural(f"duplicate state name '{s.name}'", s.name)
        seen_states.add(s.name)

    seen_signals: set[str] = set()
    for sig in (*spec.inputs, *spec.moore_outputs, *spec.pulse_outputs):
        if sig in seen_signals:
            structural(f"duplicate signal name '{sig}'")
        seen_signals.add(sig)

    declared = set(spec.state_names())
    if spec.initial_state not in declared:
        structural(f"initial state '{spec.initial_state}' is not declared")
    if spec.reset_input is not None and spec.reset_input not in spec.inputs:
        structural(f"reset input '{spec.reset_input}' is not a declared input")

    inputs = set(spec.inputs)
    broken_guard_states: set[str] = set()
    for s in spec.states:
        for out, bit in s.moore_assignments.items():
            if out not in spec.moore_outputs:
                structural(f"assignment to unknown output '{out}'", s.name)
            if bit not in (0, 1):
                structural(f"output '{out}' assigned non-bit value {bit!r}", s.name)
        for t in s.transitions:
            if t.destination not in declared:
                structural(f"transition to unknown state '{t.destination}'", s.name)
            for p in t.pulses:
                if p not in spec.pulse_outputs:
                    structural(f"transition emits unknown pulse '{p}'", s.name)
            unknown = guard_variables(t.guard) - inputs
            if unknown:
                broken_guard_states.add(s.name)
                for name in sorted(unknown):
                    structural(f"guard references unknown input '{name}'", s.name)

    # Coverage enumeration only makes sense once guards evaluate cleanly.
    for s in spec.states:
        if s.name in broken_guard_states or s.name not in declared:
            continue
        for v in all_valuations(spec.inputs):
            if spec.reset_input is not None and v[spec.reset_input]:
                continue
            hits = sum(eval_guard(t.guard, v) for t in s.transitions)
            if hits > 1:
                findings.append(Finding(
                    OVERLAP, s.name, v,
                    f"state '{s.name}': {hits} guards true at {_fmt_valuation(v)}"))
            elif hits == 0:
                findings.append(Finding(
                    GAP, s.name, v,
                    f"state '{s.name}': no guard true at {_fmt_valuation(v)}"))

    return ValidationReport(tuple(findings))


def _fmt_valuation(v: Mapping[str, Bit]) -> str:
    return "{" + ", ".join(f"{k}={b}" for k, b in v.items()) + "}"


# ---------------------------------------------------------------------------
# Stepping
# ---------------------------------------------------------------------------

def step_spec(
    spec: FsmSpec, current: str, valuation: Mapping[str, Bit],
) -> tuple[str, frozenset[str]]:
    """One synchronous step: next state and the pulses the transition emits.

    Reset, when declared and asserted, dominates: the machine returns to its
    initial state and no pulses fire.
    """
    state = spec.state(current)
    if spec.reset_input is not None and valuation.get(spec.reset_input):
        return spec.initial_state, frozenset()
    matches = [t for t in state.transitions if eval_guard(t.guard, valuation)]
    if len(matches) != 1:
        raise ContractViolation(
            f"state '{current}': {len(matches)} transition guards true at "
            f"{_fmt_valuation(dict(valuation))}; validate the spec first")
    t = matches[0]
    return t.destination, t.pulses


def moore_output(spec: FsmSpec, state: str) -> dict[str, Bit]:
    """Output levels of a state; outputs the state does not assign are 0."""
    s = spec.state(state)
    return {out: s.moore_assignments.get(out, 0) for out in spec.moore_outputs}
