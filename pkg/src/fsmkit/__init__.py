"""fsmkit: clocked Moore machines with transition pulses.

Define machines in the `.fsm` text format (or directly as FsmSpec values),
validate guard determinism exhaustively, simulate them cycle-accurately
against the bundled interval timer, render VCD waveforms, and emit
synthesizable Verilog plus UCF pin constraints.  The flagship design is a
sensor-driven traffic light controller shipped in `designs/itlc.fsm`.
"""
from .model import (
    And, Const, ContractViolation, Finding, FsmError, FsmSpec, GuardExpr, Not,
    Or, StateDef, StructuralError, Transition, ValidationReport, Var,
    eval_guard, moore_output, step_spec, validate,
)
from .dsl import ParseError, ParseFailure, SourceSpan, parse, serialize
from .timer import TimerConfig, TimerState, timer_commit, timer_outputs
from .sim import (
    ExternalInputs, SimError, Stimulus, StimulusError, TickRecord, Trace,
    explore_reachable, parse_stimulus, simulate, simulate_open, write_vcd,
)
from .env import Metrics, TrafficModel, run_env, run_env_detailed
from .emit import (
    EmitError, EmitOptions, PinEntry, PinMap, emit_ucf, emit_verilog,
    parse_pin_file,
)

__version__ = "0.1.0"

__all__ = [
    "And", "Const", "ContractViolation", "EmitError", "EmitOptions",
    "ExternalInputs", "Finding", "FsmError", "FsmSpec", "GuardExpr",
    "Metrics", "Not", "Or", "ParseError", "ParseFailure", "PinEntry",
    "PinMap", "SimError", "SourceSpan", "StateDef", "Stimulus",
    "StimulusError", "StructuralError", "TickRecord", "TimerConfig",
    "TimerState", "Trace", "TrafficModel", "Transition", "ValidationReport",
    "Var", "emit_ucf", "emit_verilog", "eval_guard", "explore_reachable",
    "moore_output", "parse", "parse_pin_file", "parse_stimulus", "run_env",
    "run_env_detailed", "serialize", "simulate", "simulate_open", "step_spec",
    "timer_commit", "timer_outputs", "validate", "write_vcd",
]
