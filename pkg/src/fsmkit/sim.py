"""Deterministic cycle-accurate simulation kernel.

Closed-loop mode couples a machine whose inputs are exactly
{reset, c, ts, tl} to the interval timer: ts/tl come from the counter, and a
pulse named `st` restarts it.  Open-loop mode drives every input externally,
which is how the hardware demo exercised the bare controller from switches.

Per-tick order, fixed and relied on by every downstream consumer:
  1. read the external inputs for this tick;
  2. compute ts/tl from the timer count accumulated so far;
  3. evaluate the transition step (next state, pulses);
  4. record the tick with the CURRENT state's Moore outputs;
  5. commit: state := next, timer advances (restarting on st).
Moore outputs are registered, so a transition's new lights appear one tick
after its guard fires.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import Bit, FsmSpec, moore_output, step_spec
from .timer import TimerConfig, TimerState, timer_commit, timer_outputs

CLOSED_LOOP_INPUTS = frozenset({"reset", "c", "ts", "tl"})
START_PULSE = "st"


class SimError(Exception):
    """Configuration or stimulus problem detected before tick 0."""


class StimulusError(SimError):
    """Malformed stimulus text; message carries the line number."""


@dataclass(frozen=True)
class ExternalInputs:
    c: Bit = 0
    reset: Bit = 0


@dataclass(frozen=True)
class Stimulus:
    ticks: tuple[ExternalInputs, ...]

    def __post_init__(self) -> None:
        if not self.ticks:
            raise SimError("stimulus must cover at least one tick")

    @property
    def horizon(self) -> int:
        return len(self.ticks)


@dataclass(frozen=True)
class TickRecord:
    tick: int
    state: str
    inputs: Mapping[str, Bit]
    moore: Mapping[str, Bit]
    pulses: frozenset[str]
    timer_count: int | None = None  # None in open-loop mode

    @property
    def st(self) -> Bit:
        return 1 if START_PULSE in self.pulses else 0


@dataclass(frozen=True)
class Trace:
    spec_name: str
    timer_config: TimerConfig | None
    records: tuple[TickRecord, ...]
    # Signal universe, so waveform output is independent of which states a
    # particular run happens to visit.
    pulse_names: tuple[str, ...] = ()
    state_names: tuple[str, ...] = ()


def parse_stimulus(text: str) -> Stimulus:
    """Parse `.stim` text: a `horizon <n>` header, then `<tick> c=<bit>
    [reset=<bit>]` lines with strictly increasing ticks.  Unlisted ticks hold
    the previous values; everything starts at 0."""
    horizon: int | None = None
    events: list[tuple[int, dict[str, Bit]]] = []
    last_tick = -1
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if horizon is None:
            if fields[0] != "horizon" or len(fields) != 2:
                raise StimulusError(f"line {lineno}: expected 'horizon <n>' header")
            try:
                horizon = int(fields[1])
            except ValueError:
                raise StimulusError(f"line {lineno}: bad horizon '{fields[1]}'") from None
            if horizon < 1:
                raise StimulusError(f"line {lineno}: horizon must be >= 1")
            continue
        try:
            tick = int(fields[0])
        except ValueError:
            raise StimulusError(f"line {lineno}: bad tick number '{fields[0]}'") from None
        if tick <= last_tick:
            raise StimulusError(f"line {lineno}: non-monotonic tick {tick}")
        if tick >= horizon:
            raise StimulusError(f"line {lineno}: tick {tick} is outside horizon {horizon}")
        last_tick = tick
        values: dict[str, Bit] = {}
        for field in fields[1:]:
            key, eq, val = field.partition("=")
            if eq != "=" or key not in ("c", "reset"):
                raise StimulusError(f"line {lineno}: expected c=<bit> or reset=<bit>, got '{field}'")
            if val not in ("0", "1"):
                raise StimulusError(f"line {lineno}: bit value must be 0 or 1, got '{val}'")
            values[key] = int(val)
        if not values:
            raise StimulusError(f"line {lineno}: tick line assigns nothing")
        events.append((tick, values))
    if horizon is None:
        raise StimulusError("line 1: expected 'horizon <n>' header")

    ticks: list[ExternalInputs] = []
    current = {"c": 0, "reset": 0}
    pending = dict(events)
    for tick in range(horizon):
        if tick in pending:
            current.update(pending[tick])
        ticks.append(ExternalInputs(c=current["c"], reset=current["reset"]))
    return Stimulus(tuple(ticks))


def _require_closed_loop(spec: FsmSpec) -> None:
    if set(spec.inputs) != CLOSED_LOOP_INPUTS:
        raise SimError(
            f"closed-loop simulation needs inputs exactly "
            f"{sorted(CLOSED_LOOP_INPUTS)}, spec '{spec.name}' has {list(spec.inputs)}")


def simulate(spec: FsmSpec, cfg: TimerConfig, stim: Stimulus) -> Trace:
    """Closed-loop run over the stimulus horizon.  Pure: identical arguments
    give identical traces."""
    _require_closed_loop(spec)
    state = spec.initial_state
    timer = TimerState(0)
    records: list[TickRecord] = []
    for tick, ext in enumerate(stim.ticks):
        ts, tl = timer_outputs(cfg, timer)
        valuation = {"reset": ext.reset, "c": ext.c, "ts": ts, "tl": tl}
        next_state, pulses = step_spec(spec, state, valuation)
        records.append(TickRecord(
            tick=tick,
            state=state,
            inputs=valuation,
            moore=moore_output(spec, state),
            pulses=pulses,
            timer_count=timer.count,
        ))
        state = next_state
        timer = timer_commit(cfg, timer, 1 if START_PULSE in pulses else 0)
    return Trace(spec.name, cfg, tuple(records),
                 pulse_names=spec.pulse_outputs, state_names=spec.state_names())


def simulate_open(spec: FsmSpec, valuations: Iterable[Mapping[str, Bit]]) -> Trace:
    """Open-loop run: every input, timer expiries included, comes from the
    caller.  Useful for exercising a machine without the timer."""
    state = spec.initial_state
    records: list[TickRecord] = []
    expected = set(spec.inputs)
    for tick, valuation in enumerate(valuations):
        if set(valuation) != expected:
            raise SimError(
                f"tick {tick}: valuation keys {sorted(valuation)} do not match "
                f"spec inputs {sorted(expected)}")
        next_state, pulses = step_spec(spec, state, valuation)
        records.append(TickRecord(
            tick=tick,
            state=state,
            inputs=dict(valuation),
            moore=moore_output(spec, state),
            pulses=pulses,
        ))
        state = next_state
    if not records:
        raise SimError("open-loop simulation needs at least one tick")
    return Trace(spec.name, None, tuple(records),
                 pulse_names=spec.pulse_outputs, state_names=spec.state_names())


# ---------------------------------------------------------------------------
# Reachability (bounded model check support)
# ---------------------------------------------------------------------------

def explore_reachable(spec: FsmSpec, cfg: TimerConfig) -> frozenset[tuple[str, int]]:
    """Breadth-first set of all (state, timer count) configurations reachable
    in closed loop under arbitrary c/reset sequences.  Bounded because the
    counter saturates at long_ticks."""
    _require_closed_loop(spec)
    start = (spec.initial_state, 0)
    seen = {start}
    frontier = [start]
    while frontier:
        next_frontier = []
        for state, count in frontier:
            ts, tl = timer_outputs(cfg, TimerState(count))
            for c in (0, 1):
                for reset in (0, 1):
                    nxt, pulses = step_spec(
                        spec, state, {"reset": reset, "c": c, "ts": ts, "tl": tl})
                    st = 1 if START_PULSE in pulses else 0
                    cfg_next = (nxt, timer_commit(cfg, TimerState(count), st).count)
                    if cfg_next not in seen:
                        seen.add(cfg_next)
                        next_frontier.append(cfg_next)
        frontier = next_frontier
    return frozenset(seen)


# ---------------------------------------------------------------------------
# VCD output
# ---------------------------------------------------------------------------

def _vcd_id(index: int) -> str:
    # Printable identifier codes assigned in declaration order from '!'.
    chars = ""
    index += 1
    while index:
        index, rem = divmod(index - 1, 94)
        chars = chr(33 + rem) + chars
    return chars


def write_vcd(trace: Trace) -> str:
    """Render a trace as minimal standard VCD text (1 tick = 1 ns).

    Declares one wire per input, pulse, and Moore output plus a vector
    `state` variable; dumps initial values at #0 and afterwards only the
    signals that changed.  Byte-identical for equal traces.
    """
    if not trace.records:
        raise SimError("cannot write VCD for an empty trace")
    first = trace.records[0]
    # Declaration order: inputs in spec order, then pulses, then Moore
    # outputs, then the state vector.  Identifier codes follow that order.
    pulse_names = list(trace.pulse_names)
    signals = list(first.inputs) + pulse_names + list(first.moore)
    ids = {name: _vcd_id(i) for i, name in enumerate(signals)}
    state_id = _vcd_id(len(signals))

    state_names = list(trace.state_names) or sorted({r.state for r in trace.records})
    state_index = {name: i for i, name in enumerate(state_names)}
    width = max(1, (len(state_names) - 1).bit_length())

    out = [
        "$timescale 1 ns $end",
        f"$scope module {trace.spec_name} $end",
    ]
    for name in signals:
        out.append(f"$var wire 1 {ids[name]} {name} $end")
    out.append(f"$var wire {width} {state_id} state $end")
    out.append("$upscope $end")
    out.append("$enddefinitions $end")

    def values(record: TickRecord) -> dict[str, int]:
        vals = dict(record.inputs)
        for p in pulse_names:
            vals[p] = 1 if p in record.pulses else 0
        vals.update(record.moore)
        return vals

    prev: dict[str, int] = {}
    prev_state: str | None = None
    for record in trace.records:
        vals = values(record)
        changes = [
            f"{vals[name]}{ids[name]}"
            for name in signals
            if prev.get(name) != vals[name]
        ]
        if record.state != prev_state:
            changes.append(f"b{state_index[record.state]:0{width}b} {state_id}")
        if record.tick == 0:
            out.append("#0")
            out.append("$dumpvars")
            out.extend(changes)
            out.append("$end")
        elif changes:
            out.append(f"#{record.tick}")
            out.extend(changes)
        prev = vals
        prev_state = record.state
    return "\n".join(out) + "\n"
