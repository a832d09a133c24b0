"""Stochastic side-road traffic closing the loop through the sensor.

Each of the two side-road approaches (north, south) has a sensor slot at the
stop line holding at most one waiting vehicle; a Bernoulli arrival is
registered only when that approach's slot is free, which is how a real
presence detector behaves and what keeps waiting times bounded.  The sensor
input c is the OR of both slots.  Vehicles depart oldest-first while the
side-road green is up, accumulating wait = departure tick - arrival tick.

Randomness comes from SplitMix64, a fixed 64-bit generator implemented here
in plain integer arithmetic so runs reproduce bit-for-bit on any platform.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import FsmSpec, moore_output, step_spec
from .sim import START_PULSE, TickRecord, Trace, _require_closed_loop
from .timer import TimerConfig, TimerState, timer_commit, timer_outputs

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 sequence generator (Steele/Lea/Flood's mixing constants)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def bernoulli(self, p: float) -> int:
        # Top 53 bits give a uniform double in [0, 1).
        return 1 if (self.next_u64() >> 11) * (2.0 ** -53) < p else 0


@dataclass(frozen=True)
class TrafficModel:
    arrival_prob: float
    seed: int = 0
    horizon: int = 1000
    service_rate: int = 1  # vehicles departing per side-road green tick

    def __post_init__(self) -> None:
        if not 0.0 <= self.arrival_prob <= 1.0:
            raise ValueError(f"arrival_prob must be in [0, 1], got {self.arrival_prob}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.service_rate < 1:
            raise ValueError(f"service_rate must be >= 1, got {self.service_rate}")


METRICS_FIELDS = (
    "mean_side_wait", "max_side_wait", "main_green_share",
    "side_vehicles_served", "cycles_completed",
)


@dataclass(frozen=True)
class Metrics:
    mean_side_wait: float
    max_side_wait: int
    main_green_share: float
    side_vehicles_served: int
    cycles_completed: int

    def as_block(self) -> str:
        """Flat key=value block, one field per line."""
        return "".join(f"{k}={self._fmt(k)}\n" for k in METRICS_FIELDS)

    def as_record(self, prefix: str = "") -> str:
        """Single-line record: space-separated key=value in field order."""
        body = " ".join(f"{k}={self._fmt(k)}" for k in METRICS_FIELDS)
        return f"{prefix}{body}"

    def _fmt(self, key: str) -> str:
        value = getattr(self, key)
        return f"{value:.3f}" if isinstance(value, float) else str(value)


@dataclass(frozen=True)
class EnvResult:
    """run_env output plus the bookkeeping the property tests lean on."""
    metrics: Metrics
    trace: Trace
    arrivals: int
    served_waits: tuple[int, ...]
    queue_remaining: int
    service_ticks: tuple[int, ...]  # ticks at which at least one vehicle departed
    sensor_reads: tuple[tuple[int, bool], ...]  # (c value, queue nonempty) per tick


def run_env(spec: FsmSpec, cfg: TimerConfig, model: TrafficModel) -> tuple[Metrics, Trace]:
    result = run_env_detailed(spec, cfg, model)
    return result.metrics, result.trace


def run_env_detailed(spec: FsmSpec, cfg: TimerConfig, model: TrafficModel) -> EnvResult:
    """Closed-loop run against the traffic model; deterministic for fixed
    (seed, model, cfg).  Per tick: arrivals (north drawn before south), sensor
    read, service while the side green is up, then the kernel tick."""
    _require_closed_loop(spec)
    rng = SplitMix64(model.seed)
    state = spec.initial_state
    timer = TimerState(0)
    slots: list[int | None] = [None, None]  # [north, south] arrival ticks

    records: list[TickRecord] = []
    waits: list[int] = []
    arrivals = 0
    green_main = 0
    cycles = 0
    service_ticks: list[int] = []
    sensor_reads: list[tuple[int, bool]] = []

    for tick in range(model.horizon):
        for approach in (0, 1):  # fixed draw order: north then south
            arrived = rng.bernoulli(model.arrival_prob)
            if arrived and slots[approach] is None:
                slots[approach] = tick
                arrivals += 1
        occupied = [a for a in slots if a is not None]
        c = 1 if occupied else 0
        sensor_reads.append((c, bool(occupied)))

        lights = moore_output(spec, state)
        if lights.get("mg"):
            green_main += 1
        if lights.get("sg"):
            served = 0
            while served < model.service_rate and any(a is not None for a in slots):
                # Oldest arrival first; north wins ties by draw order.
                idx = min(
                    (i for i in (0, 1) if slots[i] is not None),
                    key=lambda i: (slots[i], i))
                waits.append(tick - slots[idx])  # type: ignore[operator]
                slots[idx] = None
                served += 1
            if served:
                service_ticks.append(tick)

        ts, tl = timer_outputs(cfg, timer)
        valuation = {"reset": 0, "c": c, "ts": ts, "tl": tl}
        next_state, pulses = step_spec(spec, state, valuation)
        records.append(TickRecord(
            tick=tick, state=state, inputs=valuation, moore=lights,
            pulses=pulses, timer_count=timer.count))
        # A completed cycle is a non-trivial return to the initial state
        # (for the traffic controller: the S3 -> S0 transition).
        if state != spec.initial_state and next_state == spec.initial_state:
            cycles += 1
        state = next_state
        timer = timer_commit(cfg, timer, 1 if START_PULSE in pulses else 0)

    metrics = Metrics(
        mean_side_wait=(sum(waits) / len(waits)) if waits else 0.0,
        max_side_wait=max(waits, default=0),
        main_green_share=green_main / model.horizon,
        side_vehicles_served=len(waits),
        cycles_completed=cycles,
    )
    trace = Trace(spec.name, cfg, tuple(records),
                  pulse_names=spec.pulse_outputs, state_names=spec.state_names())
    return EnvResult(
        metrics=metrics,
        trace=trace,
        arrivals=arrivals,
        served_waits=tuple(waits),
        queue_remaining=sum(1 for a in slots if a is not None),
        service_ticks=tuple(service_ticks),
        sensor_reads=tuple(sensor_reads),
    )
