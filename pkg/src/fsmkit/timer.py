"""Two-threshold interval timer driving the ts/tl level signals.

One free-running counter is restarted by the start pulse (st) and compared
against two thresholds.  Both outputs are levels, not pulses: once a
threshold is reached the signal stays high until the next restart, which is
what lets the controller test "has the interval expired" across many dwell
cycles.  The counter saturates at the long threshold; both comparisons are
already satisfied there, so saturation is invisible in the outputs.
"""
from __future__ import annotations

from dataclasses import dataclass

DEFAULT_SHORT_TICKS = 4
DEFAULT_LONG_TICKS = 16


@dataclass(frozen=True)
class TimerConfig:
    short_ticks: int = DEFAULT_SHORT_TICKS
    long_ticks: int = DEFAULT_LONG_TICKS

    def __post_init__(self) -> None:
        if not 0 < self.short_ticks < self.long_ticks:
            raise ValueError(
                f"short_ticks must be positive and < long_ticks "
                f"(got short={self.short_ticks}, long={self.long_ticks})")


@dataclass(frozen=True)
class TimerState:
    count: int = 0

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValueError(f"count must be nonnegative (got {self.count})")


def timer_outputs(cfg: TimerConfig, t: TimerState) -> tuple[int, int]:
    """Level outputs (ts, tl) for the current count; tl=1 implies ts=1."""
    ts = 1 if t.count >= cfg.short_ticks else 0
    tl = 1 if t.count >= cfg.long_ticks else 0
    return ts, tl


def timer_commit(cfg: TimerConfig, t: TimerState, st: int) -> TimerState:
    """Advance one clock: restart on st, otherwise count up, saturating."""
    if st:
        return TimerState(0)
    return TimerState(min(t.count + 1, cfg.long_ticks))
