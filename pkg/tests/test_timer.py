import pytest
from hypothesis import given, strategies as st

from fsmkit.timer import TimerConfig, TimerState, timer_commit, timer_outputs

CFG = TimerConfig(short_ticks=4, long_ticks=16)


class TestConfig:
    def test_defaults(self):
        cfg = TimerConfig()
        assert (cfg.short_ticks, cfg.long_ticks) == (4, 16)

    @pytest.mark.parametrize("short,long", [(16, 4), (4, 4), (0, 16), (-1, 3)])
    def test_rejects_bad_thresholds(self, short, long):
        with pytest.raises(ValueError):
            TimerConfig(short_ticks=short, long_ticks=long)


class TestOutputs:
    def test_fresh_timer(self):
        assert timer_outputs(CFG, TimerState(0)) == (0, 0)

    def test_short_boundary(self):
        assert timer_outputs(CFG, TimerState(3)) == (0, 0)
        assert timer_outputs(CFG, TimerState(4)) == (1, 0)

    def test_long_boundary(self):
        assert timer_outputs(CFG, TimerState(15)) == (1, 0)
        assert timer_outputs(CFG, TimerState(16)) == (1, 1)


class TestCommit:
    def test_restart(self):
        assert timer_commit(CFG, TimerState(7), st=1) == TimerState(0)

    def test_saturation(self):
        assert timer_commit(CFG, TimerState(16), st=0) == TimerState(16)

    def test_two_step_trace_reaches_short_expiry(self):
        t = timer_commit(CFG, TimerState(3), st=0)
        assert t == TimerState(4)
        assert timer_outputs(CFG, t) == (1, 0)


@given(st.integers(0, 16), st.integers(1, 40))
def test_monotone_while_running(start, steps):
    t = TimerState(start)
    prev = timer_outputs(CFG, t)
    for _ in range(steps):
        t = timer_commit(CFG, t, st=0)
        cur = timer_outputs(CFG, t)
        assert cur[0] >= prev[0] and cur[1] >= prev[1]
        prev = cur


@given(st.lists(st.integers(0, 1), min_size=1, max_size=100))
def test_ordering_restart_and_bound(st_sequence):
    t = TimerState(0)
    for pulse in st_sequence:
        t = timer_commit(CFG, t, pulse)
        ts, tl = timer_outputs(CFG, t)
        assert not (tl and not ts)  # long expiry implies short expiry
        assert 0 <= t.count <= CFG.long_ticks
        if pulse:
            assert (t.count, ts, tl) == (0, 0, 0)
