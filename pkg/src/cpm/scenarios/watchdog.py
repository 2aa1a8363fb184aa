"""Fault-tolerant watchdog timer (WDT) case study.

A WDT task watches for periodic heartbeats. Its state is published through
the ``watchdog`` context variable: ``WD_STARTED`` while waiting for
activation, ``WD_ACTIVE`` once activated, a non-negative reset count each
time a period ends with at least one heartbeat, ``WD_FIRED`` when a period
passes without one, and ``WD_END`` at the end of the run. The same variable
is an actuator: writing it while fired restarts the WDT (reset count back to
zero); writing it in any other state is a logged no-op.

The state lives in an N-way replica set, so the scenario can inject memory
faults between reads and demonstrate that voting keeps the observable trace
identical as long as fewer than half the replicas are hit.

Everything runs on the virtual clock: heartbeats are schedule data counted
per period boundary (a heartbeat exactly on a boundary counts for the period
it ends), while boundary checks, fault injections, and restart writes are
timeout objects. A boundary coinciding with the horizon is not evaluated; the
run ends in ``WD_END`` instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..runtime import (
    WD_ACTIVE,
    WD_END,
    WD_FIRED,
    WD_STARTED,
    Runtime,
    TimeoutObject,
    wd_state_name,
)


@dataclass(frozen=True)
class WdtScenarioParams:
    wdt_period: int  # ms
    horizon: int  # ms
    heartbeat_schedule: tuple = ()  # absolute times, ms
    replicas: int = 3  # odd, >= 3
    fault_schedule: tuple = ()  # (time, replica_index, corrupt_value)
    restart_schedule: tuple = ()  # (time, value) actuator writes

    def validate(self):
        if self.wdt_period <= 0:
            raise ValueError("wdt_period must be positive")
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        if self.replicas < 3 or self.replicas % 2 == 0:
            raise ValueError("replicas must be odd and >= 3")
        for t in self.heartbeat_schedule:
            if not 0 <= t <= self.horizon:
                raise ValueError(f"heartbeat at {t} outside [0, horizon]")
        for t, idx, _ in self.fault_schedule:
            if not 0 <= t <= self.horizon:
                raise ValueError(f"fault at {t} outside [0, horizon]")
            if not 0 <= idx < self.replicas:
                raise ValueError(f"fault replica index {idx} out of range")
        for t, _ in self.restart_schedule:
            if not 0 <= t <= self.horizon:
                raise ValueError(f"restart write at {t} outside [0, horizon]")


@dataclass
class WdtResult:
    trace: list  # (time_ms, encoded state), in order of state changes
    ignored_writes: list  # (time_ms, value) writes that arrived while not fired
    runtime: Runtime = field(repr=False, default=None)

    def to_csv(self, header: bool = True) -> str:
        rows = [(t, "state", str(v)) for t, v in self.trace]
        rows += [(t, "ignored_write", str(v)) for t, v in self.ignored_writes]
        rows.sort(key=lambda r: r[0])
        lines = ["time_ms,event,detail"] if header else []
        lines += [f"{t},{e},{d}" for t, e, d in rows]
        return "\n".join(lines) + "\n"

    def describe(self) -> str:
        return "\n".join(f"{t:>7} ms  {wd_state_name(v)}" for t, v in self.trace)


def run_wdt(params: WdtScenarioParams) -> WdtResult:
    params.validate()
    rt = Runtime()
    rt.red_storage("watchdog", params.replicas, initial=WD_STARTED)
    reg = rt.registry
    reg.register("watchdog", "both", initial=WD_STARTED)
    for name, value in (("WD_STARTED", WD_STARTED), ("WD_ACTIVE", WD_ACTIVE),
                        ("WD_FIRED", WD_FIRED), ("WD_END", WD_END)):
        reg.register_constant(name, value)
    reg.register_guard(None, "watchdog == WD_FIRED", name="wdt_fired")

    trace: list = []
    ignored: list = []
    tick_holder: dict = {"to": None}

    def publish(value):
        t = rt.clock.now
        rt.red_write("watchdog", value)
        reg.sensor_update("watchdog", value)
        trace.append((t, value))

    def stop_tick():
        if tick_holder["to"] is not None:
            rt.tom.delete(tick_holder["to"])
            tick_holder["to"] = None

    def start_tick():
        stop_tick()
        to = TimeoutObject(
            id="wdt_tick", subid="wdt_tick", deadline=params.wdt_period,
            cyclic=True, enabled=True, action=check_period,
        )
        tick_holder["to"] = to
        rt.tom.insert(to)

    def check_period():
        t = rt.clock.now
        if t >= params.horizon:
            return  # the horizon ends the run before this boundary counts
        current = rt.red_read("watchdog")
        if current in (WD_FIRED, WD_END, WD_STARTED):
            return
        window_start = t - params.wdt_period
        beat = any(window_start < hb <= t for hb in params.heartbeat_schedule)
        if beat:
            publish(current + 1 if current >= 0 else 1)
        else:
            publish(WD_FIRED)
            stop_tick()

    def on_actuator_write(value):
        current = rt.red_read("watchdog")
        if current == WD_FIRED:
            publish(WD_ACTIVE)
            start_tick()
        else:
            ignored.append((rt.clock.now, value))
            rt.events.log(rt.clock.now, "warn", "watchdog", 0, f"restart-write-ignored:{value}")

    reg.bind_actuator("watchdog", on_actuator_write)

    # fault injections and restart writes ride the schedule as one-shots,
    # inserted before the periodic check so they win boundary ties
    for t, idx, corrupt in params.fault_schedule:
        rt.tom.insert(
            TimeoutObject(
                id=f"fault@{t}", subid="fault", deadline=t, enabled=True,
                action=lambda idx=idx, corrupt=corrupt: rt.red_inject_fault("watchdog", idx, corrupt),
            )
        )
    for t, value in params.restart_schedule:
        rt.tom.insert(
            TimeoutObject(
                id=f"write@{t}", subid="restart_write", deadline=t, enabled=True,
                action=lambda value=value: rt.ctx_write("watchdog", value),
            )
        )

    publish(WD_STARTED)
    publish(WD_ACTIVE)  # activation message arrives at t=0
    start_tick()
    rt.advance(params.horizon)
    publish(WD_END)
    return WdtResult(trace=trace, ignored_writes=ignored, runtime=rt)
