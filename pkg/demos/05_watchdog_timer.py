#!/usr/bin/env python3
"""The fault-tolerant watchdog timer scenario, three ways:

1. healthy task: heartbeats keep arriving, the reset counter climbs;
2. hung task: no heartbeats, the WDT fires, a restart write revives it;
3. memory faults: replicas corrupted mid-run, trace identical to run 1.

Also shows loading scenario parameters from an INI file.
"""

from pathlib import Path

from cpm.runtime import wd_state_name
from cpm.scenarios import WdtScenarioParams, load_wdt_params, run_wdt

HERE = Path(__file__).parent


def show(title, result):
    print(f"== {title} ==")
    print(result.describe())
    if result.ignored_writes:
        print("ignored writes:", result.ignored_writes)
    print()


def main():
    healthy = WdtScenarioParams(
        wdt_period=100,
        horizon=600,
        heartbeat_schedule=tuple(range(50, 600, 50)),
    )
    r1 = run_wdt(healthy)
    show("healthy task, heartbeat every 50 ms", r1)

    hung = WdtScenarioParams(
        wdt_period=100,
        horizon=600,
        restart_schedule=((250, 1),),
    )
    r2 = run_wdt(hung)
    show("hung task, operator restart at 250 ms", r2)

    faulty = WdtScenarioParams(
        wdt_period=100,
        horizon=600,
        heartbeat_schedule=tuple(range(50, 600, 50)),
        fault_schedule=((130, 0, -3), (330, 2, 42)),
    )
    r3 = run_wdt(faulty)
    show("healthy task + two injected memory faults", r3)
    print("fault run matches the healthy run:", r3.trace == r1.trace)

    print("\nguard events from run 2 (fired-state guard):")
    for e in r2.runtime.events.of("guard"):
        print(f"  t={e.time_ms} ms guard={e.name}")

    params = load_wdt_params(HERE / "wdt_params.ini")
    r4 = run_wdt(params)
    show("parameters loaded from wdt_params.ini", r4)

    print("CSV export of run 2:")
    print(r2.to_csv())


if __name__ == "__main__":
    main()
