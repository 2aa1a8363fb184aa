"""INI-style parameter files for the scenarios.

Watchdog, section ``[wdt]``::

    [wdt]
    period_ms = 100
    horizon_ms = 1000
    replicas = 3
    heartbeats = 50, 150, 250          ; absolute times, ms
    faults = 120:0:99; 300:1:7         ; time:replica_index:corrupt_value
    restarts = 150:1                   ; time:value actuator writes

Switchboard, section ``[switchboard]``::

    [switchboard]
    observation_period_ms = 1000
    horizon_ms = 5000
    beacons = 100 aa:bb:cc:dd:ee:01 54.0; 300 aa:bb:cc:dd:ee:02 11.0
"""

from __future__ import annotations

import configparser

from .switchboard import BeaconTrace
from .watchdog import WdtScenarioParams


def _read(path, section):
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    if not parser.has_section(section):
        raise ValueError(f"{path}: missing [{section}] section")
    return parser[section]

def _int_list(text):
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _colon_tuples(text, arity):
    out = []
    for chunk in str(text).split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != arity:
            raise ValueError(f"expected {arity} colon-separated fields, got {chunk!r}")
        out.append(tuple(int(p) for p in parts))
    return tuple(out)


def load_wdt_params(path) -> WdtScenarioParams:
    sec = _read(path, "wdt")
    return WdtScenarioParams(
        wdt_period=sec.getint("period_ms"),
        horizon=sec.getint("horizon_ms"),
        heartbeat_schedule=_int_list(sec.get("heartbeats", "")),
        replicas=sec.getint("replicas", 3),
        fault_schedule=_colon_tuples(sec.get("faults", ""), 3),
        restart_schedule=_colon_tuples(sec.get("restarts", ""), 2),
    )


def load_switchboard_params(path):
    """Returns (BeaconTrace, observation_period_ms, horizon_ms)."""
    sec = _read(path, "switchboard")
    rows = []
    for chunk in sec.get("beacons", "").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        t, mac, rate = chunk.split()
        rows.append((int(t), mac, float(rate)))
    return (
        BeaconTrace.from_rows(rows),
        sec.getint("observation_period_ms"),
        sec.getint("horizon_ms"),
    )
