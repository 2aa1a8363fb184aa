"""Runtime event trace.

All runtime components append to one log so a run exports as a single
ordered trace. Canonical kinds: ``fire`` (timeout fired), ``guard`` (guarded
function triggered), ``actuate`` (actuator written), ``vote_fail`` (no
majority on a voted read), ``adapt`` (replica count changed). Components may
also log ``warn`` records for tolerated misuse.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

CSV_HEADER = "time_ms,kind,name,instance,value"


@dataclass(frozen=True)
class Event:
    time_ms: int
    kind: str
    name: str
    instance: int
    value: str


class EventLog:
    def __init__(self):
        self.events: list[Event] = []

    def log(self, time_ms, kind, name, instance=0, value=""):
        self.events.append(Event(int(time_ms), kind, name, int(instance), str(value)))

    def of(self, kind) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            buf.write(CSV_HEADER + "\n")
        for e in self.events:
            writer.writerow([e.time_ms, e.kind, e.name, e.instance, e.value])
        return buf.getvalue()

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)
