"""Context registry: sensors, actuators, guarded functions, reflective arrays.

Sensors are snapshot-readable values maintained by whoever observes the
context (in tests and scenarios, the caller; in a live system, updater
threads). Actuators bind a name to a side-effect callback that runs on every
write; writing an actuator never updates a same-named sensor snapshot (the
callback owns that state change). Guarded functions attach a boolean
expression over sensors to a body that runs once per false->true transition.

Reflective arrays grow one entry per string key (never removed) and track,
per observation period, how many beacons each key produced; a key that goes a
whole period without one turns stale until it is heard again.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .clock import VirtualClock
from .events import EventLog

DEFAULT_OBSERVATION_PERIOD_MS = 60_000

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _translate_guard(expr: str) -> str:
    """Rewrite the C-flavored operators a guard may use into Python."""
    out = expr.replace("&&", " and ").replace("||", " or ")
    out = re.sub(r"!(?!=)", " not ", out)
    return out


@dataclass
class _Guard:
    name: str
    body: object  # callable or None
    source: str
    code: object
    refs: frozenset
    last_value: bool = False
    fires: int = 0


@dataclass
class ArrayEntry:
    beacons_cur_period: int = 0
    beacons_last_period: int = 0
    silent_periods: int = 0
    stale: bool = False
    props: dict = field(default_factory=dict)
    last_beacon_ms: int | None = None


class ReflectiveArray:
    """String-keyed, insertion-ordered context array with staleness tracking."""

    def __init__(self, name, observation_period_ms=DEFAULT_OBSERVATION_PERIOD_MS):
        self.name = name
        self.observation_period_ms = observation_period_ms
        self.entries: dict[str, ArrayEntry] = {}
        self.periods_elapsed = 0

    def _entry(self, key) -> ArrayEntry:
        e = self.entries.get(key)
        if e is None:
            e = ArrayEntry()
            self.entries[key] = e
        return e

    def report_beacon(self, key, at_time=None):
        """A beacon arrived for key: the entry exists, counts it for the
        current period, and is no longer stale."""
        e = self._entry(key)
        e.beacons_cur_period += 1
        e.silent_periods = 0
        e.stale = False
        if at_time is not None:
            e.last_beacon_ms = int(at_time)

    def rollover(self, at_time=None):
        """Close the current observation period: current counts become last
        counts, and keys that stayed silent for the whole period go stale."""
        self.periods_elapsed += 1
        for e in self.entries.values():
            e.beacons_last_period = e.beacons_cur_period
            e.beacons_cur_period = 0
            if e.beacons_last_period == 0:
                e.silent_periods += 1
                e.stale = True
            else:
                e.silent_periods = 0
                e.stale = False

    def set_prop(self, key, prop, value):
        self._entry(key).props[prop] = value

    def get(self, key, prop):
        """Read a property of one entry. ``beacons`` is the count over the
        last closed period; ``silent_periods`` and ``stale`` are the
        staleness state; anything else is a user property."""
        if key not in self.entries:
            raise KeyError(f"no entry {key!r} in reflective array '{self.name}'")
        e = self.entries[key]
        if prop == "beacons":
            return e.beacons_last_period
        if prop == "silent_periods":
            return e.silent_periods
        if prop == "stale":
            return e.stale
        if prop not in e.props:
            raise KeyError(f"no property {prop!r} on entry {key!r} of '{self.name}'")
        return e.props[prop]

    def anext(self, cursor: int):
        """Iterate keys in insertion order: returns the key at the cursor
        position, or None past the end."""
        keys = list(self.entries)
        if 0 <= cursor < len(keys):
            return keys[cursor]
        return None

    def keys(self):
        return list(self.entries)


class ContextRegistry:
    def __init__(self, clock=None, events=None):
        self.clock = clock if clock is not None else VirtualClock()
        self.events = events if events is not None else EventLog()
        self.sensors: dict[str, object] = {}
        self.directions: dict[str, str] = {}
        self.actuators: dict[str, object] = {}  # name -> callback or None
        self.guards: list[_Guard] = []
        self.arrays: dict[str, ReflectiveArray] = {}
        self.constants: dict[str, object] = {}
        self.pipeline_string: str = ""
        self._actuations = 0

    # -- registration --------------------------------------------------------

    def register(self, name, direction, binding=None, initial=0):
        if direction not in ("sensor", "actuator", "both"):
            raise ValueError(f"direction must be sensor/actuator/both, got {direction!r}")
        old = self.directions.get(name)
        if old is not None and old != direction:
            direction = "both"
        self.directions[name] = direction
        if direction in ("sensor", "both") and name not in self.sensors:
            self.sensors[name] = initial
        if direction in ("actuator", "both"):
            self.actuators.setdefault(name, None)
        return name if binding is None else binding

    def bind_actuator(self, name, callback):
        if name not in self.actuators:
            raise KeyError(f"unknown actuator {name!r}")
        self.actuators[name] = callback

    def register_constant(self, name, value):
        """Make a name (e.g. a state constant) visible to guard expressions."""
        self.constants[name] = value

    def register_guard(self, body, expr, name=None):
        """Attach ``body`` to a boolean guard over sensors. The guard is
        evaluated now to seed its edge detector (registration never fires it)
        and re-evaluated on every update of a sensor it references."""
        refs = frozenset(
            m.group(0) for m in _IDENT_RE.finditer(expr) if m.group(0) in self.sensors
        )
        if not refs:
            raise ValueError(f"guard {expr!r} references no registered sensor")
        code = compile(_translate_guard(expr), "<guard>", "eval")
        gname = name or getattr(body, "__name__", None) or f"guard{len(self.guards)}"
        guard = _Guard(name=gname, body=body, source=expr, code=code, refs=refs)
        guard.last_value = self._eval(guard)
        self.guards.append(guard)
        return guard

    def register_array(self, name, observation_period_ms=DEFAULT_OBSERVATION_PERIOD_MS) -> ReflectiveArray:
        arr = self.arrays.get(name)
        if arr is None:
            arr = ReflectiveArray(name, observation_period_ms)
            self.arrays[name] = arr
        return arr

    # -- access --------------------------------------------------------------

    def sensor_value(self, name):
        if name not in self.sensors:
            raise KeyError(f"unknown sensor {name!r}")
        return self.sensors[name]

    def sensor_update(self, name, value):
        """Replace a sensor snapshot and re-evaluate every guard that
        references it; bodies run once per false->true edge. Returns the
        names of the guards that fired."""
        if name not in self.sensors:
            raise KeyError(f"unknown sensor {name!r}")
        self.sensors[name] = value
        fired = []
        for g in self.guards:
            if name not in g.refs:
                continue
            now_true = self._eval(g)
            if now_true and not g.last_value:
                g.fires += 1
                self.events.log(self.clock.now, "guard", g.name, g.fires)
                fired.append(g.name)
                if g.body is not None:
                    g.body()
            g.last_value = now_true
        return fired

    def actuator_write(self, name, value):
        """Run the side-effect bound to an actuator. With nothing bound the
        write is a tolerated no-op (warn event)."""
        if self.directions.get(name) not in ("actuator", "both"):
            raise KeyError(f"unknown actuator {name!r}")
        callback = self.actuators.get(name)
        if callback is None:
            self.events.log(self.clock.now, "warn", name, 0, "actuator-write-without-callback")
            return
        self._actuations += 1
        self.events.log(self.clock.now, "actuate", name, self._actuations, value)
        callback(value)

    def _eval(self, guard) -> bool:
        env = dict(self.constants)
        env.update(self.sensors)
        try:
            return bool(eval(guard.code, {"__builtins__": {}}, env))
        except Exception as exc:  # un-evaluable guards read as false
            self.events.log(self.clock.now, "warn", guard.name, 0, f"guard-eval-error:{exc}")
            return False
