"""Replicated variables: multiplexed writes, voted reads, adaptive N.

A write stores its value in every replica. A read returns the value held by
a strict majority (> N/2) of replicas, repairs any disagreeing replicas to
that value, and feeds the observed discrepancy count into the monitoring
stats. If no value reaches a strict majority the read raises
:class:`NoMajorityError` and leaves the replicas untouched.

The discrepancy stream doubles as a failure-risk estimate: the fraction of
reads in the last window whose discrepancies reached ``floor(N/2)`` (one more
and voting would have failed). The adaptation policy grows N by two when that
risk crosses its threshold and shrinks N by two after enough consecutive
clean windows, staying inside [n_min, n_max] and always odd.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field


class NoMajorityError(RuntimeError):
    """Voting failure: no value is held by a strict majority of replicas."""


@dataclass
class AdaptPolicy:
    window: int = 16
    escalate_threshold: float = 0.25
    deescalate_after: int = 4  # consecutive clean windows before shrinking
    n_min: int = 3
    n_max: int = 9

    def __post_init__(self):
        if self.n_min % 2 == 0 or self.n_max % 2 == 0:
            raise ValueError("replica bounds must be odd")
        if not 3 <= self.n_min <= self.n_max:
            raise ValueError("need 3 <= n_min <= n_max")
        if self.window < 1 or self.deescalate_after < 1:
            raise ValueError("window and deescalate_after must be positive")


@dataclass
class VoteStats:
    reads: int = 0
    discrepancy_histogram: dict = field(default_factory=dict)
    window: deque = field(default_factory=deque)  # last-W discrepancy counts
    failure_risk: float = 0.0


class ReplicaSet:
    """N-way storage for one redundant variable (N odd, >= 3)."""

    def __init__(self, name, replicas=3, *, initial=0, policy=None,
                 clock=None, events=None, bank_stride=4096):
        policy = policy or AdaptPolicy()
        if replicas % 2 == 0 or replicas < 3:
            raise ValueError("replica count must be odd and >= 3")
        if not policy.n_min <= replicas <= policy.n_max:
            raise ValueError(f"replica count {replicas} outside policy bounds [{policy.n_min}, {policy.n_max}]")
        self.name = name
        self.policy = policy
        self.clock = clock
        self.events = events
        self.bank_stride = bank_stride  # bank-separation layout hint; no effect here
        self.stats = VoteStats(window=deque(maxlen=policy.window))
        self._replicas = [initial] * replicas
        self._window_reads = 0
        self._window_dirty = 0
        self._clean_windows = 0

    @property
    def n(self) -> int:
        return len(self._replicas)

    @property
    def replicas(self) -> tuple:
        return tuple(self._replicas)

    def _now(self) -> int:
        return self.clock.now if self.clock is not None else 0

    def write(self, value):
        """Multiplexed write: every replica takes the value. Does not count
        as a read and records no discrepancy."""
        for i in range(len(self._replicas)):
            self._replicas[i] = value

    def inject_fault(self, replica_index, corrupt_value):
        """Test instrumentation: corrupt exactly one replica in place."""
        if not 0 <= replica_index < self.n:
            raise IndexError(f"replica index {replica_index} out of range for N={self.n}")
        self._replicas[replica_index] = corrupt_value

    def read(self):
        """Voted read: strict majority wins, minority replicas are repaired,
        stats and the adaptation policy are updated."""
        counts = Counter(self._replicas)
        value, agreeing = counts.most_common(1)[0]
        if agreeing * 2 <= self.n:
            if self.events is not None:
                self.events.log(self._now(), "vote_fail", self.name, self.stats.reads, "no-majority")
            raise NoMajorityError(f"no strict majority among replicas of '{self.name}'")
        discrepancies = self.n - agreeing
        if discrepancies:
            for i in range(len(self._replicas)):
                self._replicas[i] = value
        st = self.stats
        st.reads += 1
        st.discrepancy_histogram[discrepancies] = st.discrepancy_histogram.get(discrepancies, 0) + 1
        st.window.append(discrepancies)
        risky = self.n // 2
        st.failure_risk = sum(1 for d in st.window if d >= risky) / self.policy.window
        self._adapt(dirty=discrepancies >= risky, majority=value)
        return value

    def _adapt(self, dirty, majority):
        self._window_reads += 1
        if dirty:
            self._window_dirty += 1
        if self.stats.failure_risk > self.policy.escalate_threshold and self.n + 2 <= self.policy.n_max:
            self._resize(self.n + 2, majority)
            return
        if self._window_reads >= self.policy.window:
            if self._window_dirty == 0:
                self._clean_windows += 1
                if self._clean_windows >= self.policy.deescalate_after:
                    if self.n - 2 >= self.policy.n_min:
                        self._resize(self.n - 2, majority)
                    self._clean_windows = 0
            else:
                self._clean_windows = 0
            self._window_reads = 0
            self._window_dirty = 0

    def _resize(self, new_n, majority):
        old_n = self.n
        if new_n > old_n:
            self._replicas.extend([majority] * (new_n - old_n))
        else:
            del self._replicas[new_n:]
        # measurements made at the old N no longer apply
        self.stats.window.clear()
        self.stats.failure_risk = 0.0
        self._window_reads = 0
        self._window_dirty = 0
        self._clean_windows = 0
        if self.events is not None:
            self.events.log(self._now(), "adapt", self.name, new_n, f"{old_n}->{new_n}")
