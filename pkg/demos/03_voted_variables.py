#!/usr/bin/env python3
"""Replica sets close up: multiplexed writes, voted reads, fault injection,
and the adaptive replica-count policy."""

from cpm.runtime import AdaptPolicy, EventLog, NoMajorityError, ReplicaSet


def main():
    events = EventLog()
    rs = ReplicaSet("speed", replicas=3, events=events)

    print("== writes multiplex, reads vote ==")
    rs.write(120)
    print("after write(120):", rs.replicas)
    rs.inject_fault(1, 999)
    print("after corrupting replica 1:", rs.replicas)
    print("voted read:", rs.read(), "-> replicas repaired:", rs.replicas)

    print("\n== the documented failure modes ==")
    rs.write(120)
    rs.inject_fault(0, 999)
    rs.inject_fault(1, 999)
    print("two identical corruptions deceive the vote:", rs.read())
    rs.write(1)
    rs.inject_fault(0, 2)
    rs.inject_fault(1, 3)
    try:
        rs.read()
    except NoMajorityError as exc:
        print("three-way disagreement:", exc)

    print("\n== adaptive redundancy ==")
    events = EventLog()
    rs = ReplicaSet("speed", 3, events=events, policy=AdaptPolicy())
    rs.write(7)
    print("risk threshold 0.25 over a window of 16 reads; corrupting 5 of 16:")
    for i in range(16):
        if i < 5:
            rs.inject_fault(0, 99)
        rs.read()
    print("replica count now:", rs.n)
    for _ in range(4 * 16):
        rs.read()
    print("after four clean windows:", rs.n)
    print("adaptation events:", [(e.time_ms, e.value) for e in events.of("adapt")])


if __name__ == "__main__":
    main()
