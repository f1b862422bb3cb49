"""Build a system from its two halves, step it, and take it apart again.

A runnable system is a pair: a structural half (how many entities, what
states they may take, where they start) and an operational half (the update
function, the interaction weights, the schedule). `modulate` binds the two
into something you can run; `demodulate` splits a running system back into
the same two halves.
"""

import numpy as np

from metastable import ca, core


def main():
    seed = core.parse_state_string("0000001000000")
    structural = core.Structural(
        count=13,
        states=core.BINARY,
        init=seed,
        current=seed.copy(),
    )
    operational = core.Operational(
        update=ca.RuleTable.from_number(90),
        milieu=core.ring_milieu(13),
        schedule=core.Synchronous(),
        fan_in=ca.FAN_IN,
    )

    system = core.modulate(structural, operational)
    print("bound a %d-cell ring under rule %d" % (system.count, 90))
    print()

    for row in core.run(system, 6):
        print(core.render_state(row).replace("0", ".").replace("1", "#"))
    print()

    # the two halves come back out unchanged
    s2, o2 = core.demodulate(system)
    assert np.array_equal(s2.init, structural.init)
    assert o2.update.number == 90
    assert core.modulate(s2, o2) == system
    print("demodulate returned both halves; rebinding them gives the same system")


if __name__ == "__main__":
    main()
