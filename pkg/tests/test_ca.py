"""Ring automata: rule tables, the reference trajectory, and symmetries."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import INIT, RULE_110_BITS, STEP1, STEPS, TARGET
from metastable import ca, core
from metastable.errors import OutOfRange, StateDomainViolation, TooFewEntities


def test_table_number_round_trip():
    for n in range(256):
        assert ca.RuleTable.from_number(n).number == n


def test_rule_110_table_is_pinned():
    assert ca.RuleTable.from_number(110).bits == RULE_110_BITS


def test_table_lookup_uses_the_packed_bit_convention():
    table = ca.RuleTable.from_number(110)
    # neighbourhood (left, center, right) -> bit 4*l + 2*c + r of the number
    assert table(0, 0, 0) == 0
    assert table(0, 0, 1) == 1
    assert table(0, 1, 1) == 1
    assert table(1, 1, 0) == 1
    assert table(1, 1, 1) == 0


def test_table_rejects_bad_input():
    with pytest.raises(OutOfRange):
        ca.RuleTable.from_number(256)
    with pytest.raises(OutOfRange):
        ca.RuleTable.from_number(-1)
    with pytest.raises(OutOfRange):
        ca.RuleTable((0, 1))
    with pytest.raises(StateDomainViolation):
        ca.RuleTable((0, 1, 0, 1, 0, 1, 0, 2))
    with pytest.raises(StateDomainViolation):
        ca.RuleTable.from_number(110)(0, 2, 0)


def test_ring_milieu_shape():
    m = core.ring_milieu(5)
    expected = np.array(
        [
            [1, 1, 0, 0, 1],
            [1, 1, 1, 0, 0],
            [0, 1, 1, 1, 0],
            [0, 0, 1, 1, 1],
            [1, 0, 0, 1, 1],
        ]
    )
    assert np.array_equal(m, expected)
    with pytest.raises(TooFewEntities):
        core.ring_milieu(2)


def test_reference_trajectory_is_reproduced_exactly():
    rows = ca.run_rule(110, INIT, STEPS)
    assert core.render_state(rows[0]) == INIT
    assert core.render_state(rows[1]) == STEP1
    assert core.render_state(rows[-1]) == TARGET


def test_identity_rule_keeps_any_state():
    # the table that maps every neighbourhood to its own center is rule 204
    identity = ca.RuleTable(tuple((code >> 1) & 1 for code in range(8)))
    assert identity.number == 204
    rows = ca.run_rule(204, INIT, 7)
    for row in rows:
        assert core.render_state(row) == INIT


def test_null_rule_clears_everything():
    rows = ca.run_rule(0, INIT, STEPS)
    assert not rows[1].any()
    assert not rows[-1].any()
    # agreement with the reference target is exactly the target's zero count
    score = core.match(rows[-1], core.parse_state_string(TARGET))
    assert score == pytest.approx(20 / 31)


@given(
    st.integers(0, 255),
    st.text(alphabet="01", min_size=3, max_size=24),
    st.integers(0, 23),
    st.integers(1, 8),
)
@settings(max_examples=40)
def test_shift_equivariance(rule, init, shift, steps):
    """Rotating the ring then running equals running then rotating."""
    base = core.parse_state_string(init)
    rolled = np.roll(base, shift)
    a = core.run(ca.make_automaton(rule, rolled), steps)
    b = core.run(ca.make_automaton(rule, base), steps)
    assert np.array_equal(a, np.roll(b, shift, axis=1))


@given(st.integers(0, 255), st.text(alphabet="01", min_size=3, max_size=24))
@settings(max_examples=40)
def test_propagation_respects_the_ring(rule, init):
    """A cell's next state depends only on its three-cell neighbourhood."""
    table = ca.RuleTable.from_number(rule)
    cells = core.parse_state_string(init)
    stepped = core.step(ca.make_automaton(table, cells)).current
    n = cells.size
    for i in range(n):
        want = table(int(cells[(i - 1) % n]), int(cells[i]), int(cells[(i + 1) % n]))
        assert stepped[i] == want
