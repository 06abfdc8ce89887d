import math

import pytest

from billiard_books import (
    EventSide,
    PhaseState,
    Rule,
    caustic_parameter,
    reverse,
    simulate,
    step,
    trace_to_game,
    trajectory_csv,
)
from billiard_books.conics import directions_with_caustic
from billiard_books.dynamics import STATUS_OK, STATUS_SINGULAR, time_reversed_start
from conftest import random_state, rng_for


def toward_e2_state(book, caustic=6.0, leaf=1):
    """State on the outer annulus whose first event is at the inner ellipse."""
    p = (1.0, 1.6)
    for v in directions_with_caustic(book.family, *p, caustic):
        st = PhaseState(p[0], p[1], v[0], v[1], leaf)
        _, ev = step(book, st)
        if ev.ellipse == 2.0:
            return st
    raise AssertionError("no direction reaches the inner ellipse first")


def toward_e1_state(book, caustic=6.0, leaf=1):
    p = (1.0, 1.6)
    for v in directions_with_caustic(book.family, *p, caustic):
        st = PhaseState(p[0], p[1], v[0], v[1], leaf)
        _, ev = step(book, st)
        if ev.ellipse == 0.0:
            return st
    raise AssertionError("no direction reaches the outer ellipse first")


# --- single step rules on the three-leaf book -----------------------------

def test_step_r2_disk_to_disk(books):
    book = books["annulus_two_disks"]
    st = PhaseState(0.0, 0.5, 1.0, 0.0, 2)
    new, ev = step(book, st)
    assert ev.rule is Rule.R2
    assert ev.side is EventSide.FROM_INSIDE
    assert (ev.leaf_before, ev.leaf_after) == (2, 3)
    assert new.leaf_id == 3


def test_step_r3_disk_to_annulus(books):
    book = books["annulus_two_disks"]
    st = PhaseState(0.0, 0.5, 1.0, 0.0, 3)
    _, ev = step(book, st)
    assert ev.rule is Rule.R3
    assert ev.side is EventSide.PASS_THROUGH
    assert (ev.leaf_before, ev.leaf_after) == (3, 1)


def test_step_r1_on_outer_wall(books):
    book = books["annulus_two_disks"]
    st = toward_e1_state(book)
    _, ev = step(book, st)
    assert ev.rule is Rule.R1
    assert ev.leaf_before == ev.leaf_after == 1


# --- whole trajectories ----------------------------------------------------

def test_game_cycle_on_four_leaf_book(books):
    book = books["two_annuli_two_disks"]
    traj = simulate(book, toward_e2_state(book), max_events=40)
    pattern = [(ev.ellipse, ev.rule) for ev in traj.events[:4]]
    assert pattern == [(2.0, Rule.R3), (2.0, Rule.R2), (2.0, Rule.R3), (0.0, Rule.R2)]
    # and it repeats
    again = [(ev.ellipse, ev.rule) for ev in traj.events[4:8]]
    assert again == pattern


def test_annulus_regime_on_four_leaf_book(books):
    book = books["two_annuli_two_disks"]
    traj = simulate(book, toward_e1_state(book), max_events=20)
    kinds = {(ev.ellipse, ev.rule, ev.side) for ev in traj.events}
    assert kinds == {
        (0.0, Rule.R2, EventSide.FROM_INSIDE),
        (2.0, Rule.R2, EventSide.FROM_OUTSIDE),
    }


def test_inner_caustic_regime_reflects_on_outer_wall_only(books):
    book = books["annulus_two_disks"]
    st = PhaseState(2.8, 0.3, 0.0, 1.0, 1)
    lam = caustic_parameter(book.family, st.x, st.y, st.vx, st.vy)
    assert 0.0 < lam < 2.0  # caustic between the two ellipses
    traj = simulate(book, st, max_events=50)
    assert {(ev.ellipse, ev.rule) for ev in traj.events} == {(0.0, Rule.R1)}


def test_caustic_conservation_long_runs(books):
    rng = rng_for(42)
    for name in ("annulus_two_disks", "chain_five"):
        book = books[name]
        for _ in range(5):
            traj = simulate(book, random_state(book, rng), max_events=1000)
            assert traj.status == STATUS_OK
            assert traj.caustic_drift <= 1e-9


def test_unit_speed_and_r3_continuity(books):
    book = books["chain_six"]
    traj = simulate(book, toward_e2_state(book), max_events=300)
    prev_v = (traj.initial.vx, traj.initial.vy)
    for ev in traj.events:
        assert math.hypot(ev.vx, ev.vy) == pytest.approx(1.0, abs=1e-12)
        if ev.rule is Rule.R3:
            assert (ev.vx, ev.vy) == pytest.approx(prev_v, abs=1e-15)
        prev_v = (ev.vx, ev.vy)


def test_leaf_transition_law(books):
    for name in ("two_annuli_two_disks", "chain_six", "four_sheets"):
        book = books[name]
        traj = simulate(book, toward_e2_state(book), max_events=200)
        for ev in traj.events:
            g = book.gluing_for(ev.ellipse)
            if ev.rule is Rule.R1:
                assert ev.leaf_after == ev.leaf_before
            else:
                assert g is not None and g.image(ev.leaf_before) == ev.leaf_after


def test_determinism(books):
    book = books["chain_five"]
    st = toward_e2_state(book)
    t1 = simulate(book, st, max_events=200)
    t2 = simulate(book, st, max_events=200)
    assert [(e.x, e.y, e.leaf_after) for e in t1.events] == [
        (e.x, e.y, e.leaf_after) for e in t2.events
    ]


# --- trace projection ------------------------------------------------------

def test_trace_to_game_alternating(books):
    book = books["two_annuli_two_disks"]
    trace = trace_to_game(simulate(book, toward_e2_state(book), max_events=40))
    assert trace[:4] == [
        (2.0, EventSide.FROM_INSIDE),
        (0.0, EventSide.FROM_INSIDE),
        (2.0, EventSide.FROM_INSIDE),
        (0.0, EventSide.FROM_INSIDE),
    ]


def test_trace_to_game_annulus(books):
    book = books["two_annuli_two_disks"]
    trace = trace_to_game(simulate(book, toward_e1_state(book), max_events=20))
    flat = trace[:4]
    assert flat[0][0] != flat[1][0]
    assert {(e, s) for e, s in flat} == {
        (0.0, EventSide.FROM_INSIDE),
        (2.0, EventSide.FROM_OUTSIDE),
    }


def test_trace_to_game_empty(books):
    book = books["annulus_two_disks"]
    traj = simulate(book, PhaseState(2.8, 0.0, 1.0, 0.0, 1), max_events=0)
    assert trace_to_game(traj) == []


# --- reversal ---------------------------------------------------------------

def test_reverse_matches_on_inverted_book(books):
    book = books["chain_five"]
    fwd = simulate(book, toward_e2_state(book), max_events=12)
    rev = reverse(book, fwd)
    n = len(fwd.events)
    assert len(rev.events) == n - 1
    for j in range(n - 1):
        assert rev.events[j].x == pytest.approx(fwd.events[n - 2 - j].x, abs=1e-8)
        assert rev.events[j].y == pytest.approx(fwd.events[n - 2 - j].y, abs=1e-8)


def test_reverse_empty(books):
    book = books["annulus_two_disks"]
    fwd = simulate(book, PhaseState(2.8, 0.0, 0.0, 1.0, 1), max_events=0)
    assert reverse(book, fwd).events == []


def test_same_book_reversal_fails_for_three_cycles(books):
    # gluings that are not involutions are not time reversible
    book = books["chain_five"]
    fwd = simulate(book, toward_e2_state(book), max_events=30)
    back = simulate(book, time_reversed_start(book, fwd), max_events=len(fwd.events) - 1)
    n = len(fwd.events)
    mismatch = max(
        math.hypot(
            back.events[j].x - fwd.events[n - 2 - j].x,
            back.events[j].y - fwd.events[n - 2 - j].y,
        )
        for j in range(len(back.events))
    )
    assert mismatch > 1e-3


# --- degenerate caustics ------------------------------------------------------

def test_focal_caustic_runs_normally(books):
    # a chord aimed at a focus stays on the focal level and converges toward
    # the long-axis orbit without tripping the grazing detector
    book = books["annulus_two_disks"]
    f = book.family.focal_half_distance
    dx, dy = f - 2.8, -0.35
    n = math.hypot(dx, dy)
    st = PhaseState(2.8, 0.35, dx / n, dy / n, 1)
    assert caustic_parameter(book.family, st.x, st.y, st.vx, st.vy) == pytest.approx(4.0)
    traj = simulate(book, st, max_events=300)
    assert traj.status == STATUS_OK and len(traj.events) == 300
    assert traj.caustic_drift <= 1e-9
    assert abs(traj.events[-1].y) < 0.1  # reflections settle near the long axis


def test_top_caustic_minor_axis_bounce(books):
    book = books["annulus_two_disks"]
    st = PhaseState(0.0, 1.7, 0.0, 1.0, 1)
    assert caustic_parameter(book.family, st.x, st.y, st.vx, st.vy) == pytest.approx(9.0)
    traj = simulate(book, st, max_events=40)
    assert traj.status == STATUS_OK
    assert all(abs(ev.x) < 1e-9 for ev in traj.events)  # pinned to the minor axis


# --- grazing hits -----------------------------------------------------------

def tangent_start():
    # ray y = sqrt(2) grazes the inner ellipse at its top vertex
    return PhaseState(-2.0, math.sqrt(2.0), 1.0, 0.0, 1)


def test_grazing_continues_when_chain_returns(books):
    traj = simulate(books["annulus_two_disks"], tangent_start(), max_events=10)
    assert traj.status == STATUS_OK
    assert traj.events[0].side is EventSide.PASS_THROUGH
    assert traj.events[0].leaf_before == traj.events[0].leaf_after == 1


def test_grazing_singular_when_chain_crosses(books):
    traj = simulate(books["two_annuli_two_disks"], tangent_start(), max_events=10)
    assert traj.status == STATUS_SINGULAR
    assert traj.events == []


# --- CSV ---------------------------------------------------------------------

def test_csv_shape(books):
    book = books["annulus_two_disks"]
    traj = simulate(book, toward_e2_state(book), max_events=7)
    text = trajectory_csv(traj)
    lines = text.strip().split("\n")
    assert lines[0] == "event_index,leaf_before,leaf_after,ellipse,rule,side,x,y,vx,vy"
    assert len(lines) == 8
    assert trajectory_csv(traj) == text  # deterministic
