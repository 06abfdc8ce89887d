"""Event-driven billiard motion on a book.

The particle travels along straight chords inside one leaf at a time.  At a
boundary ellipse it either reflects on the same leaf (unglued wall), reflects
onto the image leaf when both leaves sit on the same side of the ellipse, or
crosses straight onto the image leaf when they sit on opposite sides.  The
caustic parameter is conserved by all three transitions.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum

from . import conics
from .book import BilliardBook, Leaf, Side, boundary_side, glued_return_leaf, invert_gluings
from .conics import (
    caustic_parameter,
    project_to_conic,
    ray_conic_coefficients,
    ray_intersections,
    reflect,
)

log = logging.getLogger(__name__)

MAX_EVENTS_DEFAULT = 10_000
TIE_TOL = 1e-9  # two boundary hits closer than this count as a tie


class DynamicsError(Exception):
    pass


class TangentialHit(DynamicsError):
    def __init__(self, ellipse: float, x: float, y: float, t: float):
        super().__init__(f"tangential hit on C_{ellipse} at ({x:.6g}, {y:.6g})")
        self.ellipse = ellipse
        self.x = x
        self.y = y
        self.t = t


class EscapedLeaf(DynamicsError):
    pass


class Rule(Enum):
    R1 = "R1"  # plain wall reflection, same leaf
    R2 = "R2"  # reflection onto the image leaf (same side)
    R3 = "R3"  # straight crossing onto the image leaf (opposite sides)


class EventSide(Enum):
    FROM_INSIDE = "FromInside"
    FROM_OUTSIDE = "FromOutside"
    PASS_THROUGH = "PassThrough"


STATUS_OK = "ok"
STATUS_SINGULAR = "SingularLevelHit"


@dataclass(frozen=True)
class PhaseState:
    x: float
    y: float
    vx: float
    vy: float
    leaf_id: int


@dataclass(frozen=True)
class TrajectoryEvent:
    x: float
    y: float
    ellipse: float
    side: EventSide
    rule: Rule
    leaf_before: int
    leaf_after: int
    vx: float  # post-event velocity
    vy: float

    @property
    def is_reflection(self) -> bool:
        return self.side is not EventSide.PASS_THROUGH


@dataclass
class Trajectory:
    initial: PhaseState
    events: list[TrajectoryEvent]
    final: PhaseState
    caustic: float
    caustic_drift: float
    status: str = STATUS_OK


def contains(book: BilliardBook, leaf: Leaf, x: float, y: float, tol: float = 1e-9) -> bool:
    """Closed containment of a point in a leaf's region."""
    fam = book.family
    if fam.conic_residual(leaf.outer, x, y) > tol:
        return False
    if leaf.inner is not None and fam.conic_residual(leaf.inner, x, y) < -tol:
        return False
    return True


def _tangency_threshold(book: BilliardBook) -> float:
    return 1e-9 * book.family.a


def _coeffs(fam, e: float, state: PhaseState):
    return ray_conic_coefficients(fam, e, state.x, state.y, state.vx, state.vy)


def step(book: BilliardBook, state: PhaseState) -> tuple[PhaseState, TrajectoryEvent]:
    """Advance to the nearest boundary of the current leaf and apply the
    transition rule there.

    Raises TangentialHit when the selected hit grazes the boundary (the
    caller decides whether the flow extends) and EscapedLeaf when the ray
    finds no boundary at all.
    """
    fam = book.family
    leaf = book.leaf(state.leaf_id)
    graze_tol = _tangency_threshold(book)
    best: tuple[float, float, bool] | None = None  # (t, ellipse, grazing)
    for e in leaf.boundary_params():
        disc, roots = ray_intersections(fam, e, state.x, state.y, state.vx, state.vy)
        if abs(disc) < graze_tol:
            # a graze; the double root may be lost to rounding, so rebuild it
            A, B, _ = _coeffs(fam, e, state)
            candidates = [(-B / A, True)] if A != 0.0 else []
        else:
            candidates = [(t, False) for t in roots]
        for t, grazing in candidates:
            if t <= conics.T_MIN:
                continue
            if best is None or t < best[0] - TIE_TOL:
                best = (t, e, grazing)
            elif abs(t - best[0]) <= TIE_TOL and e < best[1]:
                log.warning("boundary tie at t=%.3e; taking smaller ellipse %s", t, e)
                best = (t, e, grazing)
    if best is None:
        raise EscapedLeaf(
            f"ray from ({state.x:.6g}, {state.y:.6g}) on leaf {state.leaf_id} hits no boundary"
        )
    t, e, grazing = best
    hx = state.x + t * state.vx
    hy = state.y + t * state.vy
    if grazing:
        raise TangentialHit(e, hx, hy, t)
    hx, hy = project_to_conic(fam, e, hx, hy)

    gluing = book.gluing_for(e)
    side_here = boundary_side(leaf, e)
    event_side = EventSide.FROM_INSIDE if side_here is Side.WITHIN else EventSide.FROM_OUTSIDE
    if gluing is None or gluing.image(leaf.id) == leaf.id:
        rule = Rule.R1
        leaf_after = leaf.id
        vx, vy = reflect(fam, e, hx, hy, state.vx, state.vy)
    else:
        leaf_after = gluing.image(leaf.id)
        if boundary_side(book.leaf(leaf_after), e) is side_here:
            rule = Rule.R2
            vx, vy = reflect(fam, e, hx, hy, state.vx, state.vy)
        else:
            rule = Rule.R3
            event_side = EventSide.PASS_THROUGH
            n = math.hypot(state.vx, state.vy)
            vx, vy = state.vx / n, state.vy / n
    event = TrajectoryEvent(hx, hy, e, event_side, rule, leaf.id, leaf_after, vx, vy)
    return PhaseState(hx, hy, vx, vy, leaf_after), event


def simulate(
    book: BilliardBook, state: PhaseState, max_events: int = MAX_EVENTS_DEFAULT
) -> Trajectory:
    """Run up to ``max_events`` boundary events.

    A grazing hit on a glued ellipse continues straight (recorded as a
    crossing) when the gluing chain returns to the same leaf, and otherwise
    ends the trajectory with SingularLevelHit status.
    """
    fam = book.family
    if not contains(book, book.leaf(state.leaf_id), state.x, state.y):
        raise EscapedLeaf(
            f"initial position ({state.x:.6g}, {state.y:.6g}) is not in leaf {state.leaf_id}"
        )
    caustic0 = caustic_parameter(fam, state.x, state.y, state.vx, state.vy)
    events: list[TrajectoryEvent] = []
    drift = 0.0
    status = STATUS_OK
    cur = state
    while len(events) < max_events:
        try:
            cur, ev = step(book, cur)
        except TangentialHit as hit:
            ret = glued_return_leaf(book, hit.ellipse, cur.leaf_id)
            if ret is not None and ret != cur.leaf_id:
                status = STATUS_SINGULAR
                break
            hx, hy = project_to_conic(fam, hit.ellipse, hit.x, hit.y)
            ev = TrajectoryEvent(
                hx,
                hy,
                hit.ellipse,
                EventSide.PASS_THROUGH,
                Rule.R3,
                cur.leaf_id,
                cur.leaf_id,
                cur.vx,
                cur.vy,
            )
            cur = PhaseState(hx, hy, cur.vx, cur.vy, cur.leaf_id)
        events.append(ev)
        drift = max(
            drift, abs(caustic_parameter(fam, cur.x, cur.y, cur.vx, cur.vy) - caustic0)
        )
    return Trajectory(state, events, cur, caustic0, drift, status)


def time_reversed_start(book: BilliardBook, traj: Trajectory) -> PhaseState:
    """State launching the time reversal of a trajectory.

    The final state sits on a boundary just after its event, so the reversal
    starts from the same point with the reversed pre-event velocity, on the
    leaf the particle arrived from; it then retraces the last chord.
    """
    if not traj.events:
        return replace(traj.initial, vx=-traj.initial.vx, vy=-traj.initial.vy)
    last = traj.events[-1]
    if last.rule is Rule.R3:
        ux, uy = last.vx, last.vy
    else:
        ux, uy = reflect(book.family, last.ellipse, last.x, last.y, last.vx, last.vy)
    return PhaseState(last.x, last.y, -ux, -uy, last.leaf_before)


def reverse(book: BilliardBook, traj: Trajectory) -> Trajectory:
    """Time-reverse a trajectory by simulating on the book with inverted
    gluings from the reversed final state.

    The reversed run emits one event fewer than the forward one (the forward
    initial point is interior, not an event); its hit points retrace the
    forward ones in reverse order.
    """
    if traj.status != STATUS_OK:
        raise DynamicsError("cannot reverse a trajectory that ended on a singular level")
    inv = invert_gluings(book)
    start = time_reversed_start(book, traj)
    return simulate(inv, start, max_events=max(len(traj.events) - 1, 0))


def trace_to_game(traj: Trajectory) -> list[tuple[float, EventSide]]:
    """Reflection sequence (ellipse, side) of a trajectory; crossings are not
    game reflections and are dropped."""
    return [(ev.ellipse, ev.side) for ev in traj.events if ev.is_reflection]


# ---------------------------------------------------------------------------
# CSV emission: one row per event
# ---------------------------------------------------------------------------

CSV_HEADER = [
    "event_index",
    "leaf_before",
    "leaf_after",
    "ellipse",
    "rule",
    "side",
    "x",
    "y",
    "vx",
    "vy",
]


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for i, ev in enumerate(traj.events):
        writer.writerow(
            [
                i,
                ev.leaf_before,
                ev.leaf_after,
                repr(ev.ellipse),
                ev.rule.value,
                ev.side.value,
                repr(ev.x),
                repr(ev.y),
                repr(ev.vx),
                repr(ev.vy),
            ]
        )
    return buf.getvalue()


def save_trajectory_csv(traj: Trajectory, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(trajectory_csv(traj))
