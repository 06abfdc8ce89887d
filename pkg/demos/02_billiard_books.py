"""Motion on a billiard book.

A book glues elliptic disks and annuli along shared boundary ellipses; the
gluing permutation decides whether the particle reflects on the same leaf,
reflects onto the image leaf, or passes straight through.  The caustic value
of the start decides which regime the trajectory lives in.
"""

from billiard_books import PhaseState, simulate, trace_to_game
from billiard_books.catalog import annulus_two_disks
from billiard_books.conics import directions_with_caustic
from billiard_books.render import RenderSpec, save_svg, trajectory_svg

book = annulus_two_disks()
print("leaves:")
for lf in book.leaves:
    kind = f"disk({lf.outer})" if lf.is_disk else f"annulus({lf.outer}, {lf.inner})"
    print(f"  {lf.id}: {kind}")
for g in book.gluings:
    print(f"gluing along C_{g.ellipse}: cycles {g.cycles()}")

# caustic between the two ellipses: the particle never reaches the inner wall
inner = simulate(book, PhaseState(2.8, 0.3, 0.0, 1.0, 1), max_events=200)
print(f"\ncaustic {inner.caustic:.3f}: {len(inner.events)} events, "
      f"all {set((e.ellipse, e.rule.value) for e in inner.events)}")

# hyperbolic caustic: the alternating two-ellipse game
p = (1.0, 1.6)
v = directions_with_caustic(book.family, *p, 6.0)[0]
game = simulate(book, PhaseState(p[0], p[1], v[0], v[1], 1), max_events=200)
print(f"caustic {game.caustic:.3f}: drift {game.caustic_drift:.2e}")
print("first eight events (ellipse, rule, leaf change):")
for ev in game.events[:8]:
    print(f"  C_{ev.ellipse}: {ev.rule.value:^3} {ev.leaf_before}->{ev.leaf_after} "
          f"at ({ev.x:+.3f}, {ev.y:+.3f})")
print("reflection trace:", [(e, s.value) for e, s in trace_to_game(game)[:4]])

save_svg(trajectory_svg(book, game, RenderSpec()), "book_trajectory.svg")
print("\nwrote book_trajectory.svg (one panel per leaf)")
