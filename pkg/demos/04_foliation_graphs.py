"""Topology of the caustic foliation.

Away from critical caustic values the phase space splits into tori, each
identified by its symbolic event cycle.  At critical values the tori merge
through atoms: A (a single circle), B (circle with two separatrices) or C2
(two circles, four separatrices).  The assembled graph is a topological
fingerprint of the book.
"""

from billiard_books import (
    build_fomenko_graph,
    classify_singular_level,
    critical_levels,
    enumerate_regimes,
    graphs_isomorphic,
    to_dot,
)
from billiard_books.catalog import CATALOG

book = CATALOG["two_annuli_two_disks"]()
levels = critical_levels(book)
print(f"critical caustic values: {levels}")
for lo, hi in zip(levels, levels[1:]):
    mid = (lo + hi) / 2
    regimes = enumerate_regimes(book, mid)
    print(f"  ({lo}, {hi}): {len(regimes)} tori")
    for r in regimes:
        cycle = " ".join(
            f"C{s.ellipse:g}{'^' if s.sign > 0 else 'v' if s.sign < 0 else '-'}"
            for s in r.states
        )
        print(f"      {cycle}")

print("\natoms at the inner grazing level:")
for atom in classify_singular_level(book, 2.0):
    print(f"  {atom.type}: {atom.description}")

print("\natom censuses across the gallery:")
graphs = {}
for name, fn in CATALOG.items():
    graphs[name] = build_fomenko_graph(fn())
    census = dict(sorted(graphs[name].census().items()))
    print(f"  {name:24s} {census}")

same = graphs_isomorphic(graphs["chain_five"], graphs["three_sheets"])
print(f"\nchain_five vs three_sheets graphs isomorphic: {same}")

with open("foliation_graph.dot", "w", encoding="utf-8") as fh:
    fh.write(to_dot(graphs["two_annuli_two_disks"]))
print("wrote foliation_graph.dot")
