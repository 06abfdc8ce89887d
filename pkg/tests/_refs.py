"""Reference Fomenko graphs for the catalog books, built by hand."""

from billiard_books import FomenkoGraph, graph_from_census

B1, B2, B3 = 0.0, 2.0, 3.5
B, A = 4.0, 9.0


def ref_graph_annulus_two_disks() -> FomenkoGraph:
    # two boundary-flow circles, one saddle pair at b, two axis orbits at a
    return graph_from_census(
        [(B1, "A"), (B1, "A"), (B, "C2"), (A, "A"), (A, "A")],
        [(0, 2), (1, 2), (2, 3), (2, 4)],
    )


def ref_graph_two_annuli_two_disks() -> FomenkoGraph:
    return graph_from_census(
        [
            (B1, "A"),
            (B1, "A"),
            (B2, "B"),
            (B2, "B"),
            (B, "C2"),
            (B, "C2"),
            (A, "A"),
            (A, "A"),
            (A, "A"),
            (A, "A"),
        ],
        [
            (0, 2),
            (1, 3),
            (2, 4),
            (2, 5),
            (3, 4),
            (3, 5),
            (4, 6),
            (4, 7),
            (5, 8),
            (5, 9),
        ],
    )


def ref_graph_chain_five() -> FomenkoGraph:
    return graph_from_census(
        [(B1, "A"), (B1, "A"), (B, "B"), (A, "A")],
        [(0, 2), (1, 2), (2, 3)],
    )


def ref_graph_chain_six() -> FomenkoGraph:
    return graph_from_census(
        [
            (B1, "A"),
            (B1, "A"),
            (B3, "B"),
            (B3, "B"),
            (B, "B"),
            (B, "C2"),
            (A, "A"),
            (A, "A"),
            (A, "A"),
        ],
        [
            (0, 2),
            (1, 3),
            (2, 4),
            (2, 5),
            (3, 4),
            (3, 5),
            (4, 6),
            (5, 7),
            (5, 8),
        ],
    )
