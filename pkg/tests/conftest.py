import math

import numpy as np
import pytest

from billiard_books import ConfocalFamily, PhaseState
from billiard_books.catalog import CATALOG


@pytest.fixture(scope="session")
def family() -> ConfocalFamily:
    return ConfocalFamily(9.0, 4.0)


@pytest.fixture(scope="session")
def books():
    return {name: fn() for name, fn in CATALOG.items()}


def random_state(book, rng, caustic_margin: float = 1e-6) -> PhaseState:
    """Uniform-ish phase state strictly inside a random leaf, avoiding
    caustics too close to a critical level."""
    from billiard_books import caustic_parameter, critical_levels

    levels = critical_levels(book)
    fam = book.family
    while True:
        leaf = book.leaves[rng.integers(len(book.leaves))]
        sx = math.sqrt(fam.a - leaf.outer)
        sy = math.sqrt(fam.b - leaf.outer)
        px = rng.uniform(-sx, sx)
        py = rng.uniform(-sy, sy)
        if fam.conic_residual(leaf.outer, px, py) > -1e-6:
            continue  # too close to (or beyond) the outer boundary
        if leaf.inner is not None and fam.conic_residual(leaf.inner, px, py) < 1e-6:
            continue  # inside or hugging the hole
        th = rng.uniform(0.0, 2.0 * math.pi)
        vx, vy = math.cos(th), math.sin(th)
        lam = caustic_parameter(fam, px, py, vx, vy)
        if min(abs(lam - lv) for lv in levels) < caustic_margin:
            continue
        return PhaseState(px, py, vx, vy, leaf.id)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
