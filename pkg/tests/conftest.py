"""Shared grid builders and refinement helpers for the test suite."""

from __future__ import annotations

import numpy as np

from vdlab.grid import ONE_SIDED, PERIODIC, SpacetimeGrid

TWO_PI = 2.0 * np.pi


def periodic_2d(n: int = 32, order: int = 2, metric=(1.0, -1.0)) -> SpacetimeGrid:
    """Fully periodic 1+1 box, both extents 2*pi."""
    return SpacetimeGrid(
        extents=((0.0, TWO_PI), (0.0, TWO_PI)),
        points=(n, n),
        metric=metric,
        boundary=(PERIODIC, PERIODIC),
        stencil_order=order,
    )


def mixed_2d(nt: int = 33, nx: int = 32, order: int = 2) -> SpacetimeGrid:
    """One-sided time axis on [0,1], periodic space on [0,2*pi)."""
    return SpacetimeGrid(
        extents=((0.0, 1.0), (0.0, TWO_PI)),
        points=(nt, nx),
        metric=(1.0, -1.0),
        boundary=(ONE_SIDED, PERIODIC),
        stencil_order=order,
    )


def box_2d(n: int = 33, order: int = 2, side: float = 1.0) -> SpacetimeGrid:
    """Both axes one-sided on [0, side]; for fields that are not periodic."""
    return SpacetimeGrid(
        extents=((0.0, side), (0.0, side)),
        points=(n, n),
        metric=(1.0, -1.0),
        boundary=(ONE_SIDED, ONE_SIDED),
        stencil_order=order,
    )


def periodic_4d(n: int = 8, order: int = 2) -> SpacetimeGrid:
    """Fully periodic 3+1 box, all extents 2*pi."""
    return SpacetimeGrid(
        extents=tuple(((0.0, TWO_PI),) * 4),
        points=(n, n, n, n),
        metric=(1.0, -1.0, -1.0, -1.0),
        boundary=(PERIODIC,) * 4,
        stencil_order=order,
    )


def refinement_errors(make_error, levels) -> list[float]:
    """Evaluate a scalar error functional at each refinement level."""
    return [float(make_error(lv)) for lv in levels]


def ratios(errs) -> list[float]:
    return [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
