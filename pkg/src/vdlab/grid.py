"""Uniform tensor-product spacetime grids with diagonal constant metrics.

All derivative operators are finite-difference stencils of a declared order
(2 by default, 4 optional) applied axis by axis.  Periodic axes wrap; axes
marked 'one-sided' use biased stencils of the same order at the edges, so a
single refinement study sees one convergence rate everywhere.

Conventions
-----------
* Axis 0 is time.  The metric is a constant diagonal with Lorentzian
  signature: exactly one positive entry, at axis 0.
* Covariant derivative components are plain partials (the Christoffel
  symbols of a constant diagonal metric vanish, and the curvature scalar
  is zero).
* Index raising divides by the metric entry: a^mu = a_mu / g_mumu.
* The wave operator is the metric-weighted sum of direct second
  differences per axis, not a composition of first differences.

Reductions that feed reports use math.fsum over a fixed memory order, so
equal inputs give bitwise equal outputs regardless of BLAS threading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

PERIODIC = "periodic"
ONE_SIDED = "one-sided"

# Central stencils: (derivative order, accuracy order) -> (offsets, coefficients).
_CENTRAL = {
    (1, 2): ((-1, 1), (-0.5, 0.5)),
    (2, 2): ((-1, 0, 1), (1.0, -2.0, 1.0)),
    (1, 4): ((-2, -1, 1, 2), (1 / 12, -2 / 3, 2 / 3, -1 / 12)),
    (2, 4): ((-2, -1, 0, 1, 2), (-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12)),
}

# Biased edge rows for one-sided axes, left edge only; the right edge uses the
# mirror rule (offsets negated, coefficients times (-1)**deriv).  Every row is
# exact on polynomials through degree >= accuracy order + deriv order - 1, so
# the edge closure preserves the interior order.
_EDGE = {
    (1, 2): [(0, (0, 1, 2), (-1.5, 2.0, -0.5))],
    (2, 2): [(0, (0, 1, 2, 3), (2.0, -5.0, 4.0, -1.0))],
    (1, 4): [
        (0, (0, 1, 2, 3, 4), (-25 / 12, 4.0, -3.0, 4 / 3, -1 / 4)),
        (1, (-1, 0, 1, 2, 3), (-1 / 4, -5 / 6, 3 / 2, -1 / 2, 1 / 12)),
    ],
    (2, 4): [
        (0, (0, 1, 2, 3, 4, 5), (15 / 4, -77 / 6, 107 / 6, -13.0, 61 / 12, -5 / 6)),
        (1, (-1, 0, 1, 2, 3, 4), (5 / 6, -5 / 4, -1 / 3, 7 / 6, -1 / 2, 1 / 12)),
    ],
}


def require_finite(values: np.ndarray, name: str) -> None:
    """Raise ValueError naming the first non-finite sample, if any."""
    if np.all(np.isfinite(values)):
        return
    idx = tuple(int(i) for i in np.argwhere(~np.isfinite(values))[0])
    raise ValueError(f"{name} contains a non-finite value at index {idx}")


@dataclass(frozen=True)
class SpacetimeGrid:
    """Uniform grid on a box, with per-axis extent, point count and boundary.

    Parameters
    ----------
    extents : sequence of (lo, hi)
        Coordinate range per axis.  On periodic axes `hi` is the period end,
        excluded from the sample points.
    points : sequence of int
        Samples per axis, >= 5 each.
    metric : sequence of float
        Diagonal metric entries, one per axis.  Exactly one positive entry,
        at axis 0; no zeros.
    boundary : sequence of str
        'periodic' or 'one-sided' per axis.
    stencil_order : int
        Finite-difference accuracy order, 2 or 4.
    """

    extents: tuple[tuple[float, float], ...]
    points: tuple[int, ...]
    metric: tuple[float, ...]
    boundary: tuple[str, ...]
    stencil_order: int = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "extents", tuple((float(a), float(b)) for a, b in self.extents))
        object.__setattr__(self, "points", tuple(int(n) for n in self.points))
        object.__setattr__(self, "metric", tuple(float(g) for g in self.metric))
        object.__setattr__(self, "boundary", tuple(str(b) for b in self.boundary))
        dim = len(self.extents)
        if dim not in (2, 4):
            raise ValueError(f"grid dimension must be 1+1 or 3+1, got {dim} axes")
        if not (len(self.points) == len(self.metric) == len(self.boundary) == dim):
            raise ValueError("extents, points, metric and boundary must have equal length")
        if self.stencil_order not in (2, 4):
            raise ValueError(f"stencil_order must be 2 or 4, got {self.stencil_order}")
        for a, (lo, hi) in enumerate(self.extents):
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
                raise ValueError(f"axis {a}: extent ({lo}, {hi}) is not an increasing finite range")
        for a, n in enumerate(self.points):
            if n < 5:
                raise ValueError(f"axis {a}: need at least 5 points, got {n}")
        for a, b in enumerate(self.boundary):
            if b not in (PERIODIC, ONE_SIDED):
                raise ValueError(f"axis {a}: boundary must be 'periodic' or 'one-sided', got {b!r}")
            # one-sided edge rows must fit in the axis
            if b == ONE_SIDED and self.points[a] < self.stencil_order + 2:
                raise ValueError(
                    f"axis {a}: one-sided order-{self.stencil_order} stencils need "
                    f">= {self.stencil_order + 2} points, got {self.points[a]}"
                )
        for a, g in enumerate(self.metric):
            if g == 0.0 or not math.isfinite(g):
                raise ValueError(f"axis {a}: metric entry must be finite and nonzero, got {g}")
        if self.metric[0] <= 0.0 or any(g >= 0.0 for g in self.metric[1:]):
            raise ValueError(
                f"metric {self.metric} is not Lorentzian with the positive entry on axis 0"
            )

    # -- geometry -----------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def spacing(self) -> tuple[float, ...]:
        out = []
        for (lo, hi), n, b in zip(self.extents, self.points, self.boundary):
            out.append((hi - lo) / n if b == PERIODIC else (hi - lo) / (n - 1))
        return tuple(out)

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @property
    def volume_weight(self) -> float:
        """sqrt(-det g) for the constant diagonal metric."""
        neg_det = -math.prod(self.metric)
        if neg_det <= 0.0:
            raise ValueError(f"metric {self.metric} has non-Lorentzian determinant")
        return math.sqrt(neg_det)

    def axis_coords(self, axis: int) -> np.ndarray:
        (lo, _), n, h = self.extents[axis], self.points[axis], self.spacing[axis]
        return lo + h * np.arange(n)

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of full grid shape, one per axis."""
        return tuple(np.meshgrid(*(self.axis_coords(a) for a in range(self.dim)), indexing="ij"))

    def refined(self, factor: int = 2) -> "SpacetimeGrid":
        """Same box and metric with `factor`-times finer spacing per axis."""
        if factor < 2:
            raise ValueError("refinement factor must be >= 2")
        pts = tuple(
            n * factor if b == PERIODIC else (n - 1) * factor + 1
            for n, b in zip(self.points, self.boundary)
        )
        return replace(self, points=pts)

    def with_order(self, order: int) -> "SpacetimeGrid":
        return replace(self, stencil_order=order)

    def interior_mask(self, depth: int | None = None) -> np.ndarray:
        """Boolean mask excluding `depth` layers at each one-sided edge.

        Edge rows of one-sided axes keep the declared order but carry larger
        error constants, so residual norms are taken on this mask.  Periodic
        axes are never masked.  Default depth is the stencil order.
        """
        d = self.stencil_order if depth is None else int(depth)
        mask = np.ones(self.shape, dtype=bool)
        for a, b in enumerate(self.boundary):
            if b == ONE_SIDED and d > 0:
                sl = [slice(None)] * self.dim
                sl[a] = slice(0, d)
                mask[tuple(sl)] = False
                sl[a] = slice(self.points[a] - d, self.points[a])
                mask[tuple(sl)] = False
        return mask

    # -- reductions ---------------------------------------------------------

    def quadrature_weights(self) -> np.ndarray:
        """Per-sample integration weight including sqrt(-g) dV.

        Periodic axes use uniform weights (the exact trapezoid rule on a
        circle); one-sided axes halve the two boundary planes so constants
        integrate to the exact box volume.
        """
        w = np.ones(self.shape)
        for a, b in enumerate(self.boundary):
            if b == ONE_SIDED:
                sl = [slice(None)] * self.dim
                sl[a] = 0
                w[tuple(sl)] *= 0.5
                sl[a] = self.points[a] - 1
                w[tuple(sl)] *= 0.5
        return w * (self.cell_volume * self.volume_weight)

    def integrate(self, values: np.ndarray) -> float:
        """Deterministic volume integral: fsum over C order of weighted samples."""
        if np.iscomplexobj(values):
            raise ValueError("integrate expects a real integrand")
        require_finite(values, "integrand")
        prod = np.asarray(values, dtype=float) * self.quadrature_weights()
        return math.fsum(prod.ravel(order="C"))

    def max_norm(self, values: np.ndarray, interior: bool = True) -> float:
        """Max absolute value, on the interior mask by default."""
        v = np.abs(np.asarray(values))
        if interior:
            m = self.interior_mask()
            v = v[m]
        return float(v.max()) if v.size else 0.0

    # -- derivatives --------------------------------------------------------

    def _axis_derivative(self, values: np.ndarray, axis: int, deriv: int) -> np.ndarray:
        offs, coefs = _CENTRAL[(deriv, self.stencil_order)]
        h = self.spacing[axis]
        scale = h**deriv
        if self.boundary[axis] == PERIODIC:
            acc = coefs[0] * np.roll(values, -offs[0], axis=axis)
            for o, c in zip(offs[1:], coefs[1:]):
                acc += c * np.roll(values, -o, axis=axis)
            return acc / scale

        v = np.moveaxis(values, axis, 0)
        n = v.shape[0]
        out = np.empty_like(v)
        half = self.stencil_order // 2
        acc = coefs[0] * v[half + offs[0] : n - half + offs[0]]
        for o, c in zip(offs[1:], coefs[1:]):
            acc = acc + c * v[half + o : n - half + o]
        out[half : n - half] = acc
        sign = (-1.0) ** deriv
        for row, eoffs, ecoefs in _EDGE[(deriv, self.stencil_order)]:
            left = sum(c * v[row + o] for o, c in zip(eoffs, ecoefs))
            right = sum(sign * c * v[n - 1 - row - o] for o, c in zip(eoffs, ecoefs))
            out[row] = left
            out[n - 1 - row] = right
        return np.moveaxis(out, 0, axis) / scale

    def partial(self, values: np.ndarray, axis: int) -> np.ndarray:
        """First partial derivative along one axis."""
        if values.shape != self.shape:
            raise ValueError(f"field shape {values.shape} does not match grid {self.shape}")
        require_finite(values, "field")
        return self._axis_derivative(values, axis, 1)

    def second_partial(self, values: np.ndarray, axis: int) -> np.ndarray:
        """Direct second difference along one axis (not a nested first difference)."""
        if values.shape != self.shape:
            raise ValueError(f"field shape {values.shape} does not match grid {self.shape}")
        require_finite(values, "field")
        return self._axis_derivative(values, axis, 2)


# -- fields -----------------------------------------------------------------


@dataclass(frozen=True)
class RealField:
    """Real scalar samples on a grid."""

    grid: SpacetimeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class ComplexScalarField:
    """Complex scalar samples on a grid."""

    grid: SpacetimeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)


COVARIANT = "covariant"
CONTRAVARIANT = "contravariant"


@dataclass(frozen=True)
class CovectorField:
    """One-index field; `variance` records whether the index is up or down.

    values has shape (dim,) + grid.shape; the component dtype may be real
    or complex.
    """

    grid: SpacetimeGrid
    values: np.ndarray
    variance: str = COVARIANT

    def __post_init__(self) -> None:
        v = np.asarray(self.values)
        if v.shape != (self.grid.dim,) + self.grid.shape:
            raise ValueError(
                f"values shape {v.shape} does not match (dim,)+grid {(self.grid.dim,) + self.grid.shape}"
            )
        if self.variance not in (COVARIANT, CONTRAVARIANT):
            raise ValueError(f"variance must be covariant or contravariant, got {self.variance!r}")
        object.__setattr__(self, "values", v)


ScalarField = RealField | ComplexScalarField


def _wrap_scalar(grid: SpacetimeGrid, values: np.ndarray) -> ScalarField:
    if np.iscomplexobj(values):
        return ComplexScalarField(grid, values)
    return RealField(grid, values)


def gradient(f: ScalarField) -> CovectorField:
    """Covariant gradient: plain partials per axis."""
    g = f.grid
    parts = np.stack([g.partial(f.values, a) for a in range(g.dim)])
    return CovectorField(g, parts, COVARIANT)


def raise_index(w: CovectorField) -> CovectorField:
    """a^mu = a_mu / g_mumu for the diagonal metric."""
    if w.variance != COVARIANT:
        raise ValueError("raise_index expects a covariant field")
    g = w.grid
    inv = np.array([1.0 / gm for gm in g.metric]).reshape((g.dim,) + (1,) * g.dim)
    return CovectorField(g, w.values * inv, CONTRAVARIANT)


def lower_index(w: CovectorField) -> CovectorField:
    """a_mu = g_mumu a^mu; exact inverse of raise_index."""
    if w.variance != CONTRAVARIANT:
        raise ValueError("lower_index expects a contravariant field")
    g = w.grid
    met = np.array(g.metric).reshape((g.dim,) + (1,) * g.dim)
    return CovectorField(g, w.values * met, COVARIANT)


def divergence(v: CovectorField) -> ScalarField:
    """nabla_mu v^mu = sum of partials of the contravariant components."""
    if v.variance != CONTRAVARIANT:
        raise ValueError("divergence expects a contravariant field")
    g = v.grid
    acc = g.partial(v.values[0], 0)
    for a in range(1, g.dim):
        acc = acc + g.partial(v.values[a], a)
    return _wrap_scalar(g, acc)


def dalembertian(f: ScalarField) -> ScalarField:
    """box f = sum_mu g^mumu d^2_mu f, using direct second differences."""
    g = f.grid
    acc = g.second_partial(f.values, 0) / g.metric[0]
    for a in range(1, g.dim):
        acc = acc + g.second_partial(f.values, a) / g.metric[a]
    return _wrap_scalar(g, acc)


def contract(grid: SpacetimeGrid, a_cov: np.ndarray, b_cov: np.ndarray) -> np.ndarray:
    """a_mu b^mu for two covariant component stacks: sum g^mumu a_mu b_mu."""
    acc = a_cov[0] * b_cov[0] / grid.metric[0]
    for m in range(1, grid.dim):
        acc = acc + a_cov[m] * b_cov[m] / grid.metric[m]
    return acc
