"""Polar representation of a complex scalar and its conformal factor.

A state is stored as (rho, S) with phi = sqrt(rho) exp(iS/hbar).  The
conformal factor is built from the amplitude alone:

    qtilde = box sqrt(rho) / sqrt(rho)
    Q      = (hbar/m)^2 qtilde
    Omega^2 = exp(Q)

Reconstruction of S from phi uses nearest-multiple-of-2*pi continuation of
the principal phase, so S is defined up to one global additive 2*pi*hbar*k;
per-axis winding numbers on periodic axes are reported separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import (
    PERIODIC,
    ComplexScalarField,
    CovectorField,
    RealField,
    SpacetimeGrid,
    contract,
    dalembertian,
    gradient,
    require_finite,
)
from .manufactured import DerivPack

EPS_RHO = 1e-12
# exp overflows past ~709; refuse a bit earlier so Omega^4 also stays finite
MAX_Q = 170.0


@dataclass(frozen=True)
class PolarDecomposition:
    """Amplitude-squared and phase-action samples with their scales.

    rho must stay above the positivity floor; S is real and smooth on the
    grid scale for stencil derivatives to mean anything.
    """

    rho: RealField
    S: RealField
    hbar: float
    mass: float

    def __post_init__(self) -> None:
        if self.rho.grid is not self.S.grid and self.rho.grid != self.S.grid:
            raise ValueError("rho and S live on different grids")
        if not (self.hbar > 0.0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar}")
        if not (self.mass >= 0.0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be nonnegative and finite, got {self.mass}")
        require_finite(self.rho.values, "rho")
        require_finite(self.S.values, "S")
        check_density_floor(self.rho.values)

    @property
    def grid(self) -> SpacetimeGrid:
        return self.rho.grid


@dataclass(frozen=True)
class ConformalState:
    """qtilde, Q and Omega^2 = exp(Q) as fields on one grid.

    Omega^2 is always exp(Q) by construction; whether Q equals
    (hbar/m)^2 box sqrt(rho)/sqrt(rho) of some particular density is up to
    the caller (constraint-relaxed states deliberately break that tie).
    """

    qtilde: RealField
    Q: RealField
    omega2: RealField

    @property
    def grid(self) -> SpacetimeGrid:
        return self.Q.grid


def check_density_floor(rho: np.ndarray, eps_rho: float = EPS_RHO) -> None:
    """Reject densities at or below the floor, naming the first offender."""
    bad = rho < eps_rho
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise ValueError(
            f"density ({rho[idx]:.3e}) below positivity floor {eps_rho:.1e} at index {idx}; "
            "the polar representation breaks down at amplitude nodes"
        )


def from_polar(p: PolarDecomposition) -> ComplexScalarField:
    """phi = sqrt(rho) exp(iS/hbar)."""
    phi = np.sqrt(p.rho.values) * np.exp(1j * p.S.values / p.hbar)
    return ComplexScalarField(p.grid, phi)


def _unwrap_nd(phase: np.ndarray) -> np.ndarray:
    """Unwrap along axis 0, anchored at the recursively unwrapped first slice."""
    if phase.ndim == 1:
        return np.unwrap(phase)
    out = np.unwrap(phase, axis=0)
    anchor = _unwrap_nd(phase[0])
    return out + (anchor - phase[0])


def to_polar(
    phi: ComplexScalarField, hbar: float, mass: float, eps_rho: float = EPS_RHO
) -> PolarDecomposition:
    """Recover (rho, S) from phi; S up to one global multiple of 2*pi*hbar.

    Fails on amplitude nodes (|phi|^2 below the floor): the phase is not
    continuable through a zero.
    """
    require_finite(phi.values.real, "Re phi")
    require_finite(phi.values.imag, "Im phi")
    rho = np.abs(phi.values) ** 2
    check_density_floor(rho, eps_rho)
    S = hbar * _unwrap_nd(np.angle(phi.values))
    return PolarDecomposition(RealField(phi.grid, rho), RealField(phi.grid, S), hbar, mass)


def phase_winding(phi: ComplexScalarField) -> tuple[int, ...]:
    """Integer winding of arg(phi) around each periodic axis (0 elsewhere).

    Computed from principal-value increments along the first grid line of
    the axis, closing the loop through the periodic wrap.
    """
    g = phi.grid
    out = []
    for a in range(g.dim):
        if g.boundary[a] != PERIODIC:
            out.append(0)
            continue
        index = [0] * g.dim
        index[a] = slice(None)
        line = np.angle(phi.values[tuple(index)])
        diffs = np.angle(np.exp(1j * (np.roll(line, -1) - line)))
        out.append(int(round(math.fsum(diffs) / (2 * np.pi))))
    return tuple(out)


def quantum_potential(p: PolarDecomposition, derivs: DerivPack | None = None) -> ConformalState:
    """Conformal data of a state: qtilde, Q = (hbar/m)^2 qtilde, Omega^2 = e^Q.

    Needs mass > 0; errors if Q would overflow the exponential.
    """
    if p.mass <= 0.0:
        raise ValueError("quantum_potential needs mass > 0 (the massless limit has no Q scale)")
    g = p.grid
    if derivs is not None and derivs.qtilde is not None:
        qtilde = np.array(derivs.qtilde, dtype=float)
    else:
        sqrt_rho = np.sqrt(p.rho.values)
        qtilde = dalembertian(RealField(g, sqrt_rho)).values / sqrt_rho
    Q = (p.hbar / p.mass) ** 2 * qtilde
    worst = float(np.abs(Q).max())
    if worst > MAX_Q:
        raise ValueError(
            f"|Q| reaches {worst:.3e}, past the overflow guard {MAX_Q}; "
            "the conformal factor exp(Q) is not representable"
        )
    return ConformalState(RealField(g, qtilde), RealField(g, Q), RealField(g, np.exp(Q)))


def conformal_from_Q(grid: SpacetimeGrid, Q: np.ndarray, hbar: float, mass: float) -> ConformalState:
    """Conformal state from an assigned Q field (e.g. constraint-relaxed)."""
    require_finite(Q, "Q")
    if mass <= 0.0:
        raise ValueError("mass must be positive")
    qtilde = (mass / hbar) ** 2 * Q
    return ConformalState(RealField(grid, qtilde), RealField(grid, np.array(Q, dtype=float)), RealField(grid, np.exp(Q)))


def drift_velocity(p: PolarDecomposition, derivs: DerivPack | None = None) -> CovectorField:
    """u^mu = (d^mu sqrt(rho)) / sqrt(rho), contravariant components."""
    g = p.grid
    sqrt_rho = np.sqrt(p.rho.values)
    if derivs is not None and derivs.dsqrt_rho is not None:
        cov = derivs.dsqrt_rho / sqrt_rho
    else:
        cov = gradient(RealField(g, sqrt_rho)).values / sqrt_rho
    up = np.stack([cov[a] / g.metric[a] for a in range(g.dim)])
    return CovectorField(g, up, "contravariant")


def phase_identity_field(
    phi: ComplexScalarField, p: PolarDecomposition, derivs: DerivPack | None = None
) -> np.ndarray:
    """(1/2)(d^mu phi/phi - d^mu phi*/phi*) - (i/hbar) d^mu S, contravariant.

    Identically zero in exact arithmetic for phi = sqrt(rho) e^{iS/hbar};
    the stencil version decays at the stencil order.
    """
    g = phi.grid
    check_density_floor(np.abs(phi.values) ** 2)
    if derivs is not None and derivs.dphi is not None:
        dphi = derivs.dphi
    else:
        dphi = gradient(phi).values
    if derivs is not None and derivs.dS is not None:
        dS = derivs.dS
    else:
        dS = gradient(p.S).values
    logd = dphi / phi.values
    lhs_cov = 0.5 * (logd - np.conj(logd))
    res_cov = lhs_cov - (1j / p.hbar) * dS
    return np.stack([res_cov[a] / g.metric[a] for a in range(g.dim)])


def phase_identity_residual(
    phi: ComplexScalarField, p: PolarDecomposition, derivs: DerivPack | None = None
) -> float:
    """Max norm of the phase-gradient identity over all components (interior)."""
    g = phi.grid
    res = phase_identity_field(phi, p, derivs)
    return max(g.max_norm(res[a]) for a in range(g.dim))


def dS_with_pack(p: PolarDecomposition, derivs: DerivPack | None) -> np.ndarray:
    """Covariant d_mu S, analytic when the pack carries it."""
    if derivs is not None and derivs.dS is not None:
        return derivs.dS
    return gradient(p.S).values


def mass_shell_gap(
    p: PolarDecomposition, c: ConformalState, derivs: DerivPack | None = None
) -> np.ndarray:
    """dS.dS - m^2 Omega^2, the leading (vacuum-free) dispersion content."""
    dS = dS_with_pack(p, derivs)
    return contract(p.grid, dS, dS) - p.mass**2 * c.omega2.values
