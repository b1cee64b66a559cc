"""Random smooth test fields with exact analytic derivatives.

A field is a low-order real Fourier series over the periodic box, so every
derivative of every order has a closed form.  Convergence and identity
studies difference the stencil route against these analytic values; the
two routes share no code.

ln(rho) is generated rather than rho itself, keeping rho strictly positive
with closed-form derivatives of sqrt(rho) = exp(L/2):

    d_mu sqrt(rho)  = (1/2) L_mu sqrt(rho)
    box sqrt(rho)   = sqrt(rho) [ (1/2) box L + (1/4) L_mu L^mu ]
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grid import RealField, SpacetimeGrid, contract


@dataclass(frozen=True)
class FourierSeries:
    """sum_j amp_j * cos(k_j . x + phase_j) over a periodic box.

    wavevectors holds angular wavenumbers, shape (terms, dim); on a grid
    whose axes are all periodic each k component is an integer multiple of
    2*pi/extent, so the series is grid-periodic.
    """

    wavevectors: np.ndarray
    amplitudes: np.ndarray
    phases: np.ndarray

    def _phase(self, meshes: tuple[np.ndarray, ...]) -> np.ndarray:
        # (terms, *grid) phase array
        acc = self.phases.reshape((-1,) + (1,) * meshes[0].ndim)
        for a, x in enumerate(meshes):
            acc = acc + self.wavevectors[:, a].reshape((-1,) + (1,) * x.ndim) * x
        return acc

    def value(self, grid: SpacetimeGrid) -> np.ndarray:
        th = self._phase(grid.meshes())
        return np.einsum("j,j...->...", self.amplitudes, np.cos(th))

    def grad(self, grid: SpacetimeGrid) -> np.ndarray:
        """Covariant components d_mu f, shape (dim, *grid)."""
        th = self._phase(grid.meshes())
        s = np.sin(th)
        return np.stack(
            [
                -np.einsum("j,j...->...", self.amplitudes * self.wavevectors[:, a], s)
                for a in range(grid.dim)
            ]
        )

    def second(self, grid: SpacetimeGrid, axis: int) -> np.ndarray:
        th = self._phase(grid.meshes())
        ka = self.wavevectors[:, axis]
        return -np.einsum("j,j...->...", self.amplitudes * ka * ka, np.cos(th))

    def box(self, grid: SpacetimeGrid) -> np.ndarray:
        acc = self.second(grid, 0) / grid.metric[0]
        for a in range(1, grid.dim):
            acc = acc + self.second(grid, a) / grid.metric[a]
        return acc

    def grad_box(self, grid: SpacetimeGrid) -> np.ndarray:
        """d_mu box f, shape (dim, *grid); needs third derivatives."""
        th = self._phase(grid.meshes())
        s = np.sin(th)
        ksq = np.zeros(self.amplitudes.shape)
        for a in range(grid.dim):
            ksq = ksq + self.wavevectors[:, a] ** 2 / grid.metric[a]
        return np.stack(
            [
                np.einsum("j,j...->...", self.amplitudes * ksq * self.wavevectors[:, a], s)
                for a in range(grid.dim)
            ]
        )


def random_series(
    rng: np.random.Generator,
    grid: SpacetimeGrid,
    amplitude: float,
    max_mode: int = 2,
    terms: int = 4,
) -> FourierSeries:
    """Random series with integer modes <= max_mode per axis, grid-periodic."""
    base = np.array([2 * np.pi / (hi - lo) for lo, hi in grid.extents])
    modes = rng.integers(-max_mode, max_mode + 1, size=(terms, grid.dim))
    # avoid the constant term collapsing a slot
    for j in range(terms):
        if not modes[j].any():
            modes[j, rng.integers(grid.dim)] = 1
    amps = amplitude * rng.uniform(0.3, 1.0, size=terms) / terms
    phases = rng.uniform(0.0, 2 * np.pi, size=terms)
    return FourierSeries(modes * base, amps, phases)


@dataclass(frozen=True)
class DerivPack:
    """Closed-form derivatives of a manufactured state; entries may be None.

    Evaluators that accept a pack use these instead of stencils, so a run
    can be differenced against the same run in stencil mode.  Covariant
    component stacks have shape (dim, *grid).
    """

    dS: np.ndarray | None = None
    boxS: np.ndarray | None = None
    dlnrho: np.ndarray | None = None
    boxlnrho: np.ndarray | None = None
    dsqrt_rho: np.ndarray | None = None
    box_sqrt_rho: np.ndarray | None = None
    qtilde: np.ndarray | None = None
    dqtilde: np.ndarray | None = None
    dphi: np.ndarray | None = None
    boxphi: np.ndarray | None = None
    dlam: np.ndarray | None = None
    boxlam: np.ndarray | None = None

    def with_lambda(self, dlam: np.ndarray, boxlam: np.ndarray) -> "DerivPack":
        return replace(self, dlam=dlam, boxlam=boxlam)


@dataclass(frozen=True)
class ManufacturedState:
    """A random smooth polar pair (rho, S) plus its closed-form derivatives."""

    grid: SpacetimeGrid
    rho: RealField
    S: RealField
    derivs: DerivPack
    lnrho_series: FourierSeries
    S_series: FourierSeries


def manufactured_state(
    seed: int,
    grid: SpacetimeGrid,
    hbar: float = 1.0,
    amp_lnrho: float = 0.4,
    amp_S: float = 0.6,
    max_mode: int = 2,
) -> ManufacturedState:
    """Deterministic-in-seed random state; requires an all-periodic box for
    the series to close, though the fields evaluate on any grid."""
    rng = np.random.default_rng(seed)
    Ls = random_series(rng, grid, amp_lnrho, max_mode=max_mode)
    Ss = random_series(rng, grid, amp_S * hbar, max_mode=max_mode)

    L = Ls.value(grid)
    dL = Ls.grad(grid)
    boxL = Ls.box(grid)
    sqrt_rho = np.exp(0.5 * L)
    rho = sqrt_rho**2

    dLdL = contract(grid, dL, dL)
    dsqrt_rho = 0.5 * dL * sqrt_rho
    box_sqrt_rho = sqrt_rho * (0.5 * boxL + 0.25 * dLdL)
    qtilde = 0.5 * boxL + 0.25 * dLdL

    # d_mu qtilde = (1/2) d_mu box L + (1/2) L^nu d_mu L_nu ; the second term
    # contracts the Hessian of L, assembled per axis from series seconds.
    dqtilde = 0.5 * Ls.grad_box(grid)
    upper_dL = np.stack([dL[a] / grid.metric[a] for a in range(grid.dim)])
    hess_rows = _hessian_rows(Ls, grid)
    for mu in range(grid.dim):
        dqtilde[mu] = dqtilde[mu] + 0.5 * np.einsum("n...,n...->...", upper_dL, hess_rows[mu])

    S = Ss.value(grid)
    dS = Ss.grad(grid)
    boxS = Ss.box(grid)

    pack = DerivPack(
        dS=dS,
        boxS=boxS,
        dlnrho=dL,
        boxlnrho=boxL,
        dsqrt_rho=dsqrt_rho,
        box_sqrt_rho=box_sqrt_rho,
        qtilde=qtilde,
        dqtilde=dqtilde,
    )
    return ManufacturedState(
        grid=grid,
        rho=RealField(grid, rho),
        S=RealField(grid, S),
        derivs=pack,
        lnrho_series=Ls,
        S_series=Ss,
    )


def _hessian_rows(series: FourierSeries, grid: SpacetimeGrid) -> np.ndarray:
    """d_mu d_nu f as (mu, nu, *grid)."""
    th = series._phase(grid.meshes())
    c = np.cos(th)
    out = np.empty((grid.dim, grid.dim) + grid.shape)
    for mu in range(grid.dim):
        for nu in range(grid.dim):
            kk = series.wavevectors[:, mu] * series.wavevectors[:, nu]
            out[mu, nu] = -np.einsum("j,j...->...", series.amplitudes * kk, c)
    return out


def manufactured_lambda(
    seed: int,
    grid: SpacetimeGrid,
    amplitude: float = 0.5,
    offset: float = 1.0,
    max_mode: int = 2,
) -> tuple[RealField, FourierSeries, np.ndarray, np.ndarray]:
    """Random smooth multiplier field: offset + Fourier series.

    Returns (field, series, dlam, boxlam); the constant offset keeps the
    field away from zero without affecting derivatives.
    """
    rng = np.random.default_rng(seed)
    series = random_series(rng, grid, amplitude, max_mode=max_mode)
    lam = offset + series.value(grid)
    return RealField(grid, lam), series, series.grad(grid), series.box(grid)


def analytic_dphi(state: ManufacturedState, hbar: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form (d_mu phi, box phi) for phi = sqrt(rho) exp(iS/hbar)."""
    g = state.grid
    d = state.derivs
    sqrt_rho = np.sqrt(state.rho.values)
    phase = np.exp(1j * state.S.values / hbar)
    dphi = (d.dsqrt_rho + (1j / hbar) * d.dS * sqrt_rho) * phase
    dS_up_dsr = contract(g, d.dS, d.dsqrt_rho)
    dSdS = contract(g, d.dS, d.dS)
    boxphi = phase * (
        d.box_sqrt_rho
        + (2j / hbar) * dS_up_dsr
        + (1j / hbar) * d.boxS * sqrt_rho
        - dSdS * sqrt_rho / hbar**2
    )
    return dphi, boxphi


def state_with_phi_derivs(state: ManufacturedState, hbar: float) -> ManufacturedState:
    dphi, boxphi = analytic_dphi(state, hbar)
    return replace(state, derivs=replace(state.derivs, dphi=dphi, boxphi=boxphi))


def box_lambda_over_sqrt_rho(
    state: ManufacturedState,
    lam_values: np.ndarray,
    dlam: np.ndarray,
    boxlam: np.ndarray,
) -> np.ndarray:
    """Closed-form box(lambda / sqrt(rho)) for manufactured rho and lambda.

    With f = exp(-L/2) = 1/sqrt(rho):
        box(lam f) = f [ box lam - dlam . dL - lam ( box L / 2 - dL . dL / 4 ) ]
    where dots contract one raised index.
    """
    g = state.grid
    d = state.derivs
    f = 1.0 / np.sqrt(state.rho.values)
    cross = contract(g, dlam, d.dlnrho)
    dLdL = contract(g, d.dlnrho, d.dlnrho)
    return f * (boxlam - cross - lam_values * (0.5 * d.boxlnrho - 0.25 * dLdL))
