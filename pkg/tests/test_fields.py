"""Polar representation, conformal factor, drift and phase identities.

Frozen oracle: the static Gaussian amplitude sqrt(rho) = exp(-x^2/(2 s^2))
has, under the (+,-) metric,

    qtilde(x) = 1/s^2 - x^2/s^4          (exact; at s=0.8, x=0.5: 0.9521484375)
    u_cov(x)  = -x/s^2                   (covariant drift component)
"""

from __future__ import annotations

import numpy as np
import pytest

from conftest import mixed_2d, periodic_2d, ratios
from vdlab.fields import (
    ConformalState,
    PolarDecomposition,
    check_density_floor,
    conformal_from_Q,
    drift_velocity,
    from_polar,
    phase_identity_residual,
    phase_winding,
    quantum_potential,
    to_polar,
)
from vdlab.grid import ONE_SIDED, ComplexScalarField, RealField, SpacetimeGrid
from vdlab.manufactured import manufactured_state, state_with_phi_derivs


def gaussian_polar(nx: int = 64, sigma: float = 0.8, half: float = 2.0) -> PolarDecomposition:
    # static profile on a one-sided spatial axis (it is not periodic)
    g = SpacetimeGrid(
        extents=((0.0, 1.0), (-half, half)),
        points=(9, nx),
        metric=(1.0, -1.0),
        boundary=(ONE_SIDED, ONE_SIDED),
    )
    _, x = g.meshes()
    rho = np.exp(-(x**2) / sigma**2)  # sqrt(rho) = exp(-x^2/(2 s^2))
    S = np.zeros(g.shape)
    return PolarDecomposition(RealField(g, rho), RealField(g, S), hbar=1.0, mass=1.0)


# -- polar round trip -------------------------------------------------------


def test_from_to_polar_roundtrip_smooth():
    g = periodic_2d(32)
    st = manufactured_state(1, g)
    p = PolarDecomposition(st.rho, st.S, hbar=0.7, mass=1.3)
    phi = from_polar(p)
    q = to_polar(phi, p.hbar, p.mass)
    assert np.allclose(q.rho.values, p.rho.values, rtol=1e-12)
    d = q.S.values - p.S.values
    # recovered S may differ by one global multiple of 2*pi*hbar
    shift = d.flat[0]
    assert np.allclose(d, shift, atol=1e-9)
    k = shift / (2 * np.pi * p.hbar)
    assert abs(k - round(k)) < 1e-9


def test_roundtrip_with_winding_phase():
    # S = hbar * k * x wraps k times around the periodic axis
    g = periodic_2d(32)
    _, x = g.meshes()
    hbar = 0.5
    S = hbar * 3.0 * x
    rho = np.ones(g.shape)
    p = PolarDecomposition(RealField(g, rho), RealField(g, S), hbar, 1.0)
    phi = from_polar(p)
    assert phase_winding(phi) == (0, 3)
    q = to_polar(phi, hbar, 1.0)
    d = q.S.values - S
    assert np.allclose(d, d.flat[0], atol=1e-10)


def test_negative_winding():
    g = periodic_2d(24)
    _, x = g.meshes()
    phi = ComplexScalarField(g, np.exp(-2j * x))
    assert phase_winding(phi) == (0, -2)


def test_to_polar_rejects_amplitude_node():
    g = periodic_2d(16)
    t, x = g.meshes()
    vals = (x - np.pi) + 1j * 0.0  # crosses zero
    with pytest.raises(ValueError, match="floor"):
        to_polar(ComplexScalarField(g, vals), 1.0, 1.0)


def test_density_floor_message_has_index():
    rho = np.ones((6, 6))
    rho[2, 4] = 0.0
    with pytest.raises(ValueError, match=r"\(2, 4\)"):
        check_density_floor(rho)


# -- conformal factor -------------------------------------------------------


def test_gaussian_qtilde_oracle():
    p = gaussian_polar(nx=129)
    c = quantum_potential(p)
    g = p.grid
    _, x = g.meshes()
    sigma = 0.8
    exact = 1.0 / sigma**2 - x**2 / sigma**4
    m = g.interior_mask()
    err = np.abs(c.qtilde.values - exact)[m].max()
    assert err < 2e-3
    # frozen spot value at x=0.5 (sigma=0.8)
    j = int(np.argmin(np.abs(g.axis_coords(1) - 0.5)))
    assert exact[0, j] == pytest.approx(0.9521484375)


def test_gaussian_qtilde_refinement():
    def err(nx: int) -> float:
        p = gaussian_polar(nx=nx)
        c = quantum_potential(p)
        g = p.grid
        _, x = g.meshes()
        exact = 1.0 / 0.8**2 - x**2 / 0.8**4
        return g.max_norm(c.qtilde.values - exact)

    errs = [err(n) for n in (33, 65, 129)]
    for r in ratios(errs):
        assert 3.4 <= r <= 4.6, errs


def test_quantum_potential_scaling_and_omega():
    p = gaussian_polar(nx=65)
    c1 = quantum_potential(p)
    p2 = PolarDecomposition(p.rho, p.S, hbar=2.0, mass=4.0)
    c2 = quantum_potential(p2)
    # Q scales as (hbar/m)^2; qtilde does not change
    assert np.allclose(c2.qtilde.values, c1.qtilde.values)
    assert np.allclose(c2.Q.values, (2.0 / 4.0) ** 2 / (1.0 / 1.0) ** 2 * c1.Q.values)
    assert np.allclose(c1.omega2.values, np.exp(c1.Q.values), rtol=0, atol=0)


def test_quantum_potential_needs_mass():
    p = gaussian_polar()
    massless = PolarDecomposition(p.rho, p.S, p.hbar, 0.0)
    with pytest.raises(ValueError, match="mass"):
        quantum_potential(massless)


def test_overflow_guard():
    g = periodic_2d(16)
    p = gaussian_polar()
    tiny = PolarDecomposition(p.rho, p.S, hbar=1.0, mass=1e-4)
    with pytest.raises(ValueError, match="overflow"):
        quantum_potential(tiny)


def test_conformal_from_Q_consistency():
    g = periodic_2d(8)
    Q = 0.3 * np.ones(g.shape)
    c = conformal_from_Q(g, Q, hbar=2.0, mass=1.0)
    assert np.allclose(c.omega2.values, np.exp(0.3))
    assert np.allclose(c.qtilde.values, 0.3 / 4.0)


# -- drift ------------------------------------------------------------------


def test_gaussian_drift_components():
    p = gaussian_polar(nx=129)
    u = drift_velocity(p)
    g = p.grid
    _, x = g.meshes()
    sigma = 0.8
    # covariant component -x/s^2; contravariant flips sign under g_xx = -1
    expect_up = x / sigma**2
    m = g.interior_mask()
    assert u.variance == "contravariant"
    assert np.abs((u.values[1] - expect_up)[m]).max() < 4e-3
    assert np.abs(u.values[0][m]).max() < 1e-12


def test_drift_analytic_pack_matches_stencil():
    g = periodic_2d(48)
    st = manufactured_state(3, g)
    p = PolarDecomposition(st.rho, st.S, 1.0, 1.0)
    u_stencil = drift_velocity(p)
    u_exact = drift_velocity(p, derivs=st.derivs)
    assert np.abs(u_stencil.values - u_exact.values).max() < 5e-3


# -- phase identity ---------------------------------------------------------


def test_phase_identity_analytic_mode_roundoff():
    g = periodic_2d(32)
    st = state_with_phi_derivs(manufactured_state(8, g), hbar=1.0)
    p = PolarDecomposition(st.rho, st.S, 1.0, 1.0)
    phi = from_polar(p)
    assert phase_identity_residual(phi, p, derivs=st.derivs) < 1e-12


def test_phase_identity_stencil_convergence():
    def err(n: int) -> float:
        g = periodic_2d(n)
        st = manufactured_state(8, g)
        p = PolarDecomposition(st.rho, st.S, 1.0, 1.0)
        return phase_identity_residual(from_polar(p), p)

    errs = [err(n) for n in (24, 48, 96)]
    for r in ratios(errs):
        assert 3.4 <= r <= 4.6, errs
