"""Gamma algebra, spinor fields and the vacuum-corrected Dirac residuals.

Spinor equations come in four sign variants: the rest-mass term enters with
-m (particle) or +m (antiparticle), the vacuum-mass term with -M or +M.
Three residual modes express the same content at different stages of
expansion and are kept as separate code paths:

    D-form:    i hbar gamma^mu (D_mu Psi)            + s_v M Psi
    expanded:  i hbar gamma^mu d_mu Psi - s_p gamma^mu (d_mu S) Psi + s_v M Psi
    assigned:  i hbar gamma^mu d_mu Psi + s_p m Psi  + s_v M Psi

with D_mu the phase-covariant derivative of the scalar sector.  The
`assigned` mode applies the substitution rule gamma^mu (d_mu S) -> -m I
(particles; +m I for antiparticles): no traceless gamma combination can
literally equal a multiple of the identity, but its square can, which is
what eikonal_identity_check asserts.

The paired row equation for Psi-bar = Psi^dagger gamma^0 mirrors each mode
with the gamma matrices acting from the right; flipping both variant signs
and conjugating maps one residual field onto the other.

Everything grid-level lives in 1+1D (2-component spinors); the 3+1D
representation is exercised through pointwise matrix identities only.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .fields import ConformalState, PolarDecomposition, quantum_potential
from .grid import ComplexScalarField, RealField, SpacetimeGrid, contract, require_finite
from .kgops import DSign, apply_D, box_D_field
from .manufactured import DerivPack
from .vacuum import VacuumMass

_SIGMA = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


@dataclass(frozen=True)
class GammaRepresentation:
    """A concrete set of gamma matrices with its signature.

    Construction verifies the Clifford relation and the hermiticity
    pattern exactly (all entries are integers or i times integers).
    """

    dim_label: str
    matrices: tuple[np.ndarray, ...]
    metric_diag: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.dim_label not in ("two", "four"):
            raise ValueError(f"dim_label must be 'two' or 'four', got {self.dim_label!r}")
        n = self.matrices[0].shape[0]
        if len(self.matrices) != len(self.metric_diag):
            raise ValueError("one matrix per spacetime axis required")
        eye = np.eye(n, dtype=complex)
        for mu, gm in enumerate(self.matrices):
            for nu, gn in enumerate(self.matrices):
                anti = gm @ gn + gn @ gm
                eta = 2.0 * self.metric_diag[mu] * eye if mu == nu else 0.0 * eye
                if not np.array_equal(anti, eta):
                    raise ValueError(f"Clifford relation fails for axes ({mu}, {nu})")
        if not np.array_equal(self.matrices[0].conj().T, self.matrices[0]):
            raise ValueError("timelike gamma must be hermitian")
        for k, gk in enumerate(self.matrices[1:], start=1):
            if not np.array_equal(gk.conj().T, -gk):
                raise ValueError(f"spacelike gamma {k} must be anti-hermitian")

    @property
    def n_components(self) -> int:
        return self.matrices[0].shape[0]

    def stacked(self) -> np.ndarray:
        return np.stack(self.matrices)


def build_gamma(dim: str) -> GammaRepresentation:
    """The 1+1D pair diag(1,-1), antidiag(1,-1) or the standard 3+1D set."""
    if dim == "two":
        g0 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
        g1 = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
        return GammaRepresentation("two", (g0, g1), (1.0, -1.0))
    if dim == "four":
        eye2 = np.eye(2, dtype=complex)
        zero2 = np.zeros((2, 2), dtype=complex)
        g0 = np.block([[eye2, zero2], [zero2, -eye2]])
        spatial = tuple(
            np.block([[zero2, s], [-s, zero2]]) for s in _SIGMA
        )
        return GammaRepresentation("four", (g0, *spatial), (1.0, -1.0, -1.0, -1.0))
    raise ValueError(f"dim must be 'two' or 'four', got {dim!r}")


@dataclass(frozen=True)
class SpinorField:
    """Complex spinor samples, components stacked on the leading axis."""

    grid: SpacetimeGrid
    values: np.ndarray
    rep: GammaRepresentation

    def __post_init__(self) -> None:
        expected = (self.rep.n_components, *self.grid.shape)
        if self.values.shape != expected:
            raise ValueError(
                f"spinor values must have shape {expected}, got {self.values.shape}"
            )
        require_finite(self.values, "spinor components")


@dataclass(frozen=True)
class DiracVariant:
    """One of the four sign combinations of rest and vacuum mass terms."""

    particle_sign: str
    vacuum_sign: str

    def __post_init__(self) -> None:
        if self.particle_sign not in ("particle", "antiparticle"):
            raise ValueError("particle_sign must be 'particle' or 'antiparticle'")
        if self.vacuum_sign not in ("plus", "minus"):
            raise ValueError("vacuum_sign must be 'plus' or 'minus'")

    @property
    def m_sign(self) -> float:
        return -1.0 if self.particle_sign == "particle" else 1.0

    @property
    def M_sign(self) -> float:
        return 1.0 if self.vacuum_sign == "plus" else -1.0

    def flipped(self) -> "DiracVariant":
        p = "antiparticle" if self.particle_sign == "particle" else "particle"
        v = "minus" if self.vacuum_sign == "plus" else "plus"
        return DiracVariant(p, v)


ALL_VARIANTS = tuple(
    DiracVariant(p, v) for p, v in product(("particle", "antiparticle"), ("plus", "minus"))
)
PRINCIPAL_VARIANT = DiracVariant("particle", "minus")

MODES = ("D-form", "expanded", "assigned")


class ComplexMassError(ValueError):
    """The vacuum mass is imaginary somewhere on the evaluation domain."""


def _vacuum_mass_values(
    vm: VacuumMass | None, grid: SpacetimeGrid, allow_complex: bool
) -> np.ndarray:
    if vm is None:
        return np.zeros(grid.shape)
    if vm.m2.grid is not grid and vm.m2.grid != grid:
        raise ValueError("vacuum mass lives on a different grid")
    flagged = vm.complex_flag
    if flagged.any() and not allow_complex:
        ix = tuple(int(i) for i in np.argwhere(flagged)[0])
        raise ComplexMassError(
            f"vacuum m2 < 0 at grid index {ix}; pass allow_complex=True for diagnostics"
        )
    if flagged.any():
        return np.sqrt(vm.m2.values.astype(complex))
    return np.sqrt(vm.m2.values)


def spinor_gradient(psi: SpinorField) -> np.ndarray:
    """Stencil d_mu of every component: shape (dim, N, *grid.shape)."""
    g = psi.grid
    return np.stack(
        [
            np.stack([g.partial(psi.values[i], a) for i in range(psi.rep.n_components)])
            for a in range(g.dim)
        ]
    )


def _check_rep_matches_grid(psi: SpinorField) -> None:
    signs = tuple(1.0 if m > 0 else -1.0 for m in psi.grid.metric)
    if signs != psi.rep.metric_diag:
        raise ValueError("gamma representation signature does not match the grid metric")


def _dS(p: PolarDecomposition, derivs: DerivPack | None) -> np.ndarray:
    if derivs is not None and derivs.dS is not None:
        return derivs.dS
    g = p.grid
    return np.stack([g.partial(p.S.values, a) for a in range(g.dim)])


def dirac_lhs(
    psi: SpinorField,
    p: PolarDecomposition,
    vm: VacuumMass | None,
    variant: DiracVariant,
    mode: str,
    derivs: DerivPack | None = None,
    allow_complex: bool = False,
) -> np.ndarray:
    """Left-hand side of the chosen spinor equation, shape (N, *grid.shape)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    _check_rep_matches_grid(psi)
    if psi.grid != p.grid:
        raise ValueError("spinor and polar state live on different grids")
    g = psi.grid
    hbar, m = p.hbar, p.mass
    gam = psi.rep.stacked()
    M = _vacuum_mass_values(vm, g, allow_complex)
    vac = variant.M_sign * M * psi.values

    if mode == "D-form":
        # route through the scalar sector's phase-covariant derivative
        sign = DSign.MINUS if variant.particle_sign == "particle" else DSign.PLUS
        dcomp = np.stack(
            [
                np.stack(
                    [
                        apply_D(
                            ComplexScalarField(g, psi.values[i]), p, sign, derivs=derivs
                        ).values[a]
                        for i in range(psi.rep.n_components)
                    ]
                )
                for a in range(g.dim)
            ]
        )
        return 1j * hbar * np.einsum("aij,aj...->i...", gam, dcomp) + vac

    dpsi = spinor_gradient(psi)
    kinetic = 1j * hbar * np.einsum("aij,aj...->i...", gam, dpsi)
    if mode == "assigned":
        return kinetic + variant.m_sign * m * psi.values + vac
    dS = _dS(p, derivs)
    phase = np.einsum("aij,a...,j...->i...", gam, dS, psi.values)
    return kinetic - variant.m_sign * phase + vac


def dirac_residual(
    psi: SpinorField,
    p: PolarDecomposition,
    vm: VacuumMass | None,
    variant: DiracVariant,
    mode: str,
    derivs: DerivPack | None = None,
    allow_complex: bool = False,
) -> float:
    lhs = dirac_lhs(psi, p, vm, variant, mode, derivs, allow_complex)
    g = psi.grid
    return max(g.max_norm(lhs[i]) for i in range(psi.rep.n_components))


def bar(psi: SpinorField) -> np.ndarray:
    """Row spinor Psi-bar = Psi^dagger gamma^0, shape (N, *grid.shape)."""
    g0 = psi.rep.matrices[0]
    return np.einsum("i...,ij->j...", psi.values.conj(), g0)


def adjoint_dirac_lhs(
    psi: SpinorField,
    p: PolarDecomposition,
    vm: VacuumMass | None,
    variant: DiracVariant,
    mode: str,
    derivs: DerivPack | None = None,
    allow_complex: bool = False,
) -> np.ndarray:
    """Row-equation left-hand side for Psi-bar, gammas acting from the right.

    Mirrors dirac_lhs mode by mode; the phase-covariant derivative carries
    the conjugated phase sign.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    _check_rep_matches_grid(psi)
    g = psi.grid
    hbar, m = p.hbar, p.mass
    gam = psi.rep.stacked()
    M = _vacuum_mass_values(vm, g, allow_complex)
    pb = bar(psi)
    vac = variant.M_sign * M * pb

    dpb = np.stack(
        [
            np.stack([g.partial(pb[i], a) for i in range(psi.rep.n_components)])
            for a in range(g.dim)
        ]
    )
    if mode == "D-form":
        dS = _dS(p, derivs)
        dcomp = dpb + variant.m_sign * (1j / hbar) * np.einsum("a...,i...->ai...", dS, pb)
        return 1j * hbar * np.einsum("ai...,aij->j...", dcomp, gam) + vac
    kinetic = 1j * hbar * np.einsum("ai...,aij->j...", dpb, gam)
    if mode == "assigned":
        return kinetic + variant.m_sign * m * pb + vac
    dS = _dS(p, derivs)
    phase = np.einsum("a...,i...,aij->j...", dS, pb, gam)
    return kinetic - variant.m_sign * phase + vac


def adjoint_dirac_residual(
    psi: SpinorField,
    p: PolarDecomposition,
    vm: VacuumMass | None,
    variant: DiracVariant,
    mode: str,
    derivs: DerivPack | None = None,
    allow_complex: bool = False,
) -> float:
    lhs = adjoint_dirac_lhs(psi, p, vm, variant, mode, derivs, allow_complex)
    g = psi.grid
    return max(g.max_norm(lhs[i]) for i in range(psi.rep.n_components))


# -- operator squaring ------------------------------------------------------


def square_dirac_field(
    psi: SpinorField,
    p: PolarDecomposition,
    derivs: DerivPack | None = None,
) -> np.ndarray:
    """(i hbar gamma D)^2 Psi + hbar^2 (D_mu D^mu) Psi, componentwise.

    The first application is nested literally (stencil derivatives of the
    once-applied field); the scalar D_mu D^mu uses the expanded product
    form.  On flat grids the two must agree to stencil order.
    """
    _check_rep_matches_grid(psi)
    g = psi.grid
    hbar = p.hbar
    gam = psi.rep.stacked()

    def once(values: np.ndarray) -> np.ndarray:
        dcomp = np.stack(
            [
                np.stack(
                    [
                        apply_D(
                            ComplexScalarField(g, values[i]), p, DSign.MINUS, derivs=derivs
                        ).values[a]
                        for i in range(psi.rep.n_components)
                    ]
                )
                for a in range(g.dim)
            ]
        )
        return 1j * hbar * np.einsum("aij,aj...->i...", gam, dcomp)

    squared = once(once(psi.values))
    box_d = np.stack(
        [
            box_D_field(ComplexScalarField(g, psi.values[i]), p, derivs=derivs)
            for i in range(psi.rep.n_components)
        ]
    )
    return squared + hbar**2 * box_d


def square_dirac_check(
    psi: SpinorField, p: PolarDecomposition, derivs: DerivPack | None = None
) -> float:
    res = square_dirac_field(psi, p, derivs)
    g = psi.grid
    return max(g.max_norm(res[i]) for i in range(psi.rep.n_components))


# -- eikonal / mass-shell identities ----------------------------------------


def gamma_contraction_residual(rep: GammaRepresentation, a: np.ndarray) -> float:
    """Max-norm of (gamma^mu a_mu)^2 - (a_mu a^mu) I for covector samples a.

    a has shape (dim, ...); the contraction a_mu a^mu uses the
    representation's own signature.  An exact matrix identity.
    """
    slash = np.einsum("aij,a...->ij...", rep.stacked(), a)
    square = np.einsum("ij...,jk...->ik...", slash, slash)
    norm2 = np.einsum("a,a...,a...->...", np.array(rep.metric_diag), a, a)
    eye = np.eye(rep.n_components)
    residual = square - np.einsum("ij,...->ij...", eye, norm2)
    return float(np.abs(residual).max())


def eikonal_identity_check(
    p: PolarDecomposition,
    c: ConformalState | None = None,
    derivs: DerivPack | None = None,
    rep: GammaRepresentation | None = None,
) -> tuple[float, float]:
    """(contraction identity, mass-shell residual) for the phase gradient.

    The first number is the max-norm of (gamma^mu d_mu S)^2 - (dS.dS) I —
    zero to round-off for any S.  The second is the max interior norm of
    dS.dS - m^2 Omega^2, the mass-shell balance.  The literal assignment
    gamma^mu d_mu S = -m I is never asserted, only its square.
    """
    if p.mass <= 0:
        raise ValueError("eikonal check needs m > 0")
    g = p.grid
    if rep is None:
        rep = build_gamma("two" if g.dim == 2 else "four")
    if c is None:
        c = quantum_potential(p, derivs=derivs)
    dS = _dS(p, derivs)
    identity = gamma_contraction_residual(rep, dS)
    shell = contract(g, dS, dS) - p.mass**2 * c.omega2.values
    return identity, g.max_norm(shell)


# -- densities and plane waves ----------------------------------------------


def spinor_density(psi: SpinorField, tol: float = 1e-10) -> RealField:
    """rho = Psi-bar Psi pointwise; errors if an imaginary part survives.

    The bilinear is indefinite (the timelike gamma has both signs), so the
    output may be negative; callers inspect the sign pattern themselves.
    """
    raw = np.einsum("i...,i...->...", bar(psi), psi.values)
    scale = max(float(np.abs(raw).max()), 1.0)
    if np.abs(raw.imag).max() > tol * scale:
        raise ValueError("spinor density has a non-negligible imaginary part")
    return RealField(psi.grid, raw.real)


def momentum_space_operator(rep: GammaRepresentation, k: float, total_mass: float) -> np.ndarray:
    """gamma^0 (gamma^1 k + mass I): the 1+1D single-mode hamiltonian."""
    g0, g1 = rep.matrices[0], rep.matrices[1]
    eye = np.eye(rep.n_components, dtype=complex)
    return g0 @ (g1 * k + total_mass * eye)


def plane_wave_dispersion(k: float, m: float, M_const: float, rep: GammaRepresentation | None = None) -> float:
    """Positive branch E(k) of one Fourier mode with constant vacuum mass.

    Computed as the largest eigenvalue of the momentum-space operator, not
    from the closed form sqrt(k^2 + (m + M)^2).
    """
    if rep is None:
        rep = build_gamma("two")
    h = momentum_space_operator(rep, k, m + M_const)
    if not np.allclose(h, h.conj().T, rtol=0.0, atol=0.0):
        raise ValueError("momentum-space operator is not hermitian")
    return float(np.linalg.eigvalsh(h)[-1])


def free_spinor(
    grid: SpacetimeGrid,
    k: float,
    m: float,
    hbar: float = 1.0,
    rep: GammaRepresentation | None = None,
) -> tuple[SpinorField, PolarDecomposition]:
    """Positive-energy free plane wave: Psi = u exp(i (k x - E t)/hbar).

    u is the positive eigenvector of the momentum-space operator (a brute
    2x2 eigenproblem, no closed-form spinor).  Also returns the matching
    polar state (unit density, S = k x - E t) for D-form and eikonal use.
    """
    if rep is None:
        rep = build_gamma("two")
    h = momentum_space_operator(rep, k, m)
    evals, evecs = np.linalg.eigh(h)
    energy = float(evals[-1])
    u = evecs[:, -1]
    t, x = grid.meshes()
    phase = np.exp(1j * (k * x - energy * t) / hbar)
    values = np.einsum("i,...->i...", u, phase)
    psi = SpinorField(grid, values, rep)
    p = PolarDecomposition(
        RealField(grid, np.ones(grid.shape)),
        RealField(grid, k * x - energy * t),
        hbar,
        m,
    )
    return psi, p
