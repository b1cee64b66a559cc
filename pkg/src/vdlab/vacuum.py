"""The vacuum-density constraint, its static 1D solver and the mass it induces.

The multiplier field lambda obeys a linear homogeneous first-order
constraint tying it to the drift of sqrt(rho).  In a static 1D geometry it
becomes an explicit ODE,

    lambda'(x) = -lambda [ (m^2/hbar^2)(1 - Q) s_x + u'(x) ] / u(x) ,

with u = d_x sqrt(rho)/sqrt(rho) the covariant drift component and
s_x = -1 the sign picked up raising the spatial index under (+,-).  The
equation is genuinely singular where u = 0 or Q = 1; solutions exist on
maximal singularity-free intervals and the solver refuses to cross a
singular band rather than smooth over it.

The induced mass-squared field has two written forms, kept side by side:

    closed form:     m2 = m (1 - Q) lambda / rho - (hbar^2 / 2 m rho) box lambda
    conformal form:  m2 = [ m (1 - Q) lambda - (hbar^2 / 2 m) box lambda ] / (Omega^2 rho)

whose pointwise discrepancy is m2_closed (Omega^2 - 1) / Omega^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.ndimage import binary_erosion

from .fields import ConformalState, PolarDecomposition, drift_velocity
from .grid import CovectorField, RealField, divergence, dalembertian, gradient
from .manufactured import DerivPack

DELTA_U = 1e-6
DELTA_Q = 1e-6
SX = -1.0  # raised-index sign of the spatial axis under metric (+,-)


class SingularDomainError(ValueError):
    """The constraint's coefficient functions cross a singular band."""


@dataclass(frozen=True)
class SourceParams:
    """Anchor data the lambda field was generated from."""

    m: float
    hbar: float
    lam0: float
    x0: float


@dataclass(frozen=True)
class VacuumField:
    """Multiplier field on a grid with its validity mask and anchor data."""

    lam: RealField
    domain: np.ndarray | None
    source: SourceParams

    def __post_init__(self) -> None:
        if self.domain is not None and self.domain.shape != self.lam.grid.shape:
            raise ValueError("domain mask shape does not match grid")

    def mask(self) -> np.ndarray:
        if self.domain is None:
            return np.ones(self.lam.grid.shape, dtype=bool)
        return self.domain


@dataclass(frozen=True)
class VacuumMass:
    """Mass-squared field induced by the vacuum density.

    m2 may be negative; there M is imaginary and complex_flag marks the
    region.  branch chooses the sign of the real square root ('plus' for
    particles, 'minus' for antiparticles).
    """

    m2: RealField
    branch: str
    include_conformal: bool
    discrepancy: RealField
    domain: np.ndarray | None

    def __post_init__(self) -> None:
        if self.branch not in ("plus", "minus"):
            raise ValueError(f"branch must be 'plus' or 'minus', got {self.branch!r}")

    @property
    def complex_flag(self) -> np.ndarray:
        return self.m2.values < 0.0

    def mass_values(self) -> np.ndarray:
        """Signed root where real, i*sqrt(|m2|) where the flag is set."""
        sign = 1.0 if self.branch == "plus" else -1.0
        m2 = self.m2.values
        out = np.where(m2 >= 0.0, sign * np.sqrt(np.abs(m2)), 0.0).astype(complex)
        out = out + np.where(m2 < 0.0, 1j * np.sqrt(np.abs(m2)), 0.0)
        return out


# -- residual of the constraint on a grid -----------------------------------


def lambda_residual_field(
    v: VacuumField,
    p: PolarDecomposition,
    c: ConformalState,
    delta_q: float = DELTA_Q,
    derivs: DerivPack | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise lambda - (hbar^2/(m^2(1-Q))) nabla_mu(lambda u^mu), and mask.

    m and hbar come from the field's own source record.  Errors if the
    declared domain touches the Q = 1 band.
    """
    g = v.lam.grid
    mask = v.mask()
    if not mask.all():
        # shrink so divergence stencils never reach outside the domain,
        # where lambda is only zero-filled
        mask = binary_erosion(mask, iterations=g.stencil_order, border_value=1)
    mask = mask & g.interior_mask()
    one_minus_q = 1.0 - c.Q.values
    singular = mask & (np.abs(one_minus_q) < delta_q)
    if singular.any():
        locus = [tuple(int(i) for i in ix) for ix in np.argwhere(singular)[:4]]
        raise SingularDomainError(
            f"|1 - Q| < {delta_q:.1e} inside the declared domain at {locus}"
            f"{' (first 4 shown)' if singular.sum() > 4 else ''}"
        )
    u = drift_velocity(p, derivs=derivs)
    flux = CovectorField(g, v.lam.values * u.values, "contravariant")
    div = divergence(flux).values
    m, h = v.source.m, v.source.hbar
    res = v.lam.values - (h**2 / (m**2 * one_minus_q)) * div
    return res, mask


def lambda_residual(
    v: VacuumField,
    p: PolarDecomposition,
    c: ConformalState,
    delta_q: float = DELTA_Q,
    derivs: DerivPack | None = None,
) -> float:
    res, mask = lambda_residual_field(v, p, c, delta_q, derivs)
    return float(np.abs(res[mask]).max()) if mask.any() else 0.0


# -- static 1D density profiles ---------------------------------------------


class GaussianProfile:
    """sqrt(rho) = exp(-(x - center)^2 / (2 sigma^2)) with exact derivatives."""

    def __init__(self, sigma: float, center: float = 0.0):
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        self.sigma = float(sigma)
        self.center = float(center)

    def sqrt_rho(self, x):
        z = np.asarray(x, dtype=float) - self.center
        return np.exp(-(z**2) / (2.0 * self.sigma**2))

    def u(self, x):
        return -(np.asarray(x, dtype=float) - self.center) / self.sigma**2

    def du(self, x):
        return np.full_like(np.asarray(x, dtype=float), -1.0 / self.sigma**2)

    def d2u(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


class SplineProfile:
    """Cubic-spline density profile from grid samples of sqrt(rho).

    The constraint ODE is then defined by the interpolant, so the one-step
    integrator keeps its clean order against the interpolated coefficients.
    """

    def __init__(self, x: np.ndarray, sqrt_rho: np.ndarray):
        if len(x) < 4:
            raise ValueError("need at least 4 samples for a cubic profile")
        if np.any(sqrt_rho <= 0):
            raise ValueError("sqrt(rho) samples must be positive")
        self._s = CubicSpline(np.asarray(x, dtype=float), np.asarray(sqrt_rho, dtype=float))
        self._d1 = self._s.derivative(1)
        self._d2 = self._s.derivative(2)
        self._d3 = self._s.derivative(3)

    @classmethod
    def from_polar(cls, p: PolarDecomposition, axis: int = 1) -> "SplineProfile":
        g = p.grid
        rho = p.rho.values
        spread = np.abs(rho - rho[:1]).max()
        if spread > 1e-10 * max(np.abs(rho).max(), 1.0):
            raise ValueError("density is not static: time rows differ")
        return cls(g.axis_coords(axis), np.sqrt(rho[0]))

    def sqrt_rho(self, x):
        return self._s(x)

    def u(self, x):
        return self._d1(x) / self._s(x)

    def du(self, x):
        u = self.u(x)
        return self._d2(x) / self._s(x) - u**2

    def d2u(self, x):
        u = self.u(x)
        up = self.du(x)
        return self._d3(x) / self._s(x) - 3.0 * u * up - u**3


def _profile_coefficients(profile, m: float, hbar: float):
    """Closed-form pieces of the explicit ODE for one static profile."""

    def qtilde(x):
        return SX * (profile.du(x) + profile.u(x) ** 2)

    def Q(x):
        return (hbar / m) ** 2 * qtilde(x)

    def logslope(x):
        # lambda'/lambda = [ (m^2/hbar^2)(1 - Q) - v' ] / v, v = SX * u
        v = SX * profile.u(x)
        vp = SX * profile.du(x)
        return ((m / hbar) ** 2 * (1.0 - Q(x)) - vp) / v

    def logslope_prime(x):
        v = SX * profile.u(x)
        vp = SX * profile.du(x)
        vpp = SX * profile.d2u(x)
        w2p = profile.d2u(x) + 2.0 * profile.u(x) * profile.du(x)
        # d/dx of the numerator: -(m/hbar)^2 Q' - v'' with Q' = (hbar/m)^2 SX w2'
        numer_p = -SX * w2p - vpp
        return (numer_p - logslope(x) * vp) / v

    return qtilde, Q, logslope, logslope_prime


def _scan_singularities(
    profile,
    m: float,
    hbar: float,
    a: float,
    b: float,
    delta_u: float,
    delta_q: float,
    samples: int = 1024,
) -> None:
    xs = np.linspace(a, b, samples)
    _, Q, _, _ = _profile_coefficients(profile, m, hbar)

    def first_crossing(values: np.ndarray, delta: float) -> float | None:
        # a zero crossing shows up as a narrow band or a sign change between
        # consecutive samples; either one disqualifies the interval
        in_band = np.abs(values) < delta
        if in_band.any():
            return float(xs[in_band][0])
        flips = np.nonzero(np.sign(values[:-1]) != np.sign(values[1:]))[0]
        if flips.size:
            return float(0.5 * (xs[flips[0]] + xs[flips[0] + 1]))
        return None

    x_u = first_crossing(profile.u(xs), delta_u)
    if x_u is not None:
        raise SingularDomainError(
            f"drift u crosses zero inside [{a}, {b}] near x = {x_u:.6g}; "
            "split the domain at the singular locus"
        )
    x_q = first_crossing(1.0 - Q(xs), delta_q)
    if x_q is not None:
        raise SingularDomainError(
            f"Q crosses 1 inside [{a}, {b}] near x = {x_q:.6g}; "
            "split the domain at the singular locus"
        )


def _rk4_march(f: Callable[[float], float], y0: float, a: float, b: float, n: int) -> float:
    """Classic one-step fourth-order march for y' = f(x) * y from a to b."""
    h = (b - a) / n
    y = y0
    for k in range(n):
        x = a + k * h
        k1 = f(x) * y
        k2 = f(x + 0.5 * h) * (y + 0.5 * h * k1)
        k3 = f(x + 0.5 * h) * (y + 0.5 * h * k2)
        k4 = f(x + h) * (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


@dataclass(frozen=True)
class LambdaSolution1D:
    """Node values of lambda on a 1D mesh plus its ODE closure data."""

    x: np.ndarray
    lam: np.ndarray
    profile: object
    source: SourceParams
    substeps: int

    def lam_at(self, targets: Sequence[float]) -> np.ndarray:
        """March from the anchor to each target (exact nodes, no fitting)."""
        _, _, slope, _ = _profile_coefficients(self.profile, self.source.m, self.source.hbar)
        out = np.empty(len(targets))
        h_ref = (self.x[-1] - self.x[0]) / max(len(self.x) - 1, 1) / self.substeps
        for j, xt in enumerate(targets):
            span = abs(xt - self.source.x0)
            n = max(int(math.ceil(span / h_ref)), 1)
            out[j] = _rk4_march(slope, self.source.lam0, self.source.x0, float(xt), n)
        return out

    def second_derivative(self, targets: Sequence[float]) -> np.ndarray:
        """lambda'' = lambda (g^2 + g') with g the logarithmic slope."""
        _, _, slope, slope_p = _profile_coefficients(self.profile, self.source.m, self.source.hbar)
        lam = self.lam_at(targets)
        xs = np.asarray(targets, dtype=float)
        return lam * (slope(xs) ** 2 + slope_p(xs))


def integrate_lambda_1d(
    profile,
    m: float,
    hbar: float,
    lam0: float,
    x0: float,
    domain: tuple[float, float],
    mesh: np.ndarray,
    substeps: int = 8,
    delta_u: float = DELTA_U,
    delta_q: float = DELTA_Q,
) -> LambdaSolution1D:
    """March the constraint ODE across every mesh node inside the domain.

    The mesh nodes are hit exactly (substeps fourth-order steps per mesh
    interval), so no interpolation enters the returned samples.
    """
    a, b = float(domain[0]), float(domain[1])
    if not a < b:
        raise ValueError(f"domain ({a}, {b}) is not an increasing interval")
    if not (a <= x0 <= b):
        raise ValueError(f"anchor x0 = {x0} lies outside the domain ({a}, {b})")
    if m <= 0 or hbar <= 0:
        raise ValueError("m and hbar must be positive")
    _scan_singularities(profile, m, hbar, a, b, delta_u, delta_q)
    _, _, slope, _ = _profile_coefficients(profile, m, hbar)

    nodes = np.asarray(mesh, dtype=float)
    inside = (nodes >= a - 1e-12) & (nodes <= b + 1e-12)
    xs = nodes[inside]
    if xs.size < 2:
        raise ValueError("domain covers fewer than 2 mesh nodes")
    lam = np.empty_like(xs)
    # nearest node to the anchor, then march node to node both ways
    j0 = int(np.argmin(np.abs(xs - x0)))
    lam[j0] = _rk4_march(slope, lam0, x0, float(xs[j0]), substeps) if xs[j0] != x0 else lam0
    for j in range(j0 + 1, xs.size):
        lam[j] = _rk4_march(slope, lam[j - 1], float(xs[j - 1]), float(xs[j]), substeps)
    for j in range(j0 - 1, -1, -1):
        lam[j] = _rk4_march(slope, lam[j + 1], float(xs[j + 1]), float(xs[j]), substeps)
    return LambdaSolution1D(xs, lam, profile, SourceParams(m, hbar, lam0, x0), substeps)


def solve_lambda_static_1d(
    p: PolarDecomposition,
    m: float,
    hbar: float,
    lam0: float,
    x0: float,
    domain: tuple[float, float],
    profile=None,
    substeps: int = 8,
    delta_u: float = DELTA_U,
    delta_q: float = DELTA_Q,
) -> VacuumField:
    """Solve the static constraint along the spatial axis of a 1+1 grid.

    The density profile defaults to a cubic spline through the grid samples
    of sqrt(rho) (p must then be static); an analytic profile may be passed
    instead.  Returns lambda broadcast over the time axis, zero outside the
    domain, with the domain recorded as a mask.
    """
    g = p.grid
    if g.dim != 2:
        raise ValueError("the static solver works on 1+1 grids")
    if profile is None:
        profile = SplineProfile.from_polar(p)
    xs_all = g.axis_coords(1)
    sol = integrate_lambda_1d(
        profile, m, hbar, lam0, x0, domain, xs_all, substeps, delta_u, delta_q
    )
    inside = (xs_all >= domain[0] - 1e-12) & (xs_all <= domain[1] + 1e-12)
    line = np.zeros_like(xs_all)
    line[inside] = sol.lam
    lam2d = np.broadcast_to(line, g.shape).copy()
    mask2d = np.broadcast_to(inside, g.shape).copy()
    return VacuumField(RealField(g, lam2d), mask2d, sol.source)


# -- induced vacuum mass ----------------------------------------------------


def vacuum_mass(
    v: VacuumField,
    p: PolarDecomposition,
    c: ConformalState,
    include_conformal: bool,
    branch: str = "plus",
    derivs: DerivPack | None = None,
) -> VacuumMass:
    """Both written forms of m2; the requested one populates m2, the gap is
    kept as the discrepancy field (= m2_closed (Omega^2 - 1)/Omega^2)."""
    if p.mass <= 0:
        raise ValueError("vacuum_mass needs m > 0")
    g = p.grid
    m, h = p.mass, p.hbar
    if derivs is not None and derivs.boxlam is not None:
        boxlam = derivs.boxlam
    else:
        boxlam = dalembertian(v.lam).values
    one_minus_q = 1.0 - c.Q.values
    closed = m * one_minus_q * v.lam.values / p.rho.values - (h**2 / (2.0 * m)) * boxlam / p.rho.values
    conformal = (m * one_minus_q * v.lam.values - (h**2 / (2.0 * m)) * boxlam) / (
        c.omega2.values * p.rho.values
    )
    m2 = conformal if include_conformal else closed
    return VacuumMass(
        m2=RealField(g, m2),
        branch=branch,
        include_conformal=include_conformal,
        discrepancy=RealField(g, closed - conformal),
        domain=v.domain,
    )


def bracket_mass_squared(
    p: PolarDecomposition,
    c: ConformalState,
    lam: RealField,
    derivs: DerivPack | None = None,
) -> np.ndarray:
    """m2 read off the vacuum-coupled wave equation: -hbar^2 times its
    lambda bracket.  Independent route to the conformal form, used by the
    definitional-identity check."""
    from .kgops import general_kg_bracket

    return -(p.hbar**2) * general_kg_bracket(p, c, lam, derivs)


def mass_constancy_residual(vm: VacuumMass) -> tuple[float, bool]:
    """Max interior norm of the gradient of sqrt(m2) on the real sub-domain.

    Returns (residual, restricted): restricted is True when a complex
    region was excluded.  A diagnostic, not an enforced condition.
    """
    g = vm.m2.grid
    m2 = vm.m2.values
    real_mask = ~vm.complex_flag
    restricted = not bool(real_mask.all())
    # erode so stencils never touch the complex region
    eroded = real_mask.copy()
    depth = g.stencil_order // 2
    for a in range(g.dim):
        for shift in range(1, depth + 1):
            eroded &= np.roll(real_mask, shift, axis=a) & np.roll(real_mask, -shift, axis=a)
    mask = eroded & g.interior_mask()
    if vm.domain is not None:
        mask &= vm.domain
    if not mask.any():
        return 0.0, restricted
    sqrt_m2 = np.sqrt(np.where(real_mask, np.abs(m2), 0.0))
    grad = gradient(RealField(g, sqrt_m2)).values
    worst = max(float(np.abs(grad[a][mask]).max()) for a in range(g.dim))
    return worst, restricted


# -- the massless limit -----------------------------------------------------


@dataclass(frozen=True)
class NeutrinoRow:
    m: float
    m_probe: tuple[float, ...]  # signed magnitude: sign(m2) sqrt(|m2|)
    any_complex: bool
    failed: bool
    note: str = ""


@dataclass(frozen=True)
class ProbeVerdict:
    classification: str  # converging | diverging | zero | inconclusive
    extrapolated: float | None
    order_estimate: float | None
    uncertainty: float | None
    consistent_with_zero: bool | None


@dataclass(frozen=True)
class NeutrinoStudy:
    protocol: str
    probes: tuple[float, ...]
    rows: tuple[NeutrinoRow, ...]
    verdicts: tuple[ProbeVerdict, ...]

    @property
    def extrapolation_row(self) -> tuple[float, ...] | None:
        if all(v.classification in ("converging", "zero") for v in self.verdicts):
            return tuple(
                v.extrapolated if v.extrapolated is not None else 0.0 for v in self.verdicts
            )
        return None


def _signed_magnitude(m2: float) -> float:
    return math.copysign(math.sqrt(abs(m2)), m2)


def _classify(values: list[float], zero_tol: float) -> ProbeVerdict:
    v = np.asarray(values, dtype=float)
    if np.all(np.abs(v) <= zero_tol):
        return ProbeVerdict("zero", 0.0, None, 0.0, True)
    mags = np.abs(v)
    growth = mags[1:] / np.maximum(mags[:-1], 1e-300)
    if np.median(growth) >= 1.3:
        return ProbeVerdict("diverging", None, None, None, None)
    d = np.diff(v)
    if np.all(np.abs(d) <= zero_tol):
        est = float(v[-1])
        return ProbeVerdict("converging", est, None, 0.0, abs(est) <= zero_tol)
    shrink = np.abs(d[1:]) / np.maximum(np.abs(d[:-1]), 1e-300)
    if np.median(shrink) < 0.95:
        # M(m) ~ M0 + C m^q on a halving sequence: consecutive differences
        # shrink by 2^q and the tail sums to d_last / (2^q - 1).
        q = float(np.log2(np.abs(d[-2]) / max(np.abs(d[-1]), 1e-300)))
        est = float(v[-1] + d[-1] / (2.0**q - 1.0)) if q > 0.05 else float(v[-1])
        unc = float(abs(d[-1]) / max(2.0**q - 1.0, 1e-3) if q > 0.05 else abs(d[-1]))
        return ProbeVerdict("converging", est, q, unc, bool(abs(est) <= max(unc, zero_tol)))
    return ProbeVerdict("inconclusive", None, None, None, None)


def neutrino_limit_study(
    profile,
    protocol: str,
    m_sequence: Sequence[float],
    probes: Sequence[float],
    lam0: float,
    x0: float,
    domain: tuple[float, float],
    hbar: float = 1.0,
    substeps: int = 8,
    zero_tol: float = 1e-12,
    anchor_scaling: str = "fixed",
) -> NeutrinoStudy:
    """Probe the induced mass along a decreasing mass sequence.

    protocol:
      're-solved'  solve lambda afresh at each m;
      'fixed'      solve once at the first m, keep that lambda field while
                   m decreases (the leading-order 1/m balance);
      'zero'       lam0 = 0: the trivial branch, every probe exactly 0.
    anchor_scaling (re-solved only):
      'fixed'         anchor lam0 at every m; the induced mass then grows
                      like 1/sqrt(m) and the study reports divergence;
      'proportional'  anchor lam0 * m / m_sequence[0], using the
                      normalization freedom of the homogeneous constraint;
                      the probes then converge with residual O(m^2).
    The m -> 0 limit is only ever extrapolated, never evaluated at m = 0.
    """
    ms = [float(m) for m in m_sequence]
    if not all(a > b for a, b in zip(ms, ms[1:])) or ms[-1] <= 0:
        raise ValueError("m_sequence must be strictly decreasing and positive")
    if protocol not in ("re-solved", "fixed", "zero"):
        raise ValueError(f"unknown protocol {protocol!r}")
    if anchor_scaling not in ("fixed", "proportional"):
        raise ValueError(f"unknown anchor_scaling {anchor_scaling!r}")
    probes_t = tuple(float(x) for x in probes)
    xs = np.asarray(probes_t)

    qtilde_fn, _, _, _ = _profile_coefficients(profile, 1.0, 1.0)  # qtilde is m-free
    qt = qtilde_fn(xs)
    rho = profile.sqrt_rho(xs) ** 2

    fixed_sol: LambdaSolution1D | None = None
    rows: list[NeutrinoRow] = []
    for m in ms:
        if protocol == "zero":
            rows.append(NeutrinoRow(m, tuple(0.0 for _ in probes_t), False, False))
            continue
        try:
            if protocol == "re-solved" or fixed_sol is None:
                anchor = lam0
                if protocol == "re-solved" and anchor_scaling == "proportional":
                    anchor = lam0 * m / ms[0]
                mesh = np.linspace(domain[0], domain[1], 65)
                sol = integrate_lambda_1d(
                    profile, m, hbar, anchor, x0, domain, mesh, substeps
                )
                if protocol == "fixed":
                    fixed_sol = sol
            else:
                sol = fixed_sol
        except (SingularDomainError, ValueError) as exc:
            rows.append(NeutrinoRow(m, tuple(math.nan for _ in probes_t), False, True, str(exc)))
            continue
        lam = sol.lam_at(probes_t)
        lam_pp = sol.second_derivative(probes_t)
        Q = (hbar / m) ** 2 * qt
        box_lam = SX * lam_pp  # static: box = g^xx d^2/dx^2
        m2 = m * (1.0 - Q) * lam / rho - (hbar**2 / (2.0 * m)) * box_lam / rho
        rows.append(
            NeutrinoRow(
                m,
                tuple(_signed_magnitude(float(x)) for x in m2),
                bool(np.any(m2 < 0)),
                False,
            )
        )

    verdicts = []
    for k in range(len(probes_t)):
        series = [r.m_probe[k] for r in rows if not r.failed]
        if len(series) < 3:
            verdicts.append(ProbeVerdict("inconclusive", None, None, None, None))
        else:
            verdicts.append(_classify(series, zero_tol))
    return NeutrinoStudy(protocol, probes_t, tuple(rows), tuple(verdicts))
