"""The acceptance gate: one test per top-level guarantee of the laboratory.

Every test prints exactly one [PASS]/[FAIL] line with the measured value
before asserting, so running this file with `pytest -s` reads as the
laboratory's acceptance report.  Tolerances here are the published
contract; the per-module suites probe the same machinery more finely.
"""

import numpy as np
import pytest

from vdlab.cli import main
from vdlab.dirac import (
    SpinorField,
    build_gamma,
    gamma_contraction_residual,
    plane_wave_dispersion,
    square_dirac_check,
)
from vdlab.fields import (
    PolarDecomposition,
    conformal_from_Q,
    from_polar,
    phase_identity_residual,
    quantum_potential,
)
from vdlab.grid import RealField
from vdlab.kgops import (
    ActionParams,
    action_gradient_check,
    box_D_field,
    general_kg_residual_field,
    kg_residual_polar,
    kg_residual_wave,
    shift_residual,
)
from vdlab.manufactured import manufactured_lambda
from vdlab.vacuum import (
    GaussianProfile,
    SourceParams,
    VacuumField,
    integrate_lambda_1d,
    vacuum_mass,
)
from vdlab.experiments import generate_manufactured_fields

from conftest import box_2d, periodic_2d, ratios
from test_kgops import E_PW, M_PW, P_PW, plane_wave_pack, plane_wave_polar

CORPUS_SEEDS = tuple(range(10))
LEVELS = (32, 64, 128)


def _verdict(name: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _phase_scale(p: PolarDecomposition) -> float:
    g = p.grid
    ds = max(float(np.abs(g.partial(p.S.values, a)).max()) for a in range(g.dim))
    return max(1.0, ds / p.hbar)


def test_shift_theorem_manufactured_corpus():
    worst_analytic, all_ratios = 0.0, []
    for seed in CORPUS_SEEDS:
        errs = []
        for n in LEVELS:
            p, pack = generate_manufactured_fields(seed, periodic_2d(n))
            if n == LEVELS[0]:
                worst_analytic = max(worst_analytic, shift_residual(p, derivs=pack))
            errs.append(shift_residual(p))
        all_ratios.extend(ratios(errs))
    ok = all(3.5 <= r <= 4.5 for r in all_ratios) and worst_analytic <= 1e-10
    _verdict(
        "shift theorem on 10-seed manufactured corpus",
        ok,
        f"refinement ratios [{min(all_ratios):.2f}, {max(all_ratios):.2f}] "
        f"target [3.5, 4.5]; analytic-pack residual {worst_analytic:.2e} <= 1e-10",
    )


def test_phase_gradient_identity_corpus():
    worst_analytic, all_ratios = 0.0, []
    for seed in CORPUS_SEEDS:
        errs = []
        for n in LEVELS:
            p, pack = generate_manufactured_fields(seed, periodic_2d(n))
            phi = from_polar(p)
            scale = _phase_scale(p)
            if n == LEVELS[0]:
                worst_analytic = max(
                    worst_analytic, phase_identity_residual(phi, p, derivs=pack) / scale
                )
            errs.append(phase_identity_residual(phi, p) / scale)
        all_ratios.extend(ratios(errs))
    ok = all(3.3 <= r <= 4.7 for r in all_ratios) and worst_analytic <= 1e-10
    _verdict(
        "density-side vs phase-side gradient identity on the same corpus",
        ok,
        f"second-order ratios [{min(all_ratios):.2f}, {max(all_ratios):.2f}]; "
        f"analytic-pack residual {worst_analytic:.2e} <= 1e-10",
    )


def test_plane_wave_anchors():
    p = plane_wave_polar(64)
    pack = plane_wave_pack(p)
    c = quantum_potential(p, derivs=pack)
    phi = from_polar(p)
    disp, cont = kg_residual_polar(p, c, derivs=pack)
    wave = kg_residual_wave(phi, p, c, derivs=pack)
    box = p.grid.max_norm(np.abs(box_D_field(phi, p, derivs=pack)))
    worst = max(disp, cont, wave, box)
    ok = worst <= 1e-8
    _verdict(
        "plane-wave anchor: polar, wave-form and covariant-operator residuals",
        ok,
        f"max residual {worst:.2e} <= 1e-8 "
        f"(dispersion {disp:.1e}, continuity {cont:.1e}, wave {wave:.1e}, D.D {box:.1e})",
    )


def test_action_stationarity():
    g = periodic_2d(32)
    p, pack = generate_manufactured_fields(0, g)
    x = g.meshes()[1]
    c = conformal_from_Q(g, pack.qtilde + 0.1 * np.sin(x), 1.0, 1.0)
    lam, _, _, _ = manufactured_lambda(40, g)
    a = ActionParams(kappa=1.0, hbar=1.0, mass=1.0)
    generic = action_gradient_check(g, p, c, lam, a, eps=1e-6, tol=1e-3, seed=0)
    worst_rel = max(e.rel_dev for e in generic.entries.values())

    gb = box_2d(33)
    pw = plane_wave_polar(33, boxed=True)
    cw = conformal_from_Q(gb, np.zeros(gb.shape), 1.0, M_PW)
    vanish = action_gradient_check(
        gb, pw, cw, None, ActionParams(kappa=1.0, hbar=1.0, mass=M_PW), eps=1e-6, seed=0
    )
    worst_fd = max(e.max_fd for e in vanish.entries.values())

    ok = generic.passed and worst_rel <= 1e-3 and vanish.passed and worst_fd <= 1e-6
    _verdict(
        "action stationarity: finite-difference vs assembled gradients",
        ok,
        f"relative deviation {worst_rel:.2e} <= 1e-3 at eps = 1e-6; "
        f"plane-wave gradients {worst_fd:.2e} <= 1e-6",
    )


def test_lambda_solver():
    prof, m, hbar, lam0, x0 = GaussianProfile(1.0), 1.0, 1.0, 0.75, 1.0
    domain = (1.0, 3.0)
    mesh = np.linspace(*domain, 41)
    exact = lam0 * (x0 / mesh) * np.exp((mesh**2 - x0**2) / 2.0)

    errs = []
    for sub in (2, 4, 8):
        sol = integrate_lambda_1d(prof, m, hbar, lam0, x0, domain, mesh, substeps=sub)
        errs.append(float(np.abs(sol.lam - exact).max() / np.abs(exact).max()))
    rs = ratios(errs)

    fwd = integrate_lambda_1d(prof, m, hbar, lam0, domain[0], domain, mesh)
    back = integrate_lambda_1d(prof, m, hbar, float(fwd.lam[-1]), domain[1], domain, mesh)
    closure = abs(float(back.lam[0]) - lam0) / lam0

    base = integrate_lambda_1d(prof, m, hbar, lam0, x0, domain, mesh)
    doubled = integrate_lambda_1d(prof, m, hbar, 2.0 * lam0, x0, domain, mesh)
    bitwise = bool(np.array_equal(doubled.lam, 2.0 * base.lam))

    ok = all(12.0 <= r <= 20.0 for r in rs) and closure <= 1e-8 and bitwise
    _verdict(
        "multiplier-field solver: fourth order, closure, homogeneity",
        ok,
        f"step-halving ratios [{min(rs):.1f}, {max(rs):.1f}] target [12, 20]; "
        f"forward-backward closure {closure:.2e} <= 1e-8; "
        f"anchor doubling {'bitwise exact' if bitwise else 'NOT exact'}",
    )


def test_vacuum_mass_definitional_identity():
    g = periodic_2d(48)
    p, pack = generate_manufactured_fields(3, g)
    c = quantum_potential(p, derivs=pack)
    lam, _, _, _ = manufactured_lambda(43, g)
    v = VacuumField(lam, None, SourceParams(1.0, 1.0, 1.0, 0.0))
    vm = vacuum_mass(v, p, c, include_conformal=True)
    phi = from_polar(p)
    lhs = box_D_field(phi, p) + (vm.m2.values / p.hbar**2) * phi.values
    rhs = general_kg_residual_field(phi, p, c, lam)
    scale = float(np.abs(rhs).max())
    rel = float(np.abs(lhs - rhs).max()) / scale

    v0 = VacuumField(RealField(g, np.zeros(g.shape)), None, SourceParams(1.0, 1.0, 0.0, 0.0))
    vm0 = vacuum_mass(v0, p, c, include_conformal=True)
    zero_exact = float(np.abs(vm0.m2.values).max()) == 0.0 and (
        float(np.abs(vm0.mass_values()).max()) == 0.0
    )

    ok = rel <= 1e-12 and zero_exact
    _verdict(
        "vacuum-mass definitional identity",
        ok,
        f"covariant operator plus (M^2/hbar^2) phi vs coupled-equation residual: "
        f"relative gap {rel:.2e} <= 1e-12; zero multiplier gives M = 0 "
        f"{'exactly' if zero_exact else 'INEXACTLY'}",
    )


def test_clifford_and_squaring():
    rng = np.random.default_rng(2024)
    worst_anti, worst_slash = 0.0, 0.0
    for rep in (build_gamma("two"), build_gamma("four")):
        eta = np.diag(rep.metric_diag).astype(complex)
        for mu, gmu in enumerate(rep.matrices):
            for nu, gnu in enumerate(rep.matrices):
                anti = gmu @ gnu + gnu @ gmu - 2.0 * eta[mu, nu] * np.eye(rep.n_components)
                worst_anti = max(worst_anti, float(np.abs(anti).max()))
        a = rng.standard_normal((len(rep.metric_diag), 100)) * 3.0
        scale = float((a**2).sum(axis=0).max())
        worst_slash = max(worst_slash, gamma_contraction_residual(rep, a) / scale)

    rep2 = build_gamma("two")
    errs = []
    for n in (33, 65, 129):
        g = box_2d(n)
        t, x = g.meshes()
        S = 0.6 * np.sin(2 * x + 0.3) * np.cos(t) + 0.2 * t
        p = PolarDecomposition(RealField(g, np.ones(g.shape)), RealField(g, S), 1.0, 1.0)
        vals = np.stack(
            [np.exp(1j * (1.5 * x - 0.7 * t)), 0.5 * np.exp(1j * (0.4 * x + 1.1 * t))]
        )
        errs.append(square_dirac_check(SpinorField(g, vals, rep2), p))
    rs = ratios(errs)

    ok = (
        worst_anti == 0.0
        and worst_slash <= 1e-13
        and all(3.3 <= r <= 4.7 for r in rs)
    )
    _verdict(
        "Clifford algebra and operator squaring",
        ok,
        f"anticommutator defect {worst_anti:.1e} (exact); slash-square on 100 "
        f"random covectors {worst_slash:.2e} <= 1e-13; squared-operator "
        f"ratios [{min(rs):.2f}, {max(rs):.2f}] second order",
    )


def test_dispersion_with_constant_vacuum_mass():
    worst = 0.0
    for m, M in ((1.3, 0.45), (0.0, 0.45)):
        for k in np.linspace(-4.0, 4.0, 50):
            e = plane_wave_dispersion(float(k), m, M)
            closed = float(np.sqrt(k**2 + (m + M) ** 2))
            worst = max(worst, abs(e - closed) / max(1.0, closed))
    ok = worst <= 1e-12
    _verdict(
        "constant-vacuum-mass dispersion",
        ok,
        f"eigenvalue vs sqrt(k^2 + (m+M)^2) over two 50-point scans "
        f"(massive and massless): max gap {worst:.2e} <= 1e-12",
    )


def test_report_determinism(tmp_path, capsys):
    ini = tmp_path / "lab.ini"
    ini.write_text("[run]\nexperiment = lambda-profile\nseed = 11\n")
    outs = []
    for tag in ("a", "b"):
        rc = main(["run", "--config", str(ini), "--out", str(tmp_path / tag)])
        assert rc == 0
        outs.append((tmp_path / tag / "report.json").read_bytes())
    capsys.readouterr()
    identical = outs[0] == outs[1]
    _verdict(
        "byte-identical reports for identical (config, seed)",
        identical,
        f"two runs, {len(outs[0])} bytes each, "
        f"{'identical' if identical else 'DIFFER'}",
    )
