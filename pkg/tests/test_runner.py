"""Config parsing, report emission, the experiment runners, and the CLI."""

import json

import numpy as np
import pytest

from vdlab.cli import main
from vdlab.config import ConfigError, EXPERIMENTS, load_config
from vdlab.experiments import generate_manufactured_fields, run_experiment
from vdlab.grid import PERIODIC, SpacetimeGrid
from vdlab.kgops import shift_residual
from vdlab.reports import format_cell, render_csv, render_report_json, write_report

from conftest import periodic_2d, ratios


@pytest.fixture()
def base_ini(tmp_path):
    p = tmp_path / "lab.ini"
    p.write_text("[run]\nexperiment = dispersion-scan\nseed = 7\n")
    return str(p)


# -- manufactured-field factory ---------------------------------------------


def test_generate_fields_deterministic():
    g = periodic_2d(24)
    p1, k1 = generate_manufactured_fields(5, g)
    p2, k2 = generate_manufactured_fields(5, g)
    assert np.array_equal(p1.rho.values, p2.rho.values)
    assert np.array_equal(p1.S.values, p2.S.values)
    assert np.array_equal(k1.dS, k2.dS)


def test_generate_fields_seed_sensitivity():
    g = periodic_2d(24)
    p1, _ = generate_manufactured_fields(5, g)
    p2, _ = generate_manufactured_fields(6, g)
    assert not np.array_equal(p1.S.values, p2.S.values)


def test_generate_fields_zero_smoothness_is_constant():
    g = periodic_2d(24)
    p, pack = generate_manufactured_fields(5, g, smoothness=0.0)
    assert np.ptp(p.rho.values) == 0.0
    assert np.ptp(p.S.values) == 0.0
    assert np.abs(pack.dS).max() == 0.0


def test_generate_fields_pack_matches_stencils_at_order():
    errs = []
    for n in (24, 48, 96):
        p, pack = generate_manufactured_fields(9, periodic_2d(n))
        g = p.grid
        gap = max(
            g.max_norm(g.partial(p.S.values, a) - pack.dS[a]) for a in range(g.dim)
        )
        errs.append(gap)
    for r in ratios(errs):
        assert 3.4 <= r <= 4.6, errs
    p, pack = generate_manufactured_fields(9, periodic_2d(32))
    assert shift_residual(p, derivs=pack) < 1e-12


# -- configuration ----------------------------------------------------------


def test_config_defaults(base_ini):
    cfg = load_config(base_ini)
    assert cfg.experiment == "dispersion-scan"
    assert cfg.seed == 7
    assert cfg.grid.points == (32, 32)
    assert all(b == PERIODIC for b in cfg.grid.boundary)
    assert cfg.physics.domain == (1.0, 3.0)
    assert cfg.numerics.refine_levels == 3


def test_config_missing_experiment(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[run]\nseed = 1\n")
    with pytest.raises(ConfigError, match="config error at run.experiment: required"):
        load_config(str(p))


def test_config_unknown_experiment(base_ini):
    with pytest.raises(ConfigError, match="must be one of"):
        load_config(base_ini, ["run.experiment=warp-drive"])


def test_config_unknown_key(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[run]\nexperiment = dispersion-scan\nwarp = 9\n")
    with pytest.raises(ConfigError, match="config error at run.warp: unknown key"):
        load_config(str(p))


def test_config_unknown_section(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[run]\nexperiment = dispersion-scan\n[warp]\nfactor = 9\n")
    with pytest.raises(ConfigError, match="unknown section"):
        load_config(str(p))


def test_config_interval_and_list_parsing(tmp_path):
    p = tmp_path / "lab.ini"
    p.write_text(
        "[run]\nexperiment = neutrino-limit\n"
        "[physics]\ndomain = 1.5:2.5\nm_sequence = 0.4, 0.2, 0.1\nprobes = 2.0\n"
    )
    cfg = load_config(str(p))
    assert cfg.physics.domain == (1.5, 2.5)
    assert cfg.physics.m_sequence == (0.4, 0.2, 0.1)
    assert cfg.physics.probes == (2.0,)


def test_config_rejects_tiny_grid(base_ini):
    with pytest.raises(ConfigError, match="at least 5 points per axis"):
        load_config(base_ini, ["grid.points=3,3"])


def test_config_override_forms_rejected(base_ini):
    with pytest.raises(ConfigError, match="not of the form"):
        load_config(base_ini, ["run.experiment"])
    with pytest.raises(ConfigError, match="not of the form"):
        load_config(base_ini, ["experiment=x"])
    with pytest.raises(ConfigError, match="unknown section"):
        load_config(base_ini, ["warp.factor=2"])


def test_config_file_not_found():
    with pytest.raises(ConfigError, match="not found"):
        load_config("/nonexistent/lab.ini")


# -- report emission --------------------------------------------------------


def test_format_cell_precision_and_bools():
    assert format_cell(1.0 / 3.0) == "0.33333333333333331"
    assert format_cell(True) == "1"
    assert format_cell(False) == "0"
    assert format_cell(float("nan")) == "nan"
    assert format_cell("level") == "level"


def test_render_csv_layout():
    text = render_csv(("a", "b"), [(1.0, float("nan")), (0.5, 4.0)])
    lines = text.split("\n")
    assert lines[0] == "a,b"
    assert lines[1] == "1,nan"
    assert text.endswith("\n")


def test_report_json_is_sorted_and_nan_safe(base_ini, tmp_path):
    cfg = load_config(base_ini)
    report = run_experiment(cfg)
    report.diagnostics["edge_cases"] = [float("nan"), float("inf"), float("-inf")]
    text = render_report_json(report)
    payload = json.loads(text)
    assert payload["diagnostics"]["edge_cases"] == ["nan", "inf", "-inf"]
    assert list(payload) == sorted(payload)
    assert payload["manifest"]["seed"] == 7
    assert payload["manifest"]["timestamp"] is None


def test_report_timestamp_from_environment(base_ini, monkeypatch):
    monkeypatch.setenv("VDLAB_TIMESTAMP", "2024-01-01T00:00:00Z")
    cfg = load_config(base_ini)
    payload = json.loads(render_report_json(run_experiment(cfg)))
    assert payload["manifest"]["timestamp"] == "2024-01-01T00:00:00Z"


def test_write_report_emits_all_tables(base_ini, tmp_path):
    cfg = load_config(base_ini)
    report = run_experiment(cfg)
    path = write_report(report, tmp_path / "out")
    assert path.name == "report.json"
    for name in report.tables:
        assert (tmp_path / "out" / f"{name}.csv").is_file()


# -- experiment runners -----------------------------------------------------


@pytest.mark.parametrize("experiment", EXPERIMENTS)
def test_every_experiment_passes_on_defaults(base_ini, experiment):
    cfg = load_config(base_ini, [f"run.experiment={experiment}"])
    report = run_experiment(cfg)
    failed = [c.check_id for c in report.checks if not c.passed]
    assert report.all_passed, failed


def test_identity_suite_tables(base_ini):
    cfg = load_config(base_ini, ["run.experiment=identity-suite"])
    report = run_experiment(cfg)
    assert set(report.tables) == {
        "shift_convergence",
        "phase_convergence",
        "squaring_convergence",
    }
    header, rows = report.tables["shift_convergence"]
    assert header == ("level", "h", "residual", "ratio")
    assert len(rows) == cfg.numerics.refine_levels


def test_dispersion_rows_match_requested_scan(base_ini):
    cfg = load_config(base_ini, ["numerics.n_k=11", "physics.k_max=2.0"])
    report = run_experiment(cfg)
    _, rows = report.tables["dispersion"]
    assert len(rows) == 11
    assert rows[0][0] == -2.0 and rows[-1][0] == 2.0


def test_neutrino_zero_protocol_rows(base_ini):
    cfg = load_config(
        base_ini, ["run.experiment=neutrino-limit", "physics.protocol=zero"]
    )
    report = run_experiment(cfg)
    assert report.all_passed
    _, rows = report.tables["neutrino"]
    assert rows[-1][0] == 0.0 and rows[-1][-1] is True
    assert all(v == 0.0 for v in rows[-1][1:-1])


def test_neutrino_zero_anchor_extrapolates_to_zero(base_ini):
    cfg = load_config(
        base_ini, ["run.experiment=neutrino-limit", "physics.lam0=0.0"]
    )
    report = run_experiment(cfg)
    assert report.all_passed
    ids = [c.check_id for c in report.checks]
    assert "neutrino/zero-extrapolation" in ids


def test_neutrino_fixed_protocol_diverges_without_extrapolation_row(base_ini):
    cfg = load_config(
        base_ini,
        ["run.experiment=neutrino-limit", "physics.protocol=fixed"],
    )
    report = run_experiment(cfg)
    assert report.all_passed
    _, rows = report.tables["neutrino"]
    assert all(r[-1] is False for r in rows)  # no extrapolation row


def test_mass_landscape_diagnostics(base_ini):
    cfg = load_config(base_ini, ["run.experiment=mass-landscape"])
    report = run_experiment(cfg)
    assert report.all_passed
    assert "mass_constancy_residual" in report.diagnostics
    assert report.diagnostics["complex_fraction"] == 0.0
    header, rows = report.tables["mass_landscape"]
    assert header[0] == "x" and header[-1] == "complex_flag"
    assert len(rows) == cfg.grid.points[-1]


def test_action_gradient_requires_periodic_grid(base_ini):
    cfg = load_config(
        base_ini,
        ["run.experiment=action-gradient", "grid.boundary=one-sided, one-sided"],
    )
    with pytest.raises(ValueError, match="fully periodic"):
        run_experiment(cfg)


def test_lambda_profile_closed_form_check_only_at_unit_parameters(base_ini):
    cfg = load_config(
        base_ini, ["run.experiment=lambda-profile", "physics.sigma=1.2"]
    )
    report = run_experiment(cfg)
    assert report.all_passed
    assert "lambda-solver/closed-form" not in [c.check_id for c in report.checks]


# -- command line -----------------------------------------------------------


def test_cli_validate(base_ini, capsys):
    assert main(["validate", "--config", base_ini]) == 0
    assert "configuration ok: experiment=dispersion-scan" in capsys.readouterr().out


def test_cli_validate_bad_config(tmp_path, capsys):
    p = tmp_path / "bad.ini"
    p.write_text("[run]\nexperiment = dispersion-scan\nwarp = 1\n")
    assert main(["validate", "--config", str(p)]) == 1
    assert "unknown key" in capsys.readouterr().err


def test_cli_run_writes_report(base_ini, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", base_ini, "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "[PASS] dispersion/closed-form" in text
    assert (out / "report.json").is_file()
    assert (out / "dispersion.csv").is_file()


def test_cli_runs_are_byte_identical(base_ini, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert (
            main(
                ["run", "--config", base_ini, "--experiment", "lambda-profile",
                 "--out", str(out)]
            )
            == 0
        )
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    assert (a / "lambda_profile.csv").read_bytes() == (b / "lambda_profile.csv").read_bytes()


def test_cli_seed_flag_changes_report(base_ini, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out, seed in ((a, "7"), (b, "8")):
        main(["run", "--config", base_ini, "--experiment", "convergence-suite",
              "--out", str(out), "--seed", seed])
    assert (a / "report.json").read_bytes() != (b / "report.json").read_bytes()


def test_cli_env_out_overrides_flag(base_ini, tmp_path, monkeypatch):
    env_dir = tmp_path / "env"
    monkeypatch.setenv("VDLAB_OUT", str(env_dir))
    assert main(["run", "--config", base_ini, "--out", str(tmp_path / "flag")]) == 0
    assert (env_dir / "report.json").is_file()
    assert not (tmp_path / "flag").exists()


def test_cli_config_error_exits_one(base_ini, capsys):
    assert main(["run", "--config", base_ini, "--set", "grid.points=3,3"]) == 1
    assert "at least 5 points" in capsys.readouterr().err


def test_cli_missing_config_exits_one(capsys):
    assert main(["run", "--config", "/nonexistent/lab.ini"]) == 1
    assert "not found" in capsys.readouterr().err


def test_cli_singular_domain_exits_one(base_ini, tmp_path, capsys):
    rc = main(
        ["run", "--config", base_ini, "--experiment", "lambda-profile",
         "--out", str(tmp_path / "o"),
         "--set", "physics.domain=0.5:3.0", "--set", "physics.mass=0.6"]
    )
    assert rc == 1
    assert "Q crosses 1" in capsys.readouterr().err


def test_cli_check_failure_exits_two(base_ini, tmp_path, capsys):
    # a singular sub-domain inside the neutrino sweep is recorded per row,
    # so the run completes but its invariants fail
    rc = main(
        ["run", "--config", base_ini, "--experiment", "neutrino-limit",
         "--out", str(tmp_path / "o"),
         "--set", "physics.domain=0.5:3.0",
         "--set", "physics.anchor_scaling=proportional"]
    )
    assert rc == 2
    assert "[FAIL] neutrino/rows-complete" in capsys.readouterr().out
    assert (tmp_path / "o" / "report.json").is_file()


def test_cli_refine_levels_flag(base_ini, tmp_path):
    out = tmp_path / "o"
    main(["run", "--config", base_ini, "--experiment", "convergence-suite",
          "--out", str(out), "--refine-levels", "2"])
    text = (out / "convergence.csv").read_text()
    assert len(text.strip().split("\n")) == 3  # header + 2 levels
