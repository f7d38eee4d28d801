import csv
import io
import json

import numpy as np
import pytest

from nlsplit.convergence import (
    ExperimentConfig,
    fit_order,
    load_config,
    measure_error,
    projection_gap,
    reference_change,
    reference_solution,
    run_ladder,
)
from nlsplit.errors import ParameterError
from nlsplit.initial_data import plane_wave
from nlsplit.spectral import SpectralField, linear_flow, project_pi_tau, sobolev_norm

SMALL = ExperimentConfig(K=64, tau_max_exp=3, tau_min_exp=7, tau_ref_exp=11)


def test_config_defaults_and_ladder():
    cfg = ExperimentConfig()
    assert cfg.K == 1024 and cfg.T == 1 and cfg.mu == -1 and cfg.reference_scheme == "Strang"
    assert cfg.tau_ladder[0] == 2.0**-4 and cfg.tau_ladder[-1] == 2.0**-12 and len(cfg.tau_ladder) == 9
    assert cfg.tau_ref == 2.0**-16
    assert cfg.metadata()["rng"].startswith("numpy.random.PCG64")


@pytest.mark.parametrize(
    "kw",
    [{"mu": 0}, {"T": 0}, {"tau_ref_exp": 14}, {"tau_max_exp": 5, "tau_min_exp": 6}, {"schemes": ("Euler",)}],
)
def test_config_validation(kw):
    with pytest.raises(ParameterError):
        ExperimentConfig(**kw)


def test_load_config():
    cfg = load_config("# rough run\ns = 0.5\nK = 128   # modes\nschemes = FilteredLie, Strang\nmu=1\nmax_over_time = yes\n")
    assert cfg.K == 128 and cfg.mu == 1 and cfg.schemes == ("FilteredLie", "Strang") and cfg.max_over_time
    with pytest.raises(ParameterError):
        load_config("colour = blue\n")


def test_reference_plane_wave():
    k, mu = 3, -1
    f0 = plane_wave(k, 1, 64)
    u = reference_solution(SMALL, f0)
    exact = plane_wave(k, np.exp(1j * (mu - k * k) * SMALL.T), 64)
    assert sobolev_norm(u - exact) < 1e-8


def test_reference_at_time_zero():
    f0 = plane_wave(1, 1, 64)
    np.testing.assert_array_equal(reference_solution(SMALL, f0, T=0.0).coeffs, f0.coeffs)


def test_measure_error_examples(rng):
    c = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    f = SpectralField(c)
    low = project_pi_tau(f, 2.0**-4)
    assert measure_error(low, low, 2.0**-4) == 0
    zero = SpectralField.zeros(64)
    assert measure_error(f, zero, 2.0**-4) == sobolev_norm(low)
    g = SpectralField(rng.standard_normal(128) + 0j)
    t = 0.37
    a = measure_error(f, g, 2.0**-6)
    b = measure_error(linear_flow(f, t), linear_flow(g, t), 2.0**-6)
    assert abs(a - b) < 1e-13 * a
    with pytest.raises(ParameterError):
        measure_error(f, SpectralField.zeros(32), 0.1)


def test_fit_order_exact_lines():
    taus = [0.1, 0.01, 0.001]
    assert abs(fit_order([(t, t) for t in taus]).slope - 1) < 1e-12
    assert abs(fit_order([(t, t * t) for t in taus]).slope - 2) < 1e-12
    fit = fit_order([(t, 5.0) for t in taus])
    assert fit.degenerate and fit.flag == "degenerate: constant"
    with pytest.raises(ParameterError):
        fit_order([(0.1, 1.0), (0.01, 0.1)])
    with pytest.raises(ParameterError):
        fit_order([(0.1, 1.0), (0.01, 0.0), (0.001, 0.1)])


def test_fit_order_stderr_matches_formula(rng):
    taus = 2.0 ** -np.arange(3, 10)
    errs = taus**0.5 * np.exp(0.05 * rng.standard_normal(taus.size))
    fit = fit_order(list(zip(taus, errs)))
    x, y = np.log(taus), np.log(errs)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    sigma2 = res[0] / (x.size - 2)
    se = np.sqrt(sigma2 / np.sum((x - x.mean()) ** 2))
    assert abs(fit.slope - coef[0]) < 1e-12 and abs(fit.stderr - se) < 1e-12


def test_fit_order_trimming():
    taus = 2.0 ** -np.arange(3, 11)
    errs = taus**1.0
    errs[0] *= 0.05  # preasymptotic plateau at the largest steps
    errs[1] *= 0.3
    plain = fit_order(list(zip(taus, errs)))
    trimmed = fit_order(list(zip(taus, errs)), trim=True)
    assert trimmed.trimmed == 2 and abs(trimmed.slope - 1) < 1e-12
    assert abs(plain.slope - 1) > 0.05
    clean = fit_order(list(zip(taus, taus**2)), trim=True)
    assert clean.trimmed == 0


def test_ladder_hook_recovers_exponent():
    rep = run_ladder(SMALL, error_hook=lambda scheme, tau: 3.0 * tau**0.8, trim=False)
    for name in SMALL.schemes:
        assert abs(rep.slope(name) - 0.8) < 1e-10


def test_ladder_plane_wave_is_exact():
    rep = run_ladder(SMALL, f0=plane_wave(2, 1, 64))
    for r in rep.results.values():
        assert r.fit.flag == "degenerate: exact"
        assert max(r.errors) < 1e-10


@pytest.fixture(scope="module")
def small_report():
    return run_ladder(SMALL)


def test_ladder_rough_report(small_report):
    rep = small_report
    assert rep.gate_passed
    for name, r in rep.results.items():
        assert len(r.errors) == 5 and all(e > 0 for e in r.errors)
        # errors decrease along the ladder up to 10% inversions
        assert all(b <= 1.1 * a for a, b in zip(r.errors, r.errors[1:]))
        assert 0 < r.fit.slope < 1


def test_report_serialization(small_report):
    d = json.loads(small_report.to_json())
    assert d["metadata"]["seed"] == 1 and d["gate_passed"] is True
    assert set(d["schemes"]) == {"FilteredLie", "FilteredStrang"}
    rows = list(csv.reader(io.StringIO(small_report.to_csv())))
    assert rows[0] == ["tau", "FilteredLie", "FilteredStrang"]
    assert len(rows) == 6 and float(rows[1][0]) == 0.125
    assert float(rows[1][1]) == small_report.results["FilteredLie"].errors[0]


def test_ladder_is_deterministic(small_report):
    again = run_ladder(SMALL, gate=False)
    for name, r in small_report.results.items():
        assert r.errors == again.results[name].errors


def test_max_over_time_dominates_final(small_report):
    from dataclasses import replace

    rep = run_ladder(replace(SMALL, max_over_time=True), gate=False)
    for name, r in rep.results.items():
        assert all(m >= f * (1 - 1e-12) for m, f in zip(r.errors, small_report.results[name].errors))


def test_divergence_is_recorded():
    cfg = ExperimentConfig(K=32, mu=1, normalize_to=30.0, tau_max_exp=0, tau_min_exp=2, tau_ref_exp=6, schemes=("Lie",))
    rep = run_ladder(cfg, gate=False, trim=False)
    r = rep.results["Lie"]
    assert len(r.errors) == 3
    assert all((e is None) == (t in r.failures) for t, e in zip(r.taus, r.errors))


def test_reference_change_small(small_report):
    assert small_report.reference_change == pytest.approx(reference_change(SMALL), rel=1e-12)


def test_projection_gap_examples():
    cfg = ExperimentConfig(K=8, tau_max_exp=6, tau_min_exp=8, tau_ref_exp=12)
    points, fit = projection_gap(cfg)
    # cutoff tau^{-1/2} >= K on every rung: the projection is the identity
    assert all(g <= 1e-12 for _, g in points)
    pts, _ = projection_gap(SMALL, f0=plane_wave(1, 1, 64))
    assert all(g <= 1e-10 for _, g in pts)
    pts, fit = projection_gap(SMALL)
    assert fit is not None and fit.slope > 0
