"""Acceptance criteria at their stated tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line (shown even under capture).
The convergence criteria share module-scoped ladders; the whole module takes
several minutes on one core.
"""
from dataclasses import replace

import numpy as np
import pytest

from nlsplit.checks import (
    commutator_check,
    dtau_ratio_range,
    mass_drift,
    parseval_check,
    plane_wave_error,
    telescopic_check,
)
from nlsplit.convergence import ExperimentConfig, projection_gap, run_ladder
from nlsplit.integrators import Scheme
from nlsplit.probes import GROWTH_LIMIT, Ensemble, inequality_probe

ROUGH = ExperimentConfig(s=0.5, seed=1, K=2**10, T=1.0, mu=-1)
SMOOTH = replace(ROUGH, s=4.0)


@pytest.fixture
def verdict(capsys):
    def emit(label, passed, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
        return passed

    return emit


@pytest.fixture(scope="module")
def rough_report():
    return run_ladder(ROUGH)


@pytest.fixture(scope="module")
def smooth_report():
    return run_ladder(SMOOTH)


def test_reference_quality(rough_report, smooth_report, verdict):
    ok = True
    for name, rep in (("rough", rough_report), ("smooth", smooth_report)):
        ok &= verdict(
            f"reference gate ({name} data)",
            rep.gate_passed,
            f"change {rep.reference_change:.2e} <= {rep.gate_threshold:.2e}",
        )
    assert ok


def test_c01_rough_rate(rough_report, verdict):
    lie = rough_report.slope("FilteredLie")
    strang = rough_report.slope("FilteredStrang")
    ok_lie = verdict("C1 rough data, FilteredLie slope in [0.17, 0.33]", 0.17 <= lie <= 0.33, f"{lie:.4f}")
    ok_strang = verdict("C1 rough data, FilteredStrang slope in [0.17, 0.38]", 0.17 <= strang <= 0.38, f"{strang:.4f}")
    assert ok_lie and ok_strang


def test_c02_smooth_rates(smooth_report, verdict):
    lie = smooth_report.slope("FilteredLie")
    strang = smooth_report.slope("FilteredStrang")
    ok_lie = verdict("C2 smooth data, FilteredLie slope in [0.9, 1.1]", 0.9 <= lie <= 1.1, f"{lie:.4f}")
    ok_strang = verdict("C2 smooth data, FilteredStrang slope in [1.8, 2.2]", 1.8 <= strang <= 2.2, f"{strang:.4f}")
    assert ok_lie and ok_strang


def test_c03_plane_wave(verdict):
    worst = max(
        plane_wave_error(scheme, k, mu, n_steps=1000)
        for scheme in Scheme
        for k in (0, 1, 5)
        for mu in (-1, 1)
    )
    assert verdict("C3 plane-wave exactness <= 1e-9", worst <= 1e-9, f"{worst:.2e}")


def test_c04_telescopic(verdict):
    r = telescopic_check(n_steps=100)
    assert verdict("C4 telescopic residual <= 1e-9", r <= 1e-9, f"{r:.2e}")


def test_c05_commutator(verdict):
    r = commutator_check(count=10)
    assert verdict("C5 commutator min-sign residual <= 1e-8", r <= 1e-8, f"{r:.2e}")


def test_c06_mass(verdict):
    cons = max(mass_drift(s, n_steps=1000) for s in (Scheme.LIE, Scheme.STRANG))
    mono = max(mass_drift(s, n_steps=1000, mu=mu) for s in (Scheme.FILTERED_LIE, Scheme.FILTERED_STRANG) for mu in (-1, 1))
    ok1 = verdict("C6 unfiltered mass drift <= 1e-11", cons <= 1e-11, f"{cons:.2e}")
    ok2 = verdict("C6 filtered per-step mass increase <= 1e-12", mono <= 1e-12, f"{mono:.2e}")
    assert ok1 and ok2


def test_c07_parseval(verdict):
    r = parseval_check(count=32, lengths=(1, 7, 64))
    assert verdict("C7 Parseval relative error <= 1e-10", r <= 1e-10, f"{r:.2e}")


def test_c08_dtau(verdict):
    lo, hi = dtau_ratio_range((1.0, 2.0**-5, 2.0**-10))
    ok = lo >= 2 / np.pi - 1e-12 and hi <= 1 + 1e-12
    assert verdict("C8 |d_tau(sigma)|/|sigma| in [2/pi, 1]", ok, f"[{lo:.15f}, {hi:.15f}]")


PROBE_ENSEMBLE = Ensemble(count=64, tau_list=tuple(2.0**-m for m in range(4, 11)))


@pytest.mark.parametrize("name", ["sobbourg", "embdisc1", "prodd1", "prodd3", "bourg2", "bourg4"])
def test_c09_probe_growth(name, verdict):
    r = inequality_probe(name, PROBE_ENSEMBLE)
    ok = r.growth <= GROWTH_LIMIT and np.all(np.isfinite(r.per_tau_max_ratio))
    detail = f"growth {r.growth:.3f}, per-tau max " + ", ".join(f"{x:.3g}" for x in r.per_tau_max_ratio)
    assert verdict(f"C9 probe {name} growth <= {GROWTH_LIMIT:g}x", ok, detail)


def test_c09_embdisc1_equal_exponents(verdict):
    r = inequality_probe("embdisc1", PROBE_ENSEMBLE, b=0.375, b_prime=0.375)
    ok = all(x == 1.0 for row in r.ratios for x in row)
    assert verdict("C9 embdisc1 with b = b' gives ratio exactly 1", ok, f"max ratio {r.max_ratio!r}")


def test_c10_projection_gap(verdict):
    points, fit = projection_gap(ROUGH)
    ok = fit is not None and fit.slope > 0
    gaps = ", ".join(f"{g:.3g}" for _, g in points)
    assert verdict("C10 projection gap slope > 0 (diagnostic)", ok, f"slope {fit.slope:.4f}; gaps {gaps}")
