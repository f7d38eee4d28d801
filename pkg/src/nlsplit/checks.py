"""Structural identity checks behind the ``check`` command.

Every function returns the measured quantity; thresholds live with the
callers (``CHECK_LIMITS`` for the CLI).
"""
from __future__ import annotations

import numpy as np

from .bourgain import dtau, parseval_gap
from .initial_data import RoughDataSpec, plane_wave, rough_field
from .integrators import (
    Scheme,
    StepperConfig,
    TimeSeries,
    commutator_residual,
    evolve,
    mass,
    telescopic_residual,
)
from .spectral import SpectralField, wavenumbers

CHECK_LIMITS = {
    "plane_wave": 1e-9,
    "telescopic": 1e-9,
    "commutator": 1e-8,
    "mass_conservation": 1e-11,
    "mass_monotone": 1e-12,
    "parseval": 1e-10,
    "dtau": 1e-12,
}


def plane_wave_error(scheme, k: int, mu: int = -1, n_steps: int = 1000, tau: float = 2.0**-5, num_modes: int = 8) -> float:
    """Largest L^2 distance to ``exp(i (mu - k^2) t) exp(i k x)`` over the run.

    The default grid keeps ``tau K^2 < pi``. Beyond that the unfiltered
    schemes amplify rounding noise in resonant modes and the single-mode
    solution is exact only until that noise has grown.
    """
    f0 = plane_wave(k, 1.0, num_modes)
    series = evolve(f0, StepperConfig(scheme, mu, tau), n_steps)
    t = series.times
    exact = np.exp(1j * (mu - k * k) * t)
    a = series.as_array().copy()
    a[:, k % (2 * num_modes)] -= exact
    return float(np.sqrt(np.max(np.sum(np.abs(a) ** 2, axis=1))))


def telescopic_check(n_steps: int = 100, s: float = 0.5, seed: int = 7, num_modes: int = 256, tau: float = 2.0**-7, mu: int = -1) -> float:
    f0 = rough_field(RoughDataSpec(s, seed, num_modes))
    cfg = StepperConfig(Scheme.FILTERED_LIE, mu, tau)
    series = evolve(f0, cfg, n_steps)
    return telescopic_residual(series, cfg, f0)


def band_limited_field(rng, num_modes: int, band: int) -> SpectralField:
    k = wavenumbers(num_modes)
    c = (rng.standard_normal(2 * num_modes) + 1j * rng.standard_normal(2 * num_modes))
    c = np.where(np.abs(k) <= band, c / (1.0 + np.abs(k)), 0.0)
    return SpectralField(c)


def commutator_check(count: int = 10, seed: int = 3, num_modes: int = 64, mu: int = -1) -> float:
    """Worst ``min(residual_plus, residual_minus)`` over random band-limited fields."""
    rng = np.random.Generator(np.random.PCG64(seed))
    worst = 0.0
    for _ in range(count):
        f = band_limited_field(rng, num_modes, num_modes // 4)
        worst = max(worst, min(commutator_residual(f, mu)))
    return worst


def mass_drift(scheme, n_steps: int = 1000, s: float = 0.5, seed: int = 11, num_modes: int = 128, tau: float = 2.0**-8, mu: int = -1) -> float:
    """Relative mass drift (unfiltered) or the largest per-step mass increase (filtered)."""
    f0 = rough_field(RoughDataSpec(s, seed, num_modes))
    series = evolve(f0, StepperConfig(scheme, mu, tau), n_steps)
    m = np.array([mass(f) for f in series])
    if Scheme.parse(scheme).filtered:
        return float(max(np.max(np.diff(m)), 0.0))
    return float(np.max(np.abs(m - m[0])) / m[0])


def random_series(rng, length: int, num_modes: int = 16, tau: float = 0.1) -> TimeSeries:
    shape = (length, 2 * num_modes)
    a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return TimeSeries.from_array(a, tau, t0=float(rng.integers(-5, 5)) * tau)


def parseval_check(count: int = 32, lengths=(1, 7, 64), seed: int = 5) -> float:
    rng = np.random.Generator(np.random.PCG64(seed))
    worst = 0.0
    for length in lengths:
        for _ in range(count):
            tau = float(rng.choice([1.0, 0.1, 2.0**-6]))
            worst = max(worst, parseval_gap(random_series(rng, length, tau=tau)))
    return worst


def dtau_ratio_range(taus=(1.0, 2.0**-5, 2.0**-10), samples: int = 100001) -> tuple[float, float]:
    """Extremes of ``|d_tau(sigma)| / |sigma|`` over ``0 < |tau sigma| <= pi``."""
    lo, hi = np.inf, -np.inf
    for tau in taus:
        theta = np.linspace(-np.pi, np.pi, samples)
        theta = theta[theta != 0]
        sigma = theta / tau
        r = np.abs(dtau(sigma, tau)) / np.abs(sigma)
        lo, hi = min(lo, r.min()), max(hi, r.max())
    return float(lo), float(hi)


def run_all() -> list:
    """``(name, value, limit, passed)`` rows for the quick structural suite."""
    rows = []
    pw = max(plane_wave_error(s, k, mu) for s in Scheme for k in (0, 1, 5) for mu in (-1, 1))
    rows.append(("plane_wave", pw, CHECK_LIMITS["plane_wave"], pw <= CHECK_LIMITS["plane_wave"]))
    tel = telescopic_check()
    rows.append(("telescopic", tel, CHECK_LIMITS["telescopic"], tel <= CHECK_LIMITS["telescopic"]))
    com = commutator_check()
    rows.append(("commutator", com, CHECK_LIMITS["commutator"], com <= CHECK_LIMITS["commutator"]))
    cons = max(mass_drift(s) for s in (Scheme.LIE, Scheme.STRANG))
    rows.append(("mass_conservation", cons, CHECK_LIMITS["mass_conservation"], cons <= CHECK_LIMITS["mass_conservation"]))
    mono = max(mass_drift(s) for s in (Scheme.FILTERED_LIE, Scheme.FILTERED_STRANG))
    rows.append(("mass_monotone", mono, CHECK_LIMITS["mass_monotone"], mono <= CHECK_LIMITS["mass_monotone"]))
    par = parseval_check()
    rows.append(("parseval", par, CHECK_LIMITS["parseval"], par <= CHECK_LIMITS["parseval"]))
    lo, hi = dtau_ratio_range()
    slack = max(2 / np.pi - lo, hi - 1.0, 0.0)
    rows.append(("dtau", slack, CHECK_LIMITS["dtau"], slack <= CHECK_LIMITS["dtau"]))
    return rows


__all__ = [
    "CHECK_LIMITS",
    "plane_wave_error",
    "telescopic_check",
    "commutator_check",
    "mass_drift",
    "parseval_check",
    "dtau_ratio_range",
    "run_all",
]
