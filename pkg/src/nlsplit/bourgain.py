"""Discrete space-time Fourier analysis of time series of fields.

For a sequence ``u_m`` sampled at ``t_m = m tau`` the space-time transform is

    u~(sigma, k) = tau * sum_m c_m(k) exp(i m tau sigma),   sigma in [-pi/tau, pi/tau),

and the discrete Bourgain norm weights ``|u~|^2`` by
``<k>^{2s} <d_tau(sigma - k^2)>^{2b}`` with ``d_tau(sigma) = (e^{i tau sigma} - 1)/tau``.
The sigma integral is evaluated with ``M`` equispaced nodes of weight
``2 pi / (M tau)``; for ``M >= 2N - 1`` this is exact on the unweighted
integrand, which makes Parseval an identity to rounding.

Space-time quantities use the physical spatial measure: ``||u~||_{L^2 l^2}``
equals ``(tau sum_m int |u_m|^2 dx)^{1/2}`` (see :func:`parseval_gap`).
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .integrators import TimeSeries
from .spectral import wavenumbers

__all__ = [
    "BourgainParams",
    "SpaceTimeSpectrum",
    "dtau",
    "sigma_nodes",
    "spacetime_transform",
    "xsb_norm",
    "xsb_norm_series",
    "xsb_norms",
    "l2_tau_l2",
    "parseval_gap",
    "lptau_lp_norm",
    "synthesize_series",
    "analyze_series",
    "SUPPORTED_P",
]

SUPPORTED_P = (4.0 / 3.0, 2.0, 4.0, 20.0 / 3.0, np.inf)


@dataclass(frozen=True)
class BourgainParams:
    s: float
    b: float
    tau: float
    sigma_samples: int

    def validate(self, series_length: int):
        if not 0 < self.tau <= 1:
            raise ParameterError(f"tau must lie in (0, 1], got {self.tau}")
        if self.sigma_samples < 2 * series_length - 1:
            raise ParameterError(
                f"{self.sigma_samples} sigma nodes < 2N-1 = {2 * series_length - 1}"
            )


@dataclass(frozen=True, eq=False)
class SpaceTimeSpectrum:
    """``values[j, i]`` is ``u~(sigma_j, k_i)`` (modes in FFT layout)."""

    values: np.ndarray
    tau: float
    series_length: int
    t0: float = 0.0

    @property
    def num_sigma(self) -> int:
        return self.values.shape[0]

    @property
    def sigma(self) -> np.ndarray:
        return sigma_nodes(self.num_sigma, self.tau)

    @property
    def modes(self) -> np.ndarray:
        return wavenumbers(self.values.shape[1] // 2)

    @property
    def weight(self) -> float:
        """Quadrature weight of one sigma node."""
        return 2.0 * np.pi / (self.num_sigma * self.tau)


def dtau(sigma, tau):
    """``(exp(i tau sigma) - 1) / tau``; periodic in sigma with period 2pi/tau."""
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    return np.expm1(1j * tau * np.asarray(sigma, dtype=float)) / tau


def sigma_nodes(M: int, tau: float) -> np.ndarray:
    return -np.pi / tau + 2.0 * np.pi * np.arange(M) / (M * tau)


def spacetime_transform(series: TimeSeries, params: BourgainParams) -> SpaceTimeSpectrum:
    """Evaluate ``u~`` at the nodes ``sigma_j = -pi/tau + 2 pi j/(M tau)``.

    The series is zero outside its stored samples; sample ``m`` sits at
    absolute index ``m0 + m`` with ``m0 = round(t0 / tau)``.
    """
    tau = series.tau
    if not np.isclose(params.tau, tau, rtol=1e-14, atol=0):
        raise ParameterError(f"params.tau={params.tau} does not match series tau={tau}")
    N = len(series)
    params.validate(N)
    M = int(params.sigma_samples)
    a = series.as_array()
    m0 = int(round(series.t0 / tau))
    # exp(i m tau sigma_j) = (-1)^m exp(2 pi i j m / M)
    alt = np.where(np.arange(N) % 2, -1.0, 1.0)[:, None]
    vals = np.fft.ifft(a * alt, n=M, axis=0) * (M * tau)
    if m0:
        vals *= np.exp(1j * m0 * tau * sigma_nodes(M, tau))[:, None]
    return SpaceTimeSpectrum(vals, tau, N, series.t0)


def xsb_norm(spectrum: SpaceTimeSpectrum, s: float, b: float) -> float:
    """``|| <k>^s <d_tau(sigma - k^2)>^b u~ ||_{L^2 l^2}`` by sigma quadrature."""
    power = spectrum.values.real**2 + spectrum.values.imag**2
    if s != 0 or b != 0:
        power = power * _weight(spectrum.num_sigma, spectrum.tau, spectrum.values.shape[1] // 2, s, b)
    return float(np.sqrt(spectrum.weight * power.sum()))


@functools.lru_cache(maxsize=8)
def _weight(M: int, tau: float, num_modes: int, s: float, b: float) -> np.ndarray:
    k = wavenumbers(num_modes).astype(float)
    w = np.ones((M, 2 * num_modes))
    if b != 0:
        # |d_tau(x)|^2 = (2/tau)^2 sin^2(tau x / 2)
        phase = 0.5 * tau * (sigma_nodes(M, tau)[:, None] - k[None, :] ** 2)
        w = (1.0 + (2.0 / tau) ** 2 * np.sin(phase) ** 2) ** b
    if s != 0:
        w = w * ((1.0 + k**2) ** s)[None, :]
    w.setflags(write=False)
    return w


def _next_pow2(n: int) -> int:
    return 1 << max(int(n - 1).bit_length(), 1)


def xsb_norm_series(
    series: TimeSeries,
    s: float,
    b: float,
    sigma_samples: int | None = None,
    rtol: float = 1e-6,
    check: bool = True,
) -> float:
    """X^{s,b}_tau norm of a series with an automatic sigma grid.

    Unweighted norms use ``M = 2N - 1`` rounded up to a power of two (exact).
    Weighted norms start from ``M >= 4N`` and, with ``check``, double ``M``
    until two successive values agree to ``rtol``.
    """
    return xsb_norms(series, [(s, b)], sigma_samples, rtol, check)[0]


def xsb_norms(series, exponents, sigma_samples=None, rtol=1e-6, check=True, max_samples=1 << 22):
    """Several ``(s, b)`` norms of one series from a shared spectrum."""
    N = len(series)
    weighted = any(b != 0 for _, b in exponents)
    if sigma_samples:
        M = sigma_samples
    elif weighted:
        M = _next_pow2(max(4 * N, int(16 / series.tau)))
    else:
        M = _next_pow2(2 * N - 1)

    def evaluate(M):
        spec = spacetime_transform(series, BourgainParams(0.0, 0.0, series.tau, M))
        return np.array([xsb_norm(spec, s, b) for s, b in exponents])

    values = evaluate(M)
    while check and weighted:
        M *= 2
        if M > max_samples:
            raise ParameterError(f"sigma quadrature did not converge below {max_samples} nodes")
        refined = evaluate(M)
        done = np.all(np.abs(refined - values) <= rtol * np.maximum(np.abs(refined), np.finfo(float).tiny))
        values = refined
        if done:
            break
    return [float(v) for v in values]


def l2_tau_l2(series: TimeSeries) -> float:
    """``(tau sum_m int |u_m|^2 dx)^{1/2}``."""
    a = series.as_array()
    return float(np.sqrt(series.tau * 2.0 * np.pi * np.sum(np.abs(a) ** 2)))


def parseval_gap(series: TimeSeries, sigma_samples: int | None = None) -> float:
    """Relative mismatch between the two sides of the discrete Parseval identity."""
    N = len(series)
    M = sigma_samples or 2 * N - 1
    spec = spacetime_transform(series, BourgainParams(0.0, 0.0, series.tau, M))
    lhs = xsb_norm(spec, 0.0, 0.0)
    rhs = l2_tau_l2(series)
    if rhs == 0:
        return float(lhs)
    return abs(lhs - rhs) / rhs


def synthesize_series(coeffs: np.ndarray, grid_factor: int = 2) -> np.ndarray:
    """Physical samples of every row of an ``(N, 2K)`` coefficient array."""
    coeffs = np.atleast_2d(coeffs)
    N, n = coeffs.shape
    K = n // 2
    nf = n * grid_factor
    padded = np.zeros((N, nf), dtype=np.complex128)
    padded[:, :K] = coeffs[:, :K]
    padded[:, -K:] = coeffs[:, K:]
    k = wavenumbers(nf // 2)
    return np.fft.ifft(padded * np.where(k % 2, -1.0, 1.0), axis=1) * nf


def analyze_series(values: np.ndarray, num_modes: int) -> np.ndarray:
    """Inverse of :func:`synthesize_series`, truncating to ``2 num_modes`` modes."""
    values = np.atleast_2d(values)
    nf = values.shape[1]
    k = wavenumbers(nf // 2)
    full = np.fft.fft(values, axis=1) / nf * np.where(k % 2, -1.0, 1.0)
    K = num_modes
    return np.concatenate([full[:, :K], full[:, -K:]], axis=1)


def _check_p(p) -> float:
    p = float(p)
    for q in SUPPORTED_P:
        if p == q or (np.isfinite(q) and abs(p - q) < 1e-12):
            return q
    raise ParameterError(f"unsupported exponent p={p}; choose from 4/3, 2, 4, 20/3, inf")


def lptau_lp_norm(series, p, tau: float | None = None, grid_factor: int = 2) -> float:
    """``(tau sum_n int |u_n|^p dx)^{1/p}``, or ``sup_n sup_x |u_n|`` for p = inf.

    The spatial integral is the equal-weight quadrature on the grid refined by
    ``grid_factor``; it is exact for p = 2 and, with the default padding, for p = 4.
    ``series`` is a TimeSeries or an ``(N, 2K)`` array (then pass ``tau``).
    """
    p = _check_p(p)
    if isinstance(series, TimeSeries):
        coeffs, tau = series.as_array(), series.tau
    else:
        coeffs = np.atleast_2d(series)
        if tau is None:
            raise ParameterError("tau is required for raw coefficient arrays")
    u = np.abs(synthesize_series(coeffs, grid_factor))
    if np.isinf(p):
        return float(u.max()) if u.size else 0.0
    dx = 2.0 * np.pi / u.shape[1]
    return float((tau * dx * np.sum(u**p)) ** (1.0 / p))
