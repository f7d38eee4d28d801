"""Periodic spectral fields on the torus [-pi, pi).

A field is stored through its Fourier coefficients ``c_k`` for the modes
``k = -K, ..., K-1`` with the convention

    u(x) = sum_k c_k exp(i k x),        c_k = (1/2pi) int u(x) exp(-i k x) dx,

so that ``int |u|^2 dx = 2 pi sum_k |c_k|^2``.  Every norm in this package is
the *sequence* norm ``(sum_k <k>^{2s} |c_k|^2)^{1/2}``; the physical L^2 norm
is ``sqrt(2 pi)`` times the ``s = 0`` value.

Coefficient arrays are kept in the standard FFT layout (modes
``0, 1, ..., K-1, -K, ..., -1``); use :func:`wavenumbers` to label them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputShapeError, ParameterError

__all__ = [
    "SpectralField",
    "wavenumbers",
    "bracket",
    "grid",
    "analyze",
    "synthesize",
    "sobolev_norm",
    "inner",
    "projection_mask",
    "project_pi_tau",
    "linear_flow",
    "derivative",
]


def wavenumbers(num_modes: int) -> np.ndarray:
    """Integer mode labels of a length ``2 * num_modes`` array in FFT order."""
    n = 2 * num_modes
    return np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)


def bracket(x):
    """Japanese bracket ``(1 + |x|^2)^{1/2}``; accepts complex input."""
    return np.sqrt(1.0 + np.abs(x) ** 2)


def grid(num_points: int) -> np.ndarray:
    """Uniform collocation points on [-pi, pi)."""
    return -np.pi + 2.0 * np.pi * np.arange(num_points) / num_points


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of one periodic complex field (FFT layout)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.size < 2 or c.size % 2:
            raise InputShapeError(
                f"coefficient array must be 1-D of even length, got shape {c.shape}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, num_modes: int) -> "SpectralField":
        return cls(np.zeros(2 * num_modes, dtype=np.complex128))

    @classmethod
    def from_modes(cls, num_modes: int, modes: dict) -> "SpectralField":
        """Build a field from a ``{k: coefficient}`` mapping."""
        c = np.zeros(2 * num_modes, dtype=np.complex128)
        for k, value in modes.items():
            if not -num_modes <= k < num_modes:
                raise ParameterError(f"mode {k} outside [-{num_modes}, {num_modes})")
            c[k % (2 * num_modes)] = value
        return cls(c)

    @property
    def num_modes(self) -> int:
        return self.coeffs.size // 2

    @property
    def modes(self) -> np.ndarray:
        return wavenumbers(self.num_modes)

    def coeff(self, k: int) -> complex:
        K = self.num_modes
        if not -K <= k < K:
            raise ParameterError(f"mode {k} outside [-{K}, {K})")
        return complex(self.coeffs[k % (2 * K)])

    def ordered(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(modes, coeffs)`` sorted from ``-K`` to ``K-1``."""
        return np.fft.fftshift(self.modes), np.fft.fftshift(self.coeffs)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.coeffs)))

    def _check(self, other: "SpectralField"):
        if other.num_modes != self.num_modes:
            raise InputShapeError(
                f"mode counts differ: {self.num_modes} vs {other.num_modes}"
            )

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.coeffs - other.coeffs)

    def __neg__(self):
        return SpectralField(-self.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.coeffs * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"SpectralField(K={self.num_modes})"


def analyze(values, num_modes: int | None = None) -> SpectralField:
    """Fourier coefficients from samples on the uniform grid of [-pi, pi).

    ``values`` holds ``2K`` samples, or more when ``num_modes`` is given:
    samples on a finer (padded) grid are transformed there and truncated back
    to ``2 * num_modes`` coefficients.
    """
    v = np.asarray(values, dtype=np.complex128)
    if v.ndim != 1 or v.size % 2:
        raise InputShapeError(f"expected an even number of samples, got shape {v.shape}")
    n = v.size
    if num_modes is None:
        num_modes = n // 2
    if 2 * num_modes > n:
        raise InputShapeError(f"{n} samples cannot resolve {num_modes} modes")
    k = wavenumbers(n // 2)
    # grid starts at -pi, hence the (-1)^k shift
    full = np.fft.fft(v) / n * np.where(k % 2, -1.0, 1.0)
    if 2 * num_modes == n:
        return SpectralField(full)
    return SpectralField(_truncate(full, num_modes))


def synthesize(f: SpectralField, grid_factor: int = 1) -> np.ndarray:
    """Samples of ``f`` on the uniform grid with ``2K * grid_factor`` points."""
    K = f.num_modes
    n = 2 * K * grid_factor
    c = f.coeffs if grid_factor == 1 else _pad(f.coeffs, n // 2)
    k = wavenumbers(n // 2)
    return np.fft.ifft(c * np.where(k % 2, -1.0, 1.0)) * n


def _pad(coeffs: np.ndarray, new_modes: int) -> np.ndarray:
    K = coeffs.size // 2
    out = np.zeros(2 * new_modes, dtype=np.complex128)
    out[:K] = coeffs[:K]
    out[-K:] = coeffs[K:]
    return out


def _truncate(coeffs: np.ndarray, new_modes: int) -> np.ndarray:
    K = new_modes
    return np.concatenate([coeffs[:K], coeffs[-K:]])


def sobolev_norm(f: SpectralField, s: float = 0.0) -> float:
    """Sequence H^s norm ``(sum_k <k>^{2s} |c_k|^2)^{1/2}``."""
    if not np.isfinite(s):
        raise ParameterError("Sobolev index must be finite")
    c = f.coeffs
    if s == 0:
        return float(np.sqrt(np.sum(np.abs(c) ** 2)))
    w = (1.0 + f.modes.astype(float) ** 2) ** s
    return float(np.sqrt(np.sum(w * np.abs(c) ** 2)))


def inner(f: SpectralField, g: SpectralField) -> complex:
    """Sequence inner product ``sum_k conj(f_k) g_k``."""
    f._check(g)
    return complex(np.vdot(f.coeffs, g.coeffs))


def projection_mask(num_modes: int, tau: float) -> np.ndarray:
    """Boolean symbol of the cutoff ``|k| sqrt(tau) <= 1`` (boundary kept)."""
    if not tau > 0:
        raise ParameterError(f"step size must be positive, got {tau}")
    k = wavenumbers(num_modes).astype(float)
    return k * k * tau <= 1.0 + 1e-12


def project_pi_tau(f: SpectralField, tau: float) -> SpectralField:
    """Keep the modes with ``|k| <= tau^{-1/2}`` and zero the rest."""
    return SpectralField(np.where(projection_mask(f.num_modes, tau), f.coeffs, 0.0))


def linear_flow(f: SpectralField, t: float) -> SpectralField:
    """Free Schroedinger flow ``exp(i t d_xx)``: ``c_k -> exp(-i t k^2) c_k``."""
    if t == 0:
        return f
    k = f.modes.astype(float)
    return SpectralField(f.coeffs * np.exp(-1j * t * k * k))


def derivative(f: SpectralField, order: int = 1) -> SpectralField:
    if order not in (0, 1, 2):
        raise ParameterError(f"unsupported derivative order {order}")
    if order == 0:
        return f
    k = f.modes.astype(float)
    return SpectralField(f.coeffs * (1j * k) ** order)
