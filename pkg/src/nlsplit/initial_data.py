"""Reproducible initial data: random rough fields, plane waves, file I/O.

Random fields are drawn with ``numpy.random.Generator(PCG64(seed))``; the
bit stream of PCG64 is stable across numpy releases and platforms, so a seed
pins the field exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputShapeError, ParameterError
from .spectral import SpectralField, bracket, sobolev_norm, wavenumbers

__all__ = [
    "RNG_NAME",
    "RoughDataSpec",
    "rough_field",
    "plane_wave",
    "save_field",
    "load_field",
]

RNG_NAME = f"numpy.random.PCG64 (numpy {np.__version__})"


@dataclass(frozen=True)
class RoughDataSpec:
    s: float
    seed: int
    num_modes: int
    normalize_to: float = 1.0

    def validate(self):
        if not (np.isfinite(self.s) and self.s > 0):
            raise ParameterError(f"regularity index must be positive, got {self.s}")
        if int(self.num_modes) != self.num_modes or self.num_modes < 2:
            raise ParameterError(f"need at least 2 modes, got {self.num_modes}")
        if not self.normalize_to > 0:
            raise ParameterError("normalize_to must be positive")


def rough_field(spec: RoughDataSpec) -> SpectralField:
    """Random field with coefficients ``(a_k + i b_k) <k>^{-(s + 1/2)}``.

    ``a_k, b_k`` are i.i.d. uniform on [-1, 1].  The draw lies in ``H^{s'}``
    for every ``s' < s`` but not in ``H^s`` as ``K`` grows.  The unpaired mode
    ``-K`` is left at zero and the result is rescaled so that its ``s = 0``
    sequence norm equals ``spec.normalize_to``.
    """
    spec.validate()
    K = int(spec.num_modes)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    ab = rng.uniform(-1.0, 1.0, size=(2, 2 * K))
    k = wavenumbers(K)
    c = (ab[0] + 1j * ab[1]) * bracket(k.astype(float)) ** (-(spec.s + 0.5))
    c[k == -K] = 0.0
    f = SpectralField(c)
    return f * (spec.normalize_to / sobolev_norm(f, 0.0))


def plane_wave(k: int, amplitude: complex, num_modes: int) -> SpectralField:
    """``amplitude * exp(i k x)``."""
    if not abs(k) < num_modes:
        raise ParameterError(f"mode {k} needs |k| < {num_modes}")
    return SpectralField.from_modes(num_modes, {k: amplitude})


def save_field(f: SpectralField, path) -> None:
    """Write ``(mode, real, imag)`` rows; ``.npy`` gives binary, else text."""
    modes, c = f.ordered()
    table = np.column_stack([modes.astype(float), c.real, c.imag])
    path = Path(path)
    if path.suffix == ".npy":
        np.save(path, table)
    else:
        np.savetxt(path, table, fmt=["%d", "%.17e", "%.17e"], header="mode real imag")


def load_field(path) -> SpectralField:
    path = Path(path)
    table = np.load(path) if path.suffix == ".npy" else np.loadtxt(path, ndmin=2)
    if table.ndim != 2 or table.shape[1] != 3:
        raise InputShapeError(f"{path}: expected three columns (mode, real, imag)")
    modes = table[:, 0].round().astype(np.int64)
    K = table.shape[0] // 2
    if table.shape[0] != 2 * K or set(modes) != set(range(-K, K)):
        raise InputShapeError(f"{path}: modes must cover -K..K-1 exactly once")
    c = np.zeros(2 * K, dtype=np.complex128)
    c[modes % (2 * K)] = table[:, 1] + 1j * table[:, 2]
    return SpectralField(c)
