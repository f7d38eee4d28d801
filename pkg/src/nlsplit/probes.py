"""Empirical probes of the discrete Bourgain-space inequalities.

Each probe draws a seeded ensemble of space-time series, evaluates both sides
of one inequality ``LHS <~ RHS`` and records ``LHS / RHS``.  The inequalities
carry unknown constants, so the only falsifiable claim is uniformity in the
step size: a probe is flagged ``"growing"`` when the largest ratio at the
smallest step exceeds ``GROWTH_LIMIT`` times the largest ratio at the largest
step.

Ensemble law (fixed in physical time, so every step size samples the same
underlying functions): for ``t`` in ``[-span/2, span/2]``

    c(t, k) = eta(2 t / span) exp(-i t k^2) <k>^{-1} sum_{|l| <= L} <l>^{-1} Z_{k,l} exp(i l t),

with ``Z`` i.i.d. standard complex Gaussians.  ``eta`` is the smooth bump
below.  Sample ``j`` draws from ``PCG64(SeedSequence([seed, j]))``.
"""
from __future__ import annotations

import contextlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .bourgain import (
    analyze_series,
    lptau_lp_norm,
    parseval_gap,
    synthesize_series,
    xsb_norm_series,
    xsb_norms,
)
from .errors import ParameterError
from .integrators import TimeSeries
from .spectral import bracket, projection_mask, wavenumbers

__all__ = [
    "GROWTH_LIMIT",
    "Ensemble",
    "ProbeReport",
    "CATALOG",
    "bump",
    "draw_series",
    "inequality_probe",
]

GROWTH_LIMIT = 4.0


def bump(t):
    """C-infinity cutoff: 1 on [-1, 1], 0 outside (-2, 2), smooth transition."""
    t = np.abs(np.asarray(t, dtype=float))

    def psi(x):
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = np.exp(-1.0 / x[pos])
        return out

    a = psi(2.0 - t)
    return a / (a + psi(t - 1.0))


@dataclass(frozen=True)
class Ensemble:
    count: int = 64
    seed: int = 0
    num_modes: int = 16
    span: float = 8.0
    harmonics: int = 8
    tau_list: tuple = tuple(2.0**-m for m in range(4, 11))

    def validate(self):
        if self.count < 1 or self.num_modes < 2 or self.harmonics < 0 or not self.span > 0:
            raise ParameterError("ensemble parameters must be positive")
        for tau in self.tau_list:
            if not 0 < tau <= 1:
                raise ParameterError(f"tau must lie in (0, 1], got {tau}")
            steps = self.span / (2 * tau)
            if abs(steps - round(steps)) > 1e-9:
                raise ParameterError("span/2 must be a multiple of every tau")


def _amplitudes(ens: Ensemble, index: int, copies: int = 1):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([ens.seed, index])))
    shape = (copies, 2 * ens.harmonics + 1, 2 * ens.num_modes)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def draw_series(ens: Ensemble, index: int, tau: float, copies: int = 1) -> list:
    """``copies`` independent series of sample ``index`` at step ``tau``."""
    half = int(round(ens.span / (2 * tau)))
    t = tau * np.arange(-half, half + 1)
    k = wavenumbers(ens.num_modes).astype(float)
    ells = np.arange(-ens.harmonics, ens.harmonics + 1)
    Z = _amplitudes(ens, index, copies)
    Z = Z * (bracket(ells.astype(float)) ** -1.0)[None, :, None]
    Z = Z * (bracket(k) ** -1.0)[None, None, :]
    temporal = np.exp(1j * np.outer(t, ells))  # (N, L)
    envelope = bump(2.0 * t / ens.span)[:, None] * np.exp(-1j * np.outer(t, k * k))
    out = []
    for c in range(copies):
        coeffs = envelope * (temporal @ Z[c])
        out.append(TimeSeries.from_array(coeffs, tau, t0=t[0]))
    return out


_CHECK = [True]


@contextlib.contextmanager
def _quadrature_check(flag):
    saved = _CHECK[0]
    _CHECK[0] = flag
    try:
        yield
    finally:
        _CHECK[0] = saved


def _xsb(series, s, b):
    return xsb_norm_series(series, s, b, check=_CHECK[0])


def _series(coeffs, like: TimeSeries) -> TimeSeries:
    return TimeSeries.from_array(coeffs, like.tau, like.t0)


def _project(series: TimeSeries, tau: float) -> TimeSeries:
    mask = projection_mask(series.num_modes, tau)
    return _series(np.where(mask[None, :], series.as_array(), 0.0), series)


def _physical_hs(coeffs, s):
    k = wavenumbers(coeffs.shape[1] // 2).astype(float)
    return np.sqrt(2.0 * np.pi * np.sum((1.0 + k**2) ** s * np.abs(coeffs) ** 2, axis=1))


def _times(series):
    return series.times


def _probe_parseval(u, tau, ex):
    return 1.0 + parseval_gap(u), 1.0


def _probe_sobbourg(u, tau, ex):
    s, b = ex["s"], ex["b"]
    return float(_physical_hs(u.as_array(), s).max()), _xsb(u, s, b)


def _probe_embdisc1(u, tau, ex):
    b, bp = ex["b"], ex["b_prime"]
    if b < bp:
        raise ParameterError("embdisc1 needs b >= b'")
    lhs = _xsb(u, 0.0, b)
    rhs = lhs if b == bp else _xsb(u, 0.0, bp)
    return lhs, tau ** (bp - b) * rhs


def _probe_bshift(u, tau, ex):
    u = _project(u, tau)
    s, b = ex["s"], ex["b"]
    k2 = wavenumbers(u.num_modes).astype(float) ** 2
    t = _times(u)
    a = u.as_array()
    lhs = max(
        _xsb(_series(a * np.exp(-1j * delta * np.outer(t, k2)), u), s, b)
        for delta in np.linspace(-4.0, 4.0, 9)
    )
    return lhs, _xsb(u, s, b)


def _probe_shiftt(u, tau, ex):
    s, b = ex["s"], ex["b"]
    t = _times(u)
    a = u.as_array()
    lhs = max(
        _xsb(_series(a * np.exp(1j * delta * t)[:, None], u), s, b)
        for delta in np.linspace(-4.0, 4.0, 9)
    )
    return lhs, _xsb(u, s, b)


def _probe_bourg1(u, tau, ex):
    s, b = ex["s"], ex["b"]
    # the datum is the sample's slice at t = 0
    t = _times(u)
    f = u.as_array()[int(np.argmin(np.abs(t)))]
    k2 = wavenumbers(u.num_modes).astype(float) ** 2
    a = bump(t)[:, None] * np.exp(-1j * np.outer(t, k2)) * f[None, :]
    return _xsb(_series(a, u), s, b), float(_physical_hs(f[None, :], s)[0])


def _probe_bourg2(u, tau, ex):
    s, b = ex["s"], ex["b"]
    a = bump(_times(u))[:, None] * u.as_array()
    return _xsb(_series(a, u), s, b), _xsb(u, s, b)


def _probe_bourg3(u, tau, ex):
    s, b, bp, T = ex["s"], ex["b"], ex["b_prime"], ex["T"]
    a = bump(_times(u) / T)[:, None] * u.as_array()
    return _xsb(_series(a, u), s, bp), T ** (b - bp) * _xsb(u, s, b)


def _probe_bourg4(u, tau, ex):
    s, b = ex["s"], ex["b"]
    t = _times(u)
    k2 = wavenumbers(u.num_modes).astype(float) ** 2
    a = np.where((t >= -1e-12)[:, None], u.as_array(), 0.0)
    # sum_{m<=n} e^{i(n-m) tau d_xx} u_m in the interaction picture
    twist = np.exp(-1j * np.outer(t, k2))
    U = bump(t)[:, None] * twist * tau * np.cumsum(a / twist, axis=0)
    return _xsb(_series(U, u), s, b), _xsb(_series(a, u), s, b - 1.0)


def _probe_prodd1(u, tau, ex):
    return lptau_lp_norm(_project(u, tau), 4), _xsb(u, 0.0, ex["b"])


def _probe_dualbourg(u, tau, ex):
    return _xsb(_project(u, tau), 0.0, -ex["b"]), lptau_lp_norm(u, 4.0 / 3.0)


def _probe_prodd3(series3, tau, ex):
    b = ex["b"]
    u, v, w = (_project(x, tau) for x in series3)
    prod = np.prod([synthesize_series(x.as_array(), 2) for x in (u, v, w)], axis=0)
    cubic = _project(_series(analyze_series(prod, u.num_modes), u), tau)
    s1 = list(ex["s1"])
    lhs = np.array(xsb_norms(cubic, [(s, -b) for s in s1], check=_CHECK[0]))
    rhs = np.prod([xsb_norms(x, [(s, b) for s in s1], check=_CHECK[0]) for x in series3], axis=0)
    j = int(np.argmax(lhs / rhs))
    return lhs[j], rhs[j]


@dataclass(frozen=True)
class _Entry:
    func: object
    exponents: dict
    copies: int = 1


CATALOG = {
    "parseval": _Entry(_probe_parseval, {}),
    "sobbourg": _Entry(_probe_sobbourg, {"s": 0.0, "b": 5 / 8}),
    "embdisc1": _Entry(_probe_embdisc1, {"b": 3 / 8, "b_prime": -3 / 8}),
    "bshift": _Entry(_probe_bshift, {"s": 0.0, "b": 3 / 8}),
    "shiftt": _Entry(_probe_shiftt, {"s": 0.0, "b": 3 / 8}),
    "bourg1": _Entry(_probe_bourg1, {"s": 0.0, "b": 5 / 8}),
    "bourg2": _Entry(_probe_bourg2, {"s": 0.0, "b": 5 / 8}),
    "bourg3": _Entry(_probe_bourg3, {"s": 0.0, "b": 3 / 8, "b_prime": 0.0, "T": 0.5}),
    "bourg4": _Entry(_probe_bourg4, {"s": 0.0, "b": 5 / 8}),
    "prodd1": _Entry(_probe_prodd1, {"b": 3 / 8}),
    "dualbourg": _Entry(_probe_dualbourg, {"b": 3 / 8}),
    "prodd3": _Entry(_probe_prodd3, {"b": 3 / 8, "s1": (0.0, 0.5)}, copies=3),
}


@dataclass
class ProbeReport:
    name: str
    exponents: dict
    tau_list: list
    per_tau_max_ratio: list
    ratios: list = field(repr=False)
    verdict: str = ""

    @property
    def max_ratio(self) -> float:
        return max(self.per_tau_max_ratio)

    @property
    def growth(self) -> float:
        """Max ratio at the smallest tau over max ratio at the largest tau."""
        order = np.argsort(self.tau_list)
        return self.per_tau_max_ratio[order[0]] / self.per_tau_max_ratio[order[-1]]

    def to_json(self) -> str:
        d = asdict(self)
        d.pop("ratios")
        return json.dumps(d)


def inequality_probe(name: str, ensemble: Ensemble | None = None, **overrides) -> ProbeReport:
    """Run catalog probe ``name`` over ``ensemble``.

    ``overrides`` replace exponents of the catalog entry (e.g. ``b_prime`` for
    ``embdisc1``).
    """
    if name not in CATALOG:
        raise ParameterError(f"unknown probe {name!r}; known: {sorted(CATALOG)}")
    ens = ensemble or Ensemble()
    ens.validate()
    entry = CATALOG[name]
    unknown = set(overrides) - set(entry.exponents)
    if unknown:
        raise ParameterError(f"probe {name} has no exponents {sorted(unknown)}")
    ex = {**entry.exponents, **overrides}
    ratios = []
    for tau in ens.tau_list:
        row = []
        for j in range(ens.count):
            series = draw_series(ens, j, tau, entry.copies)
            arg = series if entry.copies > 1 else series[0]
            # sigma-grid refinement is verified on the first sample of each tau
            with _quadrature_check(j == 0):
                lhs, rhs = entry.func(arg, tau, ex)
            row.append(lhs / rhs)
        ratios.append(row)
    per_tau = [float(max(r)) for r in ratios]
    report = ProbeReport(name, _jsonable(ex), [float(t) for t in ens.tau_list], per_tau, ratios)
    report.verdict = "bounded" if report.growth <= GROWTH_LIMIT else "growing"
    return report


def _jsonable(ex):
    return {k: list(v) if isinstance(v, tuple) else v for k, v in ex.items()}

