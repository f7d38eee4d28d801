"""Convergence experiments: reference runs, step-size ladders, order fits.

Errors are measured at the final time ``T`` in the sequence L^2 norm against
the cutoff reference ``Pi_tau u_ref(T)``, where ``u_ref`` comes from the
unfiltered Strang scheme with a much smaller step.
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import stats

from .errors import DivergenceError, ParameterError
from .initial_data import RNG_NAME, RoughDataSpec, rough_field
from .integrators import Scheme, StepperConfig, evolve
from .spectral import SpectralField, project_pi_tau, sobolev_norm

__all__ = [
    "ExperimentConfig",
    "OrderFit",
    "SchemeResult",
    "ConvergenceReport",
    "load_config",
    "initial_field",
    "reference_solution",
    "reference_change",
    "measure_error",
    "fit_order",
    "run_ladder",
    "projection_gap",
]

log = logging.getLogger(__name__)

# errors below this fraction of the reference norm count as roundoff
EXACT_FLOOR = 1e-11
# a reference is trusted when halving its step moves it by less than this
# fraction of the smallest coarsest-rung error
GATE_FRACTION = 1e-3


@dataclass(frozen=True)
class ExperimentConfig:
    """Ladder ``tau = T 2^{-m}`` for ``m = tau_max_exp .. tau_min_exp``."""

    s: float = 0.5
    seed: int = 1
    K: int = 1024
    T: float = 1.0
    mu: int = -1
    schemes: tuple = ("FilteredLie", "FilteredStrang")
    tau_max_exp: int = 4
    tau_min_exp: int = 12
    tau_ref_exp: int = 16
    normalize_to: float = 1.0
    reference_scheme: str = "Strang"
    max_over_time: bool = False

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(Scheme.parse(x).value for x in self.schemes))
        Scheme.parse(self.reference_scheme)
        if self.mu not in (-1, 1):
            raise ParameterError(f"mu must be +1 or -1, got {self.mu}")
        if not self.T > 0:
            raise ParameterError("T must be positive")
        if not 0 <= self.tau_max_exp < self.tau_min_exp:
            raise ParameterError("need 0 <= tau_max_exp < tau_min_exp")
        if self.tau_min_exp - self.tau_max_exp < 2:
            raise ParameterError("the ladder needs at least three rungs")
        if self.tau_ref_exp < self.tau_min_exp + 4:
            raise ParameterError("tau_ref must be at most min(tau_ladder)/16")
        if self.T * 2.0**-self.tau_max_exp > 1:
            raise ParameterError("ladder step sizes must not exceed 1")

    @property
    def tau_ladder(self) -> list:
        """Step sizes, largest first."""
        return [self.T * 2.0**-m for m in range(self.tau_max_exp, self.tau_min_exp + 1)]

    @property
    def tau_ref(self) -> float:
        return self.T * 2.0**-self.tau_ref_exp

    @property
    def data_spec(self) -> RoughDataSpec:
        return RoughDataSpec(self.s, self.seed, self.K, self.normalize_to)

    def metadata(self) -> dict:
        d = asdict(self)
        d["schemes"] = list(self.schemes)
        d["tau_ref"] = self.tau_ref
        d["rng"] = RNG_NAME
        return d


CONFIG_KEYS = {
    "s": float,
    "seed": int,
    "K": int,
    "T": float,
    "mu": int,
    "schemes": lambda v: tuple(x.strip() for x in v.split(",") if x.strip()),
    "tau_min_exp": int,
    "tau_max_exp": int,
    "tau_ref_exp": int,
    "normalize_to": float,
    "reference_scheme": str,
    "max_over_time": lambda v: v.strip().lower() in ("1", "true", "yes", "on"),
}


def load_config(text: str) -> ExperimentConfig:
    """Parse flat ``key = value`` lines (``#`` comments allowed)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    parser.read_string("[experiment]\n" + text)
    values = {}
    for key, raw in parser["experiment"].items():
        if key not in CONFIG_KEYS:
            raise ParameterError(f"unknown config key {key!r}; known: {sorted(CONFIG_KEYS)}")
        values[key] = CONFIG_KEYS[key](raw)
    return ExperimentConfig(**values)


def initial_field(cfg: ExperimentConfig) -> SpectralField:
    return rough_field(cfg.data_spec)


def _final(f0, scheme, mu, tau, n, filter_tau=None) -> SpectralField:
    cfg = StepperConfig(scheme, mu, tau, filter_tau)
    return evolve(f0, cfg, n, record=False)[0]


def reference_solution(cfg: ExperimentConfig, f0: SpectralField | None = None, tau_ref=None, T=None) -> SpectralField:
    """State at time ``T`` (default ``cfg.T``) of the reference scheme with the fine step ``tau_ref``."""
    f0 = initial_field(cfg) if f0 is None else f0
    tau_ref = cfg.tau_ref if tau_ref is None else tau_ref
    T = cfg.T if T is None else T
    if T < 0 or abs(T / tau_ref - round(T / tau_ref)) > 1e-9:
        raise ParameterError(f"T={T} is not a nonnegative multiple of tau_ref={tau_ref}")
    n = int(round(T / tau_ref))
    return _final(f0, cfg.reference_scheme, cfg.mu, tau_ref, n)


def reference_change(cfg: ExperimentConfig, f0=None, u_ref=None) -> float:
    """L^2 change of the reference when its step is halved."""
    f0 = initial_field(cfg) if f0 is None else f0
    u_ref = reference_solution(cfg, f0) if u_ref is None else u_ref
    finer = reference_solution(cfg, f0, cfg.tau_ref / 2)
    return sobolev_norm(u_ref - finer)


def measure_error(u_ref: SpectralField, u_num: SpectralField, tau: float) -> float:
    """``|| Pi_tau u_ref - u_num ||`` in the sequence L^2 norm."""
    if u_ref.num_modes != u_num.num_modes:
        raise ParameterError(f"mode counts differ: {u_ref.num_modes} vs {u_num.num_modes}")
    return sobolev_norm(project_pi_tau(u_ref, tau) - u_num)


@dataclass(frozen=True)
class OrderFit:
    slope: float
    stderr: float
    intercept: float
    n_points: int
    trimmed: int = 0
    flag: str = ""

    @property
    def degenerate(self) -> bool:
        return self.flag.startswith("degenerate")


def fit_order(points, trim: bool = False) -> OrderFit:
    """Least-squares slope of ``log(error)`` against ``log(tau)``.

    With ``trim`` (and at least five points), the two largest step sizes are
    dropped when either of them is further from the fitted line than twice
    the median residual.
    """
    pts = sorted(((float(t), float(e)) for t, e in points), reverse=True)
    if len(pts) < 3:
        raise ParameterError("an order fit needs at least three points")
    taus = np.array([p[0] for p in pts])
    errs = np.array([p[1] for p in pts])
    if np.any(taus <= 0) or not np.all(np.isfinite(errs)) or np.any(errs <= 0):
        raise ParameterError("step sizes and errors must be positive")
    if np.ptp(np.log(errs)) == 0:
        return OrderFit(0.0, 0.0, float(np.log(errs[0])), len(pts), 0, "degenerate: constant")
    x, y = np.log(taus), np.log(errs)
    fit = stats.linregress(x, y)
    drop = 0
    if trim and len(pts) >= 5:
        resid = np.abs(y - (fit.intercept + fit.slope * x))
        cap = 2.0 * np.median(resid)
        if max(resid[0], resid[1]) > cap:
            drop = 2
            fit = stats.linregress(x[drop:], y[drop:])
    stderr = float(fit.stderr) if len(pts) - drop > 2 else 0.0
    return OrderFit(float(fit.slope), stderr, float(fit.intercept), len(pts) - drop, drop)


@dataclass
class SchemeResult:
    scheme: str
    taus: list
    errors: list
    failures: dict = field(default_factory=dict)
    fit: OrderFit | None = None

    def points(self):
        return [(t, e) for t, e in zip(self.taus, self.errors) if e is not None]


@dataclass
class ConvergenceReport:
    results: dict
    metadata: dict
    reference_change: float | None = None
    gate_threshold: float | None = None

    @property
    def gate_passed(self) -> bool | None:
        if self.reference_change is None:
            return None
        return self.reference_change <= self.gate_threshold

    def slope(self, scheme) -> float:
        return self.results[Scheme.parse(scheme).value].fit.slope

    def to_dict(self) -> dict:
        out = {
            "metadata": self.metadata,
            "reference_change": self.reference_change,
            "gate_threshold": self.gate_threshold,
            "gate_passed": self.gate_passed,
            "schemes": {},
        }
        for name, r in self.results.items():
            out["schemes"][name] = {
                "taus": r.taus,
                "errors": r.errors,
                "failures": {str(k): v for k, v in r.failures.items()},
                "fitted_slope": None if r.fit is None else r.fit.slope,
                "slope_stderr": None if r.fit is None else r.fit.stderr,
                "fit": None if r.fit is None else asdict(r.fit),
            }
        return out

    def to_json(self) -> str:
        return json.dumps(_finite(self.to_dict()), indent=2)

    def to_csv(self) -> str:
        names = list(self.results)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["tau"] + names)
        taus = self.results[names[0]].taus
        for i, tau in enumerate(taus):
            row = [repr(tau)]
            for n in names:
                e = self.results[n].errors[i]
                row.append("" if e is None else repr(e))
            writer.writerow(row)
        return buf.getvalue()


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _rung(args):
    f0, scheme, mu, tau, n, u_ref, max_over_time, ref_stride, ref_samples = args
    cfg = StepperConfig(scheme, mu, tau)
    try:
        if not max_over_time:
            u = evolve(f0, cfg, n, record=False)[0]
            return measure_error(u_ref, u, tau), None
        series = evolve(f0, cfg, n, record=True)
        worst = 0.0
        for j, u in enumerate(series):
            ref = SpectralField(ref_samples[j * ref_stride])
            worst = max(worst, measure_error(ref, u, tau))
        return worst, None
    except DivergenceError as exc:
        return None, exc.step


def run_ladder(
    cfg: ExperimentConfig,
    f0: SpectralField | None = None,
    u_ref: SpectralField | None = None,
    gate: bool = True,
    error_hook=None,
    trim: bool = True,
    workers: int = 1,
) -> ConvergenceReport:
    """Errors of every scheme on every rung of the ladder, plus order fits.

    ``error_hook(scheme, tau)`` replaces the measurement (for testing the
    fitting path without running the integrators).  A divergent rung is
    recorded in ``failures`` and skipped by the fit.
    """
    taus = cfg.tau_ladder
    results = {}
    meta = cfg.metadata()
    if error_hook is not None:
        for name in cfg.schemes:
            errs = [float(error_hook(name, t)) for t in taus]
            results[name] = SchemeResult(name, taus, errs)
            results[name].fit = fit_order(list(zip(taus, errs)), trim=trim)
        return ConvergenceReport(results, meta)

    f0 = initial_field(cfg) if f0 is None else f0
    ref_samples, stride_base = None, 1
    if cfg.max_over_time:
        stride_base = 2 ** (cfg.tau_ref_exp - cfg.tau_min_exp)
        ref_cfg = StepperConfig(cfg.reference_scheme, cfg.mu, cfg.tau_ref)
        n_ref = 2**cfg.tau_ref_exp
        ref_samples = evolve(f0, ref_cfg, n_ref, record=True, record_every=stride_base).as_array()
        u_ref = SpectralField(ref_samples[-1])
    elif u_ref is None:
        u_ref = reference_solution(cfg, f0)
    ref_norm = sobolev_norm(u_ref)

    jobs = []
    for name in cfg.schemes:
        for m, tau in zip(range(cfg.tau_max_exp, cfg.tau_min_exp + 1), taus):
            stride = 2 ** (cfg.tau_min_exp - m)
            jobs.append((f0, name, cfg.mu, tau, 2**m, u_ref, cfg.max_over_time, stride, ref_samples))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            outcomes = list(pool.map(_rung, jobs))
    else:
        outcomes = [_rung(job) for job in jobs]

    it = iter(outcomes)
    for name in cfg.schemes:
        r = SchemeResult(name, taus, [])
        for tau in taus:
            err, failed_step = next(it)
            r.errors.append(err)
            if failed_step is not None:
                r.failures[tau] = failed_step
                log.warning("%s diverged at step %d for tau=%g", name, failed_step, tau)
        pts = r.points()
        if pts and max(e for _, e in pts) <= EXACT_FLOOR * max(ref_norm, 1e-300):
            r.fit = OrderFit(float("nan"), float("nan"), float("nan"), len(pts), 0, "degenerate: exact")
        elif len(pts) >= 3:
            r.fit = fit_order(pts, trim=trim)
        results[name] = r

    report = ConvergenceReport(results, meta)
    if gate:
        coarse = [r.errors[0] for r in results.values() if r.errors and r.errors[0] is not None]
        report.reference_change = reference_change(cfg, f0, u_ref)
        report.gate_threshold = GATE_FRACTION * min(coarse) if coarse else 0.0
    return report


def projection_gap(cfg: ExperimentConfig, f0=None, u_ref=None, trim: bool = False):
    """Gap between the full and the projected equation at time ``T``.

    The projected equation (every nonlinear stage wrapped in ``Pi_tau``) is
    integrated with the filtered Strang scheme at the fine step ``tau_ref``;
    its final state is compared with the unprojected reference.

    Returns ``(points, fit)`` with ``points = [(tau, gap), ...]``; ``fit`` is
    None when fewer than three gaps are positive.
    """
    f0 = initial_field(cfg) if f0 is None else f0
    u_ref = reference_solution(cfg, f0) if u_ref is None else u_ref
    n = 2**cfg.tau_ref_exp
    points = []
    for tau in cfg.tau_ladder:
        try:
            u_tau = _final(f0, "FilteredStrang", cfg.mu, cfg.tau_ref, n, filter_tau=tau)
            points.append((tau, sobolev_norm(u_ref - u_tau)))
        except DivergenceError as exc:
            log.warning("projected run diverged at step %d for tau=%g", exc.step, tau)
            points.append((tau, None))
    usable = [(t, g) for t, g in points if g is not None and g > 0]
    fit = fit_order(usable, trim=trim) if len(usable) >= 3 else None
    return points, fit


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **kw)
