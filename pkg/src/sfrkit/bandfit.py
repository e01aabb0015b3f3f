"""Two-band lag PFR reduced to a single equivalent band, plus accuracy maps.

A response p(t) = PFR1*(1 - exp(-t/tau1)) + PFR2*(1 - exp(-t/tau2)) has no
closed-form nadir, so it is approximated by one lag band whose parameters are
fitted by damped nonlinear least squares. Over a grid of magnitudes the fitted
magnitude stays close to PFR1 + PFR2 while the fitted time constant follows

    tau_eq = a * (1 - exp(-b * PFR2/PFR1)) + tau1

whose coefficients (a, b) are themselves fitted. The canonical fast/standard
pair tau1 = 0.4 s, tau2 = 2.0 s ships with pre-fitted coefficients.

Approximation quality is reported as the mean absolute percentage error
between the exact and equivalent response curves, per grid cell.
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import FitError, InvalidInputError
from .leastsq import levenberg_marquardt
from .model import FrequencyTrace, LagBand

__all__ = [
    "TwoBandPfr",
    "EquivalentBand",
    "TauSurfaceModel",
    "MapeCell",
    "MapeReport",
    "TauSweepCell",
    "TauSweepReport",
    "CANONICAL_SURFACE",
    "DEFAULT_PFR_GRID",
    "DEFAULT_SWEEP_PFR_GRID",
    "DEFAULT_TAU1_RANGE",
    "DEFAULT_TAU2_RANGE",
    "default_fit_times",
    "fit_equivalent_band",
    "build_tau_surface",
    "equivalent_tau",
    "canonical_equivalent",
    "mape",
    "mape_map",
    "mape_tau_sweep",
]

# near-zero samples are excluded from MAPE: the exact curve starts at 0
MAPE_EXCLUSION_REL = 1e-6
# fitted magnitudes should track PFR1 + PFR2; warn when they drift past this
PLANE_DEV_WARN = 0.01

DEFAULT_PFR_GRID = tuple(float(v) for v in range(10, 201, 10))        # MW
DEFAULT_SWEEP_PFR_GRID = tuple(float(v) for v in range(20, 201, 20))  # MW
DEFAULT_TAU1_RANGE = (0.2, 0.4, 0.6, 0.8, 1.0)                        # s
DEFAULT_TAU2_RANGE = (1.0, 1.1, 1.5, 2.0, 2.5, 3.0)                   # s
_FIT_DT = 0.01  # s


@dataclass(frozen=True)
class TwoBandPfr:
    """A fast band and a standard band; band1 is the faster by convention."""

    band1: LagBand
    band2: LagBand

    def __post_init__(self):
        if self.band1.tau > self.band2.tau:
            raise InvalidInputError(
                f"band1 must be the faster band: tau1={self.band1.tau} > tau2={self.band2.tau}"
            )
        if self.band1.pfr < 0 or self.band2.pfr < 0:
            raise InvalidInputError("band magnitudes must be >= 0 for fitting")

    def value(self, t):
        e1 = 1.0 - np.exp(-np.asarray(t, dtype=float) / self.band1.tau)
        e2 = 1.0 - np.exp(-np.asarray(t, dtype=float) / self.band2.tau)
        return self.band1.pfr * e1 + self.band2.pfr * e2


@dataclass(frozen=True)
class EquivalentBand:
    pfr_eq: float                     # MW
    tau_eq: float                     # s
    fit_residual: float | None = None  # sum of squared residuals, MW^2

    def __post_init__(self):
        if self.pfr_eq < 0:
            raise InvalidInputError(f"pfr_eq must be >= 0, got {self.pfr_eq}")
        if not self.tau_eq > 0:
            raise InvalidInputError(f"tau_eq must be > 0, got {self.tau_eq}")

    def band(self) -> LagBand:
        return LagBand(pfr=self.pfr_eq, tau=self.tau_eq)


@dataclass(frozen=True)
class TauSurfaceModel:
    """Coefficients of tau_eq = a*(1 - exp(-b*PFR2/PFR1)) + tau1."""

    a: float                            # s
    b: float                            # dimensionless
    tau1: float                         # s
    tau2: float                         # s, kept for the PFR1 = 0 passthrough
    rms_residual: float | None = None   # s
    pfr_plane_dev: float | None = None  # max relative drift of pfr_eq from PFR1+PFR2

    def __post_init__(self):
        if self.a < 0:
            raise InvalidInputError(f"a must be >= 0, got {self.a}")
        if not self.b > 0:
            raise InvalidInputError(f"b must be > 0, got {self.b}")
        if not 0 < self.tau1 <= self.tau2:
            raise InvalidInputError("need 0 < tau1 <= tau2")


# coefficients fitted once for the canonical fast/standard bands (0.4 s, 2.0 s)
CANONICAL_SURFACE = TauSurfaceModel(a=1.3141629, b=0.63075533, tau1=0.4, tau2=2.0)


def default_fit_times(tau2: float) -> np.ndarray:
    """Sampling grid for curve fits and accuracy maps: [0, max(30, 5*tau2)] s."""
    n = int(round(max(30.0, 5.0 * tau2) / _FIT_DT))
    return np.arange(n + 1) * _FIT_DT


def _check_times(times: np.ndarray, tau2: float) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 2:
        raise InvalidInputError("time grid must contain at least two samples")
    if times[0] != 0.0 or times[-1] < 5.0 * tau2:
        raise InvalidInputError(f"time grid must span [0, {5.0 * tau2}] for tau2={tau2}")
    return times


def fit_equivalent_band(tb: TwoBandPfr, times=None) -> EquivalentBand:
    """Fit one lag band to the sum of two by damped least squares.

    The residual in tau is unimodal over the bounded box, so a coarse scan of
    candidate time constants (with the magnitude solved analytically at each)
    supplies the start; the result does not depend on that choice.
    """
    p_total = tb.band1.pfr + tb.band2.pfr
    if not p_total > 0:
        raise InvalidInputError("total PFR must be > 0 to fit an equivalent band")
    tau1, tau2 = tb.band1.tau, tb.band2.tau
    t = default_fit_times(tau2) if times is None else _check_times(times, tau2)
    y = tb.value(t)

    cands = np.unique(np.concatenate([np.geomspace(tau1 / 2.0, 2.0 * tau2, 25), [tau1, tau2]]))
    best = (np.inf, p_total, tau1)
    for tau_c in cands:
        shape = 1.0 - np.exp(-t / tau_c)
        denom = float(shape @ shape)
        pfr_c = max(float(shape @ y) / denom, 0.0) if denom > 0 else 0.0
        res = pfr_c * shape - y
        ssr = float(res @ res)
        if ssr < best[0]:
            best = (ssr, pfr_c, tau_c)

    def model_jac(x):
        pfr, tau = x
        e = np.exp(-t / tau)
        return pfr * (1.0 - e), np.stack([1.0 - e, -pfr * t / tau**2 * e], axis=1)

    fit = levenberg_marquardt(
        model_jac,
        y,
        x0=[best[1], best[2]],
        lower=[0.0, tau1 / 2.0],
        upper=[np.inf, 2.0 * tau2],
    )
    if not fit.converged:
        raise FitError(
            f"equivalent-band fit did not converge in {fit.iterations} iterations",
            best_params=fit.params,
            best_cost=fit.cost,
        )
    return EquivalentBand(pfr_eq=float(fit.params[0]), tau_eq=float(fit.params[1]),
                          fit_residual=fit.cost)


def build_tau_surface(tau1: float, tau2: float, pfr_grid=None, times=None) -> TauSurfaceModel:
    """Fit the tau model to equivalent bands over a magnitude grid.

    Grid cells with PFR1 = 0 have an undefined magnitude ratio and are skipped
    with a warning. The fitted magnitudes are checked against the PFR1 + PFR2
    plane; drift beyond 1% is reported as a warning and recorded on the model.
    """
    grid = np.asarray(DEFAULT_PFR_GRID if pfr_grid is None else pfr_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0 or np.any(grid < 0):
        raise InvalidInputError("pfr grid must be a non-empty sequence of magnitudes >= 0")
    t = default_fit_times(tau2) if times is None else _check_times(times, tau2)

    ratios, tau_eqs, plane_dev = [], [], 0.0
    for p1 in grid:
        if p1 == 0.0:
            warnings.warn("skipping PFR1 = 0 cells: magnitude ratio is undefined")
            continue
        for p2 in grid:
            eq = fit_equivalent_band(
                TwoBandPfr(LagBand(p1, tau1), LagBand(p2, tau2)), times=t
            )
            ratios.append(p2 / p1)
            tau_eqs.append(eq.tau_eq)
            plane_dev = max(plane_dev, abs(eq.pfr_eq - (p1 + p2)) / (p1 + p2))
    if not ratios:
        raise InvalidInputError("pfr grid left no usable cells")
    if plane_dev > PLANE_DEV_WARN:
        warnings.warn(
            f"fitted magnitudes drift {plane_dev:.2%} from the PFR1+PFR2 plane"
        )

    r = np.asarray(ratios)
    y = np.asarray(tau_eqs)

    def model_jac(x):
        a, b = x
        e = np.exp(-b * r)
        return a * (1.0 - e) + tau1, np.stack([1.0 - e, a * r * e], axis=1)

    fit = levenberg_marquardt(
        model_jac,
        y,
        x0=[max(float(y.max()) - tau1, 0.0), 1.0],
        lower=[0.0, 1e-6],
        upper=[np.inf, 1e3],
    )
    if not fit.converged:
        raise FitError(
            f"tau-surface fit did not converge in {fit.iterations} iterations",
            best_params=fit.params,
            best_cost=fit.cost,
        )
    return TauSurfaceModel(
        a=float(fit.params[0]),
        b=float(fit.params[1]),
        tau1=tau1,
        tau2=tau2,
        rms_residual=float(np.sqrt(fit.cost / len(y))),
        pfr_plane_dev=plane_dev,
    )


def equivalent_tau(model: TauSurfaceModel, pfr1: float, pfr2: float,
                   single_band_passthrough: bool = True) -> float:
    """Evaluate the tau model, s.

    PFR1 = 0 falls outside the model's ratio domain: by default the standard
    band is passed through exactly (tau2); disabling the passthrough returns
    the model's large-ratio asymptote a + tau1 instead.
    """
    if pfr1 < 0 or pfr2 < 0:
        raise InvalidInputError("band magnitudes must be >= 0")
    if pfr1 == 0:
        if pfr2 == 0:
            raise InvalidInputError("at least one band magnitude must be > 0")
        return model.tau2 if single_band_passthrough else model.a + model.tau1
    return model.a * (1.0 - np.exp(-model.b * pfr2 / pfr1)) + model.tau1


def canonical_equivalent(pfr1: float, pfr2: float, model: TauSurfaceModel = CANONICAL_SURFACE,
                         single_band_passthrough: bool = True) -> EquivalentBand:
    """Equivalent band with magnitude PFR1 + PFR2 and the model's tau."""
    tau = equivalent_tau(model, pfr1, pfr2, single_band_passthrough)
    return EquivalentBand(pfr_eq=pfr1 + pfr2, tau_eq=float(tau))


def _mape_arrays(exact: np.ndarray, approx: np.ndarray) -> float:
    peak = float(np.abs(exact).max())
    mask = np.abs(exact) >= MAPE_EXCLUSION_REL * peak if peak > 0 else np.zeros(len(exact), bool)
    if not mask.any():
        raise InvalidInputError("MAPE undefined: every sample was excluded as near-zero")
    return float(np.mean(np.abs((exact[mask] - approx[mask]) / exact[mask])) * 100.0)


def mape(exact: FrequencyTrace, approx: FrequencyTrace) -> float:
    """Mean absolute percentage error between two traces on the same grid.

    Samples where the exact value is below 1e-6 of its peak magnitude are
    excluded; the exact curve passes through zero at t = 0 by construction.
    """
    if (exact.t0, exact.dt, len(exact)) != (approx.t0, approx.dt, len(approx)):
        raise InvalidInputError("traces must share t0, dt and length")
    return _mape_arrays(exact.samples, approx.samples)


@dataclass(frozen=True)
class MapeCell:
    pfr1: float
    pfr2: float
    mape_pct: float


@dataclass(frozen=True)
class MapeReport:
    cells: tuple
    mean_pct: float
    max_pct: float


def mape_map(tau1: float, tau2: float, pfr_grid=None, model: TauSurfaceModel | None = None,
             times=None) -> MapeReport:
    """Per-cell MAPE between exact two-band and equivalent response curves."""
    grid = np.asarray(DEFAULT_PFR_GRID if pfr_grid is None else pfr_grid, dtype=float)
    if model is None:
        if (tau1, tau2) != (CANONICAL_SURFACE.tau1, CANONICAL_SURFACE.tau2):
            raise InvalidInputError(
                "no default surface model for these time constants; build one first"
            )
        model = CANONICAL_SURFACE
    t = default_fit_times(tau2) if times is None else _check_times(times, tau2)
    e1 = 1.0 - np.exp(-t / tau1)
    e2 = 1.0 - np.exp(-t / tau2)

    cells = []
    for p1 in grid:
        for p2 in grid:
            if p1 == 0 and p2 == 0:
                continue
            exact = p1 * e1 + p2 * e2
            eq = canonical_equivalent(p1, p2, model)
            approx = eq.pfr_eq * (1.0 - np.exp(-t / eq.tau_eq))
            cells.append(MapeCell(pfr1=float(p1), pfr2=float(p2),
                                  mape_pct=_mape_arrays(exact, approx)))
    if not cells:
        raise InvalidInputError("pfr grid left no usable cells")
    values = [c.mape_pct for c in cells]
    return MapeReport(cells=tuple(cells), mean_pct=float(np.mean(values)),
                      max_pct=float(np.max(values)))


@dataclass(frozen=True)
class TauSweepCell:
    tau1: float
    tau2: float
    mean_mape_pct: float
    max_mape_pct: float


@dataclass(frozen=True)
class TauSweepReport:
    cells: tuple
    mean_pct: float  # mean of the per-cell means
    max_pct: float   # max of the per-cell maxima


def _max_workers() -> int:
    raw = os.environ.get("SFRKIT_THREADS", "1")
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1


def _sweep_cell(args):
    tau1, tau2, grid = args
    model = build_tau_surface(tau1, tau2, pfr_grid=grid)
    report = mape_map(tau1, tau2, pfr_grid=grid, model=model)
    return TauSweepCell(tau1=tau1, tau2=tau2,
                        mean_mape_pct=report.mean_pct, max_mape_pct=report.max_pct)


def mape_tau_sweep(tau1_range=None, tau2_range=None, pfr_grid=None) -> TauSweepReport:
    """Rebuild the surface and map its accuracy for each (tau1, tau2) pair.

    Only pairs with tau2 >= tau1 are evaluated. Cells are independent; the
    SFRKIT_THREADS environment variable caps how many run concurrently, and
    the report ordering never depends on the schedule.
    """
    tau1s = DEFAULT_TAU1_RANGE if tau1_range is None else tuple(tau1_range)
    tau2s = DEFAULT_TAU2_RANGE if tau2_range is None else tuple(tau2_range)
    grid = DEFAULT_SWEEP_PFR_GRID if pfr_grid is None else pfr_grid
    jobs = [(t1, t2, grid) for t1 in tau1s for t2 in tau2s if t2 >= t1]
    if not jobs:
        raise InvalidInputError("tau ranges produced no cells with tau2 >= tau1")

    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_sweep_cell, jobs))
    else:
        cells = [_sweep_cell(job) for job in jobs]
    return TauSweepReport(
        cells=tuple(cells),
        mean_pct=float(np.mean([c.mean_mape_pct for c in cells])),
        max_pct=float(np.max([c.max_mape_pct for c in cells])),
    )
