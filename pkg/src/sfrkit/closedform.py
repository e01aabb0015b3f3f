"""Exact solutions of the frequency-response ODE for ramp and lag PFR.

The underlying model is the linear first-order ODE

    d(df)/dt + D'/(2H) * df = (p(t) - P_cont) / (2H)

with df(0) = 0. For a lag response p(t) = PFR*(1 - exp(-t/tau)) the solution
is exact for all time; for a ramp response p(t) = R*t it is exact only while
the ramp is still running (t <= t_r), because the expression never saturates
the ramp. That deficiency is intentional here: the numerical oracle saturates,
so the divergence is observable.

Ratios used throughout the nadir algebra:

    K = P_cont / PFR, A = D'*tau / (2H), B = 1 + K*(A - 1), C = A / (A - 1)

An interior nadir exists iff B > 0; otherwise the deviation decays
monotonically toward its settling value ("asymptotic" regime).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchError, InvalidInputError
from .model import FrequencyTrace, LagBand, RampBand, SystemConditions, _as_times, _ret

__all__ = [
    "INTERIOR_MINIMUM",
    "ASYMPTOTIC",
    "NadirResult",
    "ramp_delta_f",
    "multi_ramp_delta_f",
    "lag_delta_f",
    "multi_lag_delta_f",
    "nadir_solvable",
    "lag_nadir_time",
    "lag_nadir_time_from_ratios",
    "lag_nadir_deviation",
    "nadir_shape_factor",
    "asymptotic_nadir",
    "max_rocof",
    "lag_nadir",
    "trace",
]

# relative guard for the removable singularities D'*tau = 2H (i.e. A = 1)
REL_EPS = 1e-9
# interior nadirs require B strictly positive; at B = 0 the nadir time is infinite
B_EPS = 1e-9

INTERIOR_MINIMUM = "interior_minimum"
ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class NadirResult:
    """Nadir classification plus the one quantity that never depends on it."""

    kind: str                  # INTERIOR_MINIMUM or ASYMPTOTIC
    t_nadir: float | None      # s; None in the asymptotic regime
    delta_f_nadir: float       # Hz
    max_rocof: float           # Hz/s, always -P_cont/(2H) at t = 0


def _require_damping(sc: SystemConditions) -> float:
    dprime = sc.dprime
    if not dprime > 0:
        raise InvalidInputError("D' = d * p_load must be > 0 for this expression")
    return dprime


def multi_ramp_delta_f(sc: SystemConditions, bands, t):
    """Deviation under any number of ramp bands (no saturation), Hz.

    Valid only up to the shortest ramp time among the bands.
    """
    if not bands:
        raise InvalidInputError("at least one ramp band is required")
    dprime = _require_damping(sc)
    h = sc.h
    arr, scalar = _as_times(t)
    # fixed accumulation order keeps the output identical under permutation
    bands = sorted(bands, key=lambda b: (b.t_r, b.pfr))
    rate_sum = sum(b.rate for b in bands)
    decay = 1.0 - np.exp(-dprime * arr / (2.0 * h))
    out = rate_sum * arr / dprime - (2.0 * rate_sum * h / dprime**2 + sc.p_cont / dprime) * decay
    return _ret(out, scalar)


def ramp_delta_f(sc: SystemConditions, band: RampBand, t):
    """Deviation under a single unsaturated ramp band, Hz (exact for t <= t_r)."""
    return multi_ramp_delta_f(sc, [band], t)


def _lag_band_term(dprime, h, band: LagBand, arr, decay_exp):
    """The band-specific transient of the lag solution (to be subtracted)."""
    denom = dprime * band.tau - 2.0 * h
    if abs(denom) <= REL_EPS * 2.0 * h:
        # removable singularity at D'*tau = 2H
        return band.pfr * arr * decay_exp / (2.0 * h)
    return band.pfr * band.tau / denom * (np.exp(-arr / band.tau) - decay_exp)


def multi_lag_delta_f(sc: SystemConditions, bands, t):
    """Deviation under any number of lag bands, Hz (exact for all time)."""
    if not bands:
        raise InvalidInputError("at least one lag band is required")
    dprime = _require_damping(sc)
    h = sc.h
    arr, scalar = _as_times(t)
    decay_exp = np.exp(-dprime * arr / (2.0 * h))
    # fixed accumulation order keeps the output identical under permutation
    bands = sorted(bands, key=lambda b: (b.tau, b.pfr))
    pfr_sum = sum(b.pfr for b in bands)
    out = (pfr_sum - sc.p_cont) / dprime * (1.0 - decay_exp)
    for band in bands:
        out = out - _lag_band_term(dprime, h, band, arr, decay_exp)
    return _ret(out, scalar)


def lag_delta_f(sc: SystemConditions, band: LagBand, t):
    """Deviation under a single lag band, Hz (exact for all time)."""
    return multi_lag_delta_f(sc, [band], t)


def _ratios(sc: SystemConditions, band: LagBand):
    """K, A for a single lag band; validates signs and damping."""
    dprime = _require_damping(sc)
    if band.pfr == 0:
        raise InvalidInputError("nadir ratios are undefined for a zero-magnitude band")
    k = sc.p_cont / band.pfr
    if k < 0:
        raise InvalidInputError("band magnitude must share the sign of p_cont")
    a = dprime * band.tau / (2.0 * sc.h)
    return k, a


def nadir_solvable(sc: SystemConditions, band: LagBand) -> bool:
    """True iff the deviation has an interior stationary minimum (B > 0)."""
    k, a = _ratios(sc, band)
    return 1.0 + k * (a - 1.0) > B_EPS


def lag_nadir_time(sc: SystemConditions, band: LagBand) -> float:
    """Time of the interior nadir, s.

    Evaluates ln[1 + (P_cont/PFR)(D'tau/2H - 1)] / (D'/2H - 1/tau), with the
    limit K*tau at A = 1.
    """
    k, a = _ratios(sc, band)
    kam1 = k * (a - 1.0)
    if 1.0 + kam1 <= B_EPS:
        raise BranchError(
            "no interior nadir for these inputs; use asymptotic_nadir for the settling value"
        )
    if abs(a - 1.0) <= REL_EPS:
        return k * band.tau
    return math.log1p(kam1) / (sc.dprime / (2.0 * sc.h) - 1.0 / band.tau)


def lag_nadir_time_from_ratios(sc: SystemConditions, band: LagBand) -> float:
    """Algebraically equivalent nadir time tau * ln(B) / (A - 1), s."""
    k, a = _ratios(sc, band)
    kam1 = k * (a - 1.0)
    if 1.0 + kam1 <= B_EPS:
        raise BranchError(
            "no interior nadir for these inputs; use asymptotic_nadir for the settling value"
        )
    if abs(a - 1.0) <= REL_EPS:
        return k * band.tau
    return band.tau * math.log1p(kam1) / (a - 1.0)


def nadir_shape_factor(k: float, a: float) -> float:
    """(C + K - 1) B^-C - C B^(-C/A) - K + 1 for B > 0; limit 1 - K - e^-K at A = 1.

    Multiplying by PFR/D' gives the nadir deviation; it is negative whenever
    K > 0 (under- and over-frequency alike, by the sign convention).
    """
    em1 = a - 1.0
    kam1 = k * em1
    b = 1.0 + kam1
    if b <= B_EPS:
        raise BranchError("shape factor undefined: inputs are in the asymptotic regime")
    if abs(em1) <= REL_EPS:
        return 1.0 - k - math.exp(-k)
    ln_b = math.log1p(kam1)
    c = a / em1
    return (c + k - 1.0) * math.exp(-c * ln_b) - c * math.exp(-ln_b / em1) - k + 1.0


def lag_nadir_deviation(sc: SystemConditions, band: LagBand) -> float:
    """Deviation at the interior nadir, Hz.

    Identical (analytically) to lag_delta_f evaluated at lag_nadir_time.
    """
    k, a = _ratios(sc, band)
    try:
        factor = nadir_shape_factor(k, a)
    except BranchError:
        raise BranchError(
            "no interior nadir for these inputs; use asymptotic_nadir for the settling value"
        ) from None
    return band.pfr / sc.dprime * factor


def asymptotic_nadir(sc: SystemConditions, total_pfr: float) -> float:
    """Settling deviation (PFR - P_cont) / D', Hz."""
    dprime = _require_damping(sc)
    return (total_pfr - sc.p_cont) / dprime


def max_rocof(sc: SystemConditions) -> float:
    """Largest instantaneous rate of change of frequency, at t = 0, Hz/s."""
    return -sc.p_cont / (2.0 * sc.h)


def lag_nadir(sc: SystemConditions, band: LagBand) -> NadirResult:
    """Classify and evaluate the nadir for a single lag band."""
    if nadir_solvable(sc, band):
        return NadirResult(
            kind=INTERIOR_MINIMUM,
            t_nadir=lag_nadir_time(sc, band),
            delta_f_nadir=lag_nadir_deviation(sc, band),
            max_rocof=max_rocof(sc),
        )
    return NadirResult(
        kind=ASYMPTOTIC,
        t_nadir=None,
        delta_f_nadir=asymptotic_nadir(sc, band.pfr),
        max_rocof=max_rocof(sc),
    )


def trace(sc: SystemConditions, bands, t_end: float, dt: float, kind: str) -> FrequencyTrace:
    """Sample the closed-form deviation on t = 0, dt, ..., round(t_end/dt)*dt."""
    if not dt > 0 or not t_end > 0 or t_end < dt:
        raise InvalidInputError(f"invalid trace grid: t_end={t_end}, dt={dt}")
    n = int(round(t_end / dt))
    times = np.arange(n + 1) * dt
    if kind == "lag":
        samples = multi_lag_delta_f(sc, bands, times)
    elif kind == "ramp":
        samples = multi_ramp_delta_f(sc, bands, times)
    else:
        raise InvalidInputError(f"kind must be 'lag' or 'ramp', got {kind!r}")
    return FrequencyTrace(t0=0.0, dt=dt, samples=samples)
