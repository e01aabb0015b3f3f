"""Security calculators built on the closed-form nadir expressions.

Everything here works in the ratio space

    K = P_cont / PFR   (or a policy constant: minimum PFR as a share of the
                        largest contingency, e.g. 1/0.7)
    A = D' * tau / (2H)

so the results transfer between systems: the maximum allowable contingency is
f(A, K) * D' for a universal factor f. None of these expressions iterate --
A and K are independent of the contingency size under a fixed-K policy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .bandfit import TauSurfaceModel, equivalent_tau
from .closedform import B_EPS, REL_EPS, nadir_shape_factor
from .errors import BranchError, InvalidInputError
from .model import DerivedParams, SystemConditions

__all__ = [
    "NadirConstants",
    "SecurityPolicy",
    "SensitivityReport",
    "WEM_K_POLICY",
    "nadir_constants",
    "max_contingency",
    "universal_max_contingency_factor",
    "asymptotic_max_contingency",
    "min_effective_tau",
    "special_case_max_contingency",
    "sensitivity_pcont",
    "sensitivity_tau_bands",
    "sensitivity_pcont_bands",
    "sensitivity_report",
    "sensitivity_report_fd",
    "max_contingency_k_sensitivity",
    "required_ffr_share",
]

# minimum PFR share of the largest contingency mandated in the WEM: 70%
WEM_K_POLICY = 1.0 / 0.7


@dataclass(frozen=True)
class NadirConstants:
    """Dimensionless constants of the nadir algebra for one operating point."""

    k: float
    a: float
    b: float          # 1 + K(A-1); non-positive marks the asymptotic regime
    c: float           # A/(A-1); NaN on the A = 1 singular set
    asymptotic: bool   # B <= 0 (boundary included: the nadir time is infinite)
    singular: bool     # |A - 1| within the guard band


@dataclass(frozen=True)
class SecurityPolicy:
    """PFR adequacy ratio and the deviation the system must never exceed."""

    k_policy: float       # PFR >= P_cont / k_policy
    delta_f_max: float    # Hz; negative for under-frequency limits

    def __post_init__(self):
        if not self.k_policy > 0:
            raise InvalidInputError(f"k_policy must be > 0, got {self.k_policy}")
        if self.delta_f_max == 0:
            raise InvalidInputError("delta_f_max must be nonzero")


def nadir_constants(sc: SystemConditions, pfr: float, tau: float) -> NadirConstants:
    """K, A, B, C for a contingency met by a single lag response."""
    if not pfr > 0:
        raise InvalidInputError(f"pfr must be > 0, got {pfr}")
    if not tau > 0:
        raise InvalidInputError(f"tau must be > 0, got {tau}")
    k = sc.p_cont / pfr
    a = sc.dprime * tau / (2.0 * sc.h)
    b = 1.0 + k * (a - 1.0)
    singular = abs(a - 1.0) <= REL_EPS
    c = float("nan") if singular else a / (a - 1.0)
    return NadirConstants(k=k, a=a, b=b, c=c, asymptotic=b <= B_EPS, singular=singular)


def max_contingency(dp: DerivedParams, policy: SecurityPolicy, tau: float) -> float:
    """Largest contingency containable at deviation delta_f_max, MW.

    Requires A >= 1 - 1/K (interior-nadir branch); at the boundary the value
    equals the asymptotic cap, and below it BranchError points the caller to
    asymptotic_max_contingency.
    """
    if not dp.dprime > 0:
        raise InvalidInputError("D' must be > 0")
    if not tau > 0:
        raise InvalidInputError(f"tau must be > 0, got {tau}")
    k = policy.k_policy
    a = dp.dprime * tau / (2.0 * dp.h)
    b = 1.0 + k * (a - 1.0)
    if abs(b) <= B_EPS:
        # the two branches meet at the boundary
        return asymptotic_max_contingency(dp, k, policy.delta_f_max)
    if b < 0:
        raise BranchError(
            "asymptotic regime (A < 1 - 1/K): use asymptotic_max_contingency"
        )
    return k * dp.dprime * policy.delta_f_max / nadir_shape_factor(k, a)


def universal_max_contingency_factor(a: float, k: float, delta_f_max: float) -> float:
    """System-independent factor f(A, K): the cap equals f * D'."""
    if not k > 0:
        raise InvalidInputError(f"K must be > 0, got {k}")
    b = 1.0 + k * (a - 1.0)
    if abs(b) <= B_EPS:
        if k <= 1.0:
            raise BranchError("no finite cap at the boundary when K <= 1")
        return delta_f_max / (1.0 / k - 1.0)
    if b < 0:
        raise BranchError("f(A, K) is defined only for A >= 1 - 1/K")
    return k * delta_f_max / nadir_shape_factor(k, a)


def asymptotic_max_contingency(dp: DerivedParams, k_policy: float, delta_f_max: float) -> float:
    """Cap in the asymptotic regime: delta_f_max / (1/K - 1) * D', MW."""
    if not dp.dprime > 0:
        raise InvalidInputError("D' must be > 0")
    if k_policy <= 1.0:
        raise BranchError(
            "unbounded: with K <= 1 the settling deviation never crosses the limit"
        )
    return delta_f_max / (1.0 / k_policy - 1.0) * dp.dprime


def min_effective_tau(dp: DerivedParams, k: float) -> float:
    """Slowest tau below which the nadir stops improving, s: (1 - 1/K) 2H/D'.

    For K < 1 every tau already yields an interior nadir; the bound is
    clamped to zero.
    """
    if not dp.dprime > 0:
        raise InvalidInputError("D' must be > 0")
    if not k > 0:
        raise InvalidInputError(f"K must be > 0, got {k}")
    return max((1.0 - 1.0 / k) * 2.0 * dp.h / dp.dprime, 0.0)


def _a_power(a: float) -> float:
    """A^(1/(A-1)) with its removable singularity (-> e) bridged by series."""
    em1 = a - 1.0
    if abs(em1) <= 1e-8:
        return math.exp(1.0 - em1 / 2.0 + em1 * em1 / 3.0)
    return math.exp(math.log(a) / em1)


def _sensitivity_bracket(a: float) -> float:
    """(A - 1 - A ln A) / (A - 1)^2, series-bridged near A = 1 (-> -1/2)."""
    em1 = a - 1.0
    if abs(em1) <= 1e-8:
        return -0.5 + em1 / 6.0 - em1 * em1 / 12.0
    return (em1 - a * math.log(a)) / (em1 * em1)


def special_case_max_contingency(dp: DerivedParams, delta_f_max: float, tau: float) -> float:
    """Cap when the response exactly matches the contingency (K = 1), MW.

    -D' * delta_f_max * A^(1/(A-1)); the A -> 1 limit is -D' * delta_f_max * e.
    """
    if not dp.dprime > 0:
        raise InvalidInputError("D' must be > 0")
    if not tau > 0:
        raise InvalidInputError(f"tau must be > 0, got {tau}")
    a = dp.dprime * tau / (2.0 * dp.h)
    return -dp.dprime * delta_f_max * _a_power(a)


def sensitivity_pcont(dp: DerivedParams, delta_f_max: float, tau: float):
    """(dP/dtau, dP/dH) of the K = 1 cap.

    dP/dtau = -(D' df_max / tau) * [(A-1-A lnA)/(A-1)^2] * A^(1/(A-1))
    dP/dH   = +(D' df_max / H)   * [(A-1-A lnA)/(A-1)^2] * A^(1/(A-1))
    """
    if not dp.dprime > 0:
        raise InvalidInputError("D' must be > 0")
    if not tau > 0:
        raise InvalidInputError(f"tau must be > 0, got {tau}")
    a = dp.dprime * tau / (2.0 * dp.h)
    common = _sensitivity_bracket(a) * _a_power(a) * dp.dprime * delta_f_max
    return -common / tau, common / dp.h


def sensitivity_tau_bands(model: TauSurfaceModel, pfr1: float, pfr2: float):
    """(dtau/dPFR1, dtau/dPFR2) of the fitted tau model, s/MW."""
    if not pfr1 > 0:
        raise InvalidInputError("pfr1 must be > 0: the magnitude ratio is singular at 0")
    if pfr2 < 0:
        raise InvalidInputError(f"pfr2 must be >= 0, got {pfr2}")
    ab = model.a * model.b
    decay = math.exp(-model.b * pfr2 / pfr1)
    return -ab * pfr2 / pfr1**2 * decay, ab / pfr1 * decay


def sensitivity_pcont_bands(dp: DerivedParams, delta_f_max: float, model: TauSurfaceModel,
                            pfr1: float, pfr2: float):
    """(dP/dPFR1, dP/dPFR2) of the K = 1 cap through the tau channel."""
    tau = float(equivalent_tau(model, pfr1, pfr2))
    dp_dtau, _ = sensitivity_pcont(dp, delta_f_max, tau)
    dtau_d1, dtau_d2 = sensitivity_tau_bands(model, pfr1, pfr2)
    return dp_dtau * dtau_d1, dp_dtau * dtau_d2


@dataclass(frozen=True)
class SensitivityReport:
    """All trade-off derivatives of the K = 1 cap at one operating point."""

    dp_dtau: float    # MW per s
    dp_dh: float      # MW per MW.s/Hz
    dtau_dpfr1: float  # s per MW
    dtau_dpfr2: float  # s per MW
    dp_dpfr1: float    # MW per MW
    dp_dpfr2: float    # MW per MW


def sensitivity_report(dp: DerivedParams, delta_f_max: float, model: TauSurfaceModel,
                       pfr1: float, pfr2: float) -> SensitivityReport:
    """Analytic derivative set."""
    tau = float(equivalent_tau(model, pfr1, pfr2))
    dp_dtau, dp_dh = sensitivity_pcont(dp, delta_f_max, tau)
    dtau_d1, dtau_d2 = sensitivity_tau_bands(model, pfr1, pfr2)
    return SensitivityReport(
        dp_dtau=dp_dtau,
        dp_dh=dp_dh,
        dtau_dpfr1=dtau_d1,
        dtau_dpfr2=dtau_d2,
        dp_dpfr1=dp_dtau * dtau_d1,
        dp_dpfr2=dp_dtau * dtau_d2,
    )


def _central(f, x: float, rel_step: float) -> float:
    h = rel_step * abs(x)
    return (f(x + h) - f(x - h)) / (2.0 * h)


def sensitivity_report_fd(dp: DerivedParams, delta_f_max: float, model: TauSurfaceModel,
                          pfr1: float, pfr2: float, rel_step: float = 1e-5) -> SensitivityReport:
    """Central-difference counterpart of sensitivity_report."""
    tau = float(equivalent_tau(model, pfr1, pfr2))

    def p_of_tau(t):
        return special_case_max_contingency(dp, delta_f_max, t)

    def p_of_h(h):
        return special_case_max_contingency(DerivedParams(dp.dprime, h), delta_f_max, tau)

    def tau_of(p1, p2):
        return float(equivalent_tau(model, p1, p2))

    def p_of_pfr1(p1):
        return p_of_tau(tau_of(p1, pfr2))

    def p_of_pfr2(p2):
        return p_of_tau(tau_of(pfr1, p2))

    return SensitivityReport(
        dp_dtau=_central(p_of_tau, tau, rel_step),
        dp_dh=_central(p_of_h, dp.h, rel_step),
        dtau_dpfr1=_central(lambda p: tau_of(p, pfr2), pfr1, rel_step),
        dtau_dpfr2=_central(lambda p: tau_of(pfr1, p), pfr2, rel_step) if pfr2 != 0
        else (tau_of(pfr1, rel_step * pfr1) - tau_of(pfr1, 0.0)) / (rel_step * pfr1),
        dp_dpfr1=_central(p_of_pfr1, pfr1, rel_step),
        dp_dpfr2=_central(p_of_pfr2, pfr2, rel_step) if pfr2 != 0
        else (p_of_pfr2(rel_step * pfr1) - p_of_pfr2(0.0)) / (rel_step * pfr1),
    )


def max_contingency_k_sensitivity(dp: DerivedParams, policy: SecurityPolicy, tau: float,
                                  rel_step: float = 1e-5) -> float:
    """dP/dK of the general cap by central differences (no closed form), MW."""

    def p_of_k(k):
        return max_contingency(dp, SecurityPolicy(k, policy.delta_f_max), tau)

    return _central(p_of_k, policy.k_policy, rel_step)


def required_ffr_share(model: TauSurfaceModel, tau_target: float) -> float:
    """Share of the fast band needed to hit an aggregate tau target.

    Inverts the tau model for the magnitude ratio r = PFR2/PFR1 and returns
    1/(1+r). Targets at or below tau1 mean all-fast (share 1); targets at or
    beyond the tau1 + a asymptote are unreachable.
    """
    if tau_target == model.tau1:
        return 1.0
    if not model.tau1 < tau_target < model.tau1 + model.a:
        raise BranchError(
            f"tau target {tau_target} outside the attainable range "
            f"({model.tau1}, {model.tau1 + model.a})"
        )
    ratio = -math.log(1.0 - (tau_target - model.tau1) / model.a) / model.b
    return 1.0 / (1.0 + ratio)
