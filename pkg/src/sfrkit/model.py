"""Domain types for the single-machine-equivalent frequency response model.

Sign convention: an under-frequency event has a positive contingency size
(generation loss, MW) and positive response-band magnitudes. Over-frequency
events are represented by flipping the sign of both; there is no separate
code path.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "SystemConditions",
    "DerivedParams",
    "LagBand",
    "RampBand",
    "FrequencyTrace",
    "Scenario",
    "derive_params",
    "lag_pfr_value",
    "ramp_pfr_value",
    "two_band_pfr_value",
    "total_pfr_value",
    "load_scenario",
    "scenario_from_dict",
    "apply_overrides",
]


@dataclass(frozen=True)
class SystemConditions:
    """Grid state at the instant of the contingency."""

    f_n: float     # nominal frequency, Hz
    ke: float      # post-contingency kinetic energy, MW.s
    p_load: float  # system load at contingency onset, MW
    d: float       # load relief factor, fraction of load MW per Hz
    p_cont: float  # contingency size, MW (positive = generation loss)

    def __post_init__(self):
        if not self.f_n > 0:
            raise InvalidInputError(f"f_n must be > 0, got {self.f_n}")
        if not self.ke > 0:
            raise InvalidInputError(f"ke must be > 0, got {self.ke}")
        if not self.p_load > 0:
            raise InvalidInputError(f"p_load must be > 0, got {self.p_load}")
        if self.d < 0:
            raise InvalidInputError(f"d must be >= 0, got {self.d}")

    @property
    def dprime(self) -> float:
        """Load damping D' = D * P_load, MW/Hz."""
        return self.d * self.p_load

    @property
    def h(self) -> float:
        """System inertia H = KE / f_n, MW.s/Hz."""
        return self.ke / self.f_n

    def derived(self) -> "DerivedParams":
        return derive_params(self)


@dataclass(frozen=True)
class DerivedParams:
    """Damping and inertia in working units.

    dprime may legitimately be zero (no load relief); every operation that
    divides by it raises InvalidInputError instead of returning infinity.
    """

    dprime: float  # MW/Hz
    h: float       # MW.s/Hz

    def __post_init__(self):
        if self.dprime < 0:
            raise InvalidInputError(f"dprime must be >= 0, got {self.dprime}")
        if not self.h > 0:
            raise InvalidInputError(f"h must be > 0, got {self.h}")


def derive_params(sc: SystemConditions) -> DerivedParams:
    """Compute D' = D * P_load and H = KE / f_n."""
    return DerivedParams(dprime=sc.d * sc.p_load, h=sc.ke / sc.f_n)


@dataclass(frozen=True)
class LagBand:
    """One PFR provider band delivering pfr * (1 - exp(-t/tau))."""

    pfr: float  # maximum delivered response, MW
    tau: float  # response time constant, s

    def __post_init__(self):
        if not self.tau > 0:
            raise InvalidInputError(f"tau must be > 0, got {self.tau}")


@dataclass(frozen=True)
class RampBand:
    """One PFR provider band ramping at rate pfr / t_r up to pfr."""

    pfr: float  # maximum delivered response, MW
    t_r: float  # ramp time, s

    def __post_init__(self):
        if not self.t_r > 0:
            raise InvalidInputError(f"t_r must be > 0, got {self.t_r}")

    @property
    def rate(self) -> float:
        """Ramp rate R = pfr / t_r, MW/s."""
        return self.pfr / self.t_r


def _as_times(t):
    """Validate t >= 0 and return (array, was_scalar)."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise InvalidInputError("time must be >= 0")
    return arr, arr.ndim == 0


def _ret(values, scalar):
    return float(values) if scalar else values


def lag_pfr_value(band: LagBand, t):
    """Delivered response of a lag band at time t (scalar or array), MW."""
    arr, scalar = _as_times(t)
    return _ret(band.pfr * (1.0 - np.exp(-arr / band.tau)), scalar)


def ramp_pfr_value(band: RampBand, t):
    """Delivered response of a ramp band at time t, MW.

    Saturates at pfr once the ramp completes; this saturated shape is what
    the numerical oracle integrates.
    """
    arr, scalar = _as_times(t)
    return _ret(np.minimum(band.rate * arr, band.pfr), scalar)


def two_band_pfr_value(b1: LagBand, b2: LagBand, t):
    """Combined response of two lag bands at time t, MW."""
    arr, scalar = _as_times(t)
    return _ret(
        b1.pfr * (1.0 - np.exp(-arr / b1.tau)) + b2.pfr * (1.0 - np.exp(-arr / b2.tau)),
        scalar,
    )


def total_pfr_value(bands, t):
    """Combined response of a mixed list of lag/ramp bands at time t, MW."""
    arr, scalar = _as_times(t)
    total = np.zeros_like(arr)
    for band in bands:
        if isinstance(band, LagBand):
            total = total + band.pfr * (1.0 - np.exp(-arr / band.tau))
        elif isinstance(band, RampBand):
            total = total + np.minimum(band.rate * arr, band.pfr)
        else:
            raise InvalidInputError(f"unknown band type {type(band).__name__}")
    return _ret(total, scalar)


@dataclass(frozen=True)
class FrequencyTrace:
    """Uniformly sampled frequency-deviation samples, Hz."""

    t0: float
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidInputError(f"dt must be > 0, got {self.dt}")
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidInputError("samples must be a non-empty 1-D sequence")
        object.__setattr__(self, "samples", arr)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.samples))

    def __len__(self) -> int:
        return len(self.samples)


# --- scenario files -------------------------------------------------------
#
# {"system": {"f_n_hz", "ke_mws", "p_load_mw", "d_relief", "p_cont_mw"},
#  "bands":  [{"kind": "lag"|"ramp", "pfr_mw", "tau_s"|"t_r_s"}, ...],
#  "sim":    {"t_end_s", "dt_s"}}            # sim is optional


@dataclass(frozen=True)
class Scenario:
    system: SystemConditions
    bands: tuple
    t_end: float | None = None
    dt: float | None = None


def _field(doc: dict, where: str, key: str, kind=float):
    if key not in doc:
        raise InvalidInputError(f"{where}: missing required field '{key}'")
    value = doc[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidInputError(f"{where}.{key}: expected a number, got {value!r}")
        return float(value)
    return value


def scenario_from_dict(doc: dict) -> Scenario:
    """Validate a scenario document; error messages name the offending field."""
    if not isinstance(doc, dict):
        raise InvalidInputError("scenario: top level must be an object")
    if "system" not in doc or not isinstance(doc["system"], dict):
        raise InvalidInputError("scenario: missing 'system' object")
    s = doc["system"]
    system = SystemConditions(
        f_n=_field(s, "system", "f_n_hz"),
        ke=_field(s, "system", "ke_mws"),
        p_load=_field(s, "system", "p_load_mw"),
        d=_field(s, "system", "d_relief"),
        p_cont=_field(s, "system", "p_cont_mw"),
    )

    bands = []
    for i, b in enumerate(doc.get("bands", [])):
        where = f"bands.{i}"
        if not isinstance(b, dict):
            raise InvalidInputError(f"{where}: expected an object")
        kind = b.get("kind")
        pfr = _field(b, where, "pfr_mw")
        # nonzero bands must push in the same direction as the contingency
        if pfr * system.p_cont < 0:
            raise InvalidInputError(
                f"{where}.pfr_mw: sign must match p_cont_mw ({system.p_cont})"
            )
        if kind == "lag":
            bands.append(LagBand(pfr=pfr, tau=_field(b, where, "tau_s")))
        elif kind == "ramp":
            bands.append(RampBand(pfr=pfr, t_r=_field(b, where, "t_r_s")))
        else:
            raise InvalidInputError(f"{where}.kind: expected 'lag' or 'ramp', got {kind!r}")

    t_end = dt = None
    if "sim" in doc:
        if not isinstance(doc["sim"], dict):
            raise InvalidInputError("sim: expected an object")
        t_end = _field(doc["sim"], "sim", "t_end_s")
        dt = _field(doc["sim"], "sim", "dt_s")
        if not t_end > 0 or not dt > 0:
            raise InvalidInputError("sim: t_end_s and dt_s must be > 0")

    return Scenario(system=system, bands=tuple(bands), t_end=t_end, dt=dt)


def load_scenario(path, overrides=()) -> Scenario:
    """Load and validate a scenario JSON file.

    overrides are dotted assignments like 'system.ke_mws=7000' applied to the
    raw document before validation.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(
            f"malformed JSON in {path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    doc = apply_overrides(doc, overrides)
    return scenario_from_dict(doc)


def apply_overrides(doc: dict, assignments) -> dict:
    """Apply 'dotted.path=value' assignments to a scenario document.

    Values are parsed as JSON literals, falling back to plain strings.
    List elements are addressed by integer index (e.g. bands.0.tau_s=1.5).
    """
    for assignment in assignments:
        if "=" not in assignment:
            raise InvalidInputError(f"override '{assignment}': expected path=value")
        path, raw = assignment.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        keys = path.split(".")
        node = doc
        for key in keys[:-1]:
            node = _descend(node, key, path)
        leaf = keys[-1]
        if isinstance(node, list):
            node[_index(leaf, path, len(node))] = value
        elif isinstance(node, dict):
            node[leaf] = value
        else:
            raise InvalidInputError(f"override '{path}': cannot assign into {type(node).__name__}")
    return doc


def _descend(node, key, path):
    if isinstance(node, list):
        return node[_index(key, path, len(node))]
    if isinstance(node, dict):
        if key not in node:
            node[key] = {}
        return node[key]
    raise InvalidInputError(f"override '{path}': cannot descend into {type(node).__name__}")


def _index(key, path, n):
    try:
        i = int(key)
    except ValueError:
        raise InvalidInputError(f"override '{path}': '{key}' is not a list index") from None
    if not 0 <= i < n:
        raise InvalidInputError(f"override '{path}': index {i} out of range")
    return i
