"""Hardware parameters, network geometry, derived timings and hardware cost.

All discrete times are integer microseconds. Coherence times are stored in
seconds and converted to microseconds only where they meet slot-valued times.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError, DegenerateLog, NonIntegerSlot, OutOfRange, UnknownPreset

US_PER_S = 1_000_000


def _exact(x: float | int | str | Fraction) -> Fraction:
    """Exact rational for a decimal literal (0.1 becomes 1/10, not its binary float)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(repr(float(x))) if not isinstance(x, str) else Fraction(x)


@dataclass(frozen=True)
class Geometry:
    """Network geometry: metro and backbone distances plus fibre constants."""

    d_metro: float = 25.0
    d_backbone: float = 450.0
    alpha: float = 0.2
    c_fiber: float = 200_000.0
    t_prep: int = 175

    def __post_init__(self) -> None:
        if not self.d_metro > 0:
            raise OutOfRange(f"d_metro must be positive, got {self.d_metro}")
        if not self.d_backbone > 0:
            raise OutOfRange(f"d_backbone must be positive, got {self.d_backbone}")
        if not self.alpha >= 0:
            raise OutOfRange(f"alpha must be nonnegative, got {self.alpha}")
        if not self.c_fiber > 0:
            raise OutOfRange(f"c_fiber must be positive, got {self.c_fiber}")
        if int(self.t_prep) != self.t_prep or self.t_prep < 0:
            raise OutOfRange(f"t_prep must be a nonnegative integer (us), got {self.t_prep}")


@dataclass(frozen=True)
class Timing:
    """Derived integer-microsecond times of the network."""

    t_m_class: int
    t_b_class: int
    t_mprime: int
    t_m: int
    t_b: int
    t_msg: int
    t_int_class: int
    m_star: int


@dataclass(frozen=True)
class HardwareParams:
    """The five free hardware parameters.

    ``t_coh`` is in seconds; fidelities are with respect to the target Bell state.
    """

    p_m0: float
    t_coh: float
    f_m: float
    p_b: float
    f_b: float

    def __post_init__(self) -> None:
        _check_prob("p_m0", self.p_m0)
        _check_prob("p_b", self.p_b)
        if not (self.t_coh > 0 and math.isfinite(self.t_coh)):
            raise OutOfRange(f"t_coh must be a positive number of seconds, got {self.t_coh}")
        _check_fidelity("f_m", self.f_m)
        _check_fidelity("f_b", self.f_b)

    @property
    def w_m(self) -> float:
        return werner_from_fidelity(self.f_m)

    @property
    def w_b(self) -> float:
        return werner_from_fidelity(self.f_b)

    @property
    def t_coh_us(self) -> float:
        return self.t_coh * US_PER_S


@dataclass(frozen=True)
class IonExperimentParams:
    """Trapped-ion efficiencies feeding the base efficiency."""

    eta_ion: float
    eta_det_ion_freq: float
    eta_fc: float
    eta_penalty: float
    eta_det_telecom: float
    t_m_prep: int = 175

    def __post_init__(self) -> None:
        for name in ("eta_ion", "eta_det_ion_freq", "eta_fc", "eta_penalty", "eta_det_telecom"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise OutOfRange(f"{name} must lie in [0, 1], got {value}")


class ParamKind(enum.Enum):
    """The five tunable hardware parameters, keyed by their field name."""

    BASE_EFFICIENCY = "p_m0"
    COHERENCE_TIME = "t_coh"
    METRO_FIDELITY = "f_m"
    BACKBONE_PROB = "p_b"
    BACKBONE_FIDELITY = "f_b"

    @property
    def field(self) -> str:
        return self.value


def _check_prob(name: str, p: float) -> None:
    if not (0.0 < p <= 1.0):
        raise OutOfRange(f"{name} must lie in (0, 1], got {p}")


def _check_fidelity(name: str, f: float) -> None:
    if not (0.25 < f <= 1.0):
        raise OutOfRange(f"{name} must lie in (1/4, 1], got {f}")


def _slot_us(distance_km: float, c_km_s: float) -> int:
    t = _exact(distance_km) * US_PER_S / _exact(c_km_s)
    if t.denominator != 1:
        raise NonIntegerSlot(
            f"propagation over {distance_km} km at {c_km_s} km/s is {float(t)} us, not an integer"
        )
    return int(t)


def derive_timing(geometry: Geometry) -> Timing:
    """Integer-microsecond attempt cycles and classical delays for ``geometry``."""
    t_m_class = _slot_us(geometry.d_metro, geometry.c_fiber)
    t_b_class = _slot_us(geometry.d_backbone, geometry.c_fiber)
    t_prep = int(geometry.t_prep)
    t_m = t_prep + 2 * t_m_class
    t_b = t_prep + t_b_class
    return Timing(
        t_m_class=t_m_class,
        t_b_class=t_b_class,
        t_mprime=t_prep + 2 * t_m_class,
        t_m=t_m,
        t_b=t_b,
        t_msg=t_m_class + t_b_class,
        t_int_class=2 * t_m_class + t_b_class,
        m_star=t_b // math.gcd(t_m, t_b),
    )


def link_success_probs(p_m0: float, geometry: Geometry) -> tuple[float, float]:
    """Return ``(p_mprime, p_m)``: end-to-end metro and end-to-border success probabilities."""
    _check_prob("p_m0", p_m0)
    loss_db = geometry.alpha * geometry.d_metro
    p_mprime = p_m0 * 10.0 ** (-2.0 * loss_db / 10.0)
    p_m = p_m0 * 10.0 ** (-loss_db / 10.0)
    return p_mprime, p_m


def base_efficiency(ion: IonExperimentParams) -> float:
    """Distance-independent attempt success probability of the double-click scheme."""
    return 0.5 * ion.eta_penalty * (ion.eta_ion * ion.eta_fc * ion.eta_det_telecom) ** 2


def werner_from_fidelity(f: float) -> float:
    if not 0.25 <= f <= 1.0:
        raise OutOfRange(f"fidelity must lie in [1/4, 1], got {f}")
    return (4.0 * f - 1.0) / 3.0


def fidelity_from_werner(w: float) -> float:
    if not 0.0 <= w <= 1.0:
        raise OutOfRange(f"Werner parameter must lie in [0, 1], got {w}")
    return (1.0 + 3.0 * w) / 4.0


def p_ni(kind: ParamKind, value: float) -> float:
    """No-imperfection probability of a parameter value (1 means ideal hardware)."""
    if kind in (ParamKind.BASE_EFFICIENCY, ParamKind.BACKBONE_PROB):
        _check_prob(kind.field, value)
        return float(value)
    if kind is ParamKind.COHERENCE_TIME:
        if not value > 0:
            raise OutOfRange(f"t_coh must be positive, got {value}")
        return math.exp(-1.0 / value)
    if not 0.25 < value <= 1.0:
        raise OutOfRange(f"{kind.field} must lie in (1/4, 1], got {value}")
    return (4.0 * value - 1.0) / 3.0


def improvement_factor(kind: ParamKind, value: float, baseline: float) -> float:
    """Cost of moving one parameter from ``baseline`` to ``value``."""
    p_val = p_ni(kind, value)
    p_base = p_ni(kind, baseline)
    if p_val >= 1.0 or p_base >= 1.0:
        raise DegenerateLog(f"{kind.field}: p_NI = 1 has no finite improvement factor")
    if kind is ParamKind.COHERENCE_TIME:
        # ln(e^{-1/t}) = -1/t exactly; avoids the rounding of exp/log round trips
        return value / baseline
    return math.log(p_base) / math.log(p_val)


def value_from_improvement(kind: ParamKind, factor: float, baseline: float) -> float:
    """Inverse of ``improvement_factor``: the parameter value costing ``factor``."""
    if not factor >= 1.0:
        raise OutOfRange(f"improvement factor must be at least 1, got {factor}")
    if kind is ParamKind.COHERENCE_TIME:
        return baseline * factor
    log_p = math.log(p_ni(kind, baseline)) / factor
    if kind in (ParamKind.BASE_EFFICIENCY, ParamKind.BACKBONE_PROB):
        return math.exp(log_p)
    return (1.0 + 3.0 * math.exp(log_p)) / 4.0


def hardware_cost(point: Mapping[ParamKind, float], baseline: Mapping[ParamKind, float]) -> float:
    """Sum of improvement factors over the free parameters in ``point``."""
    if set(point) != set(baseline):
        raise ConfigError("point and baseline must cover the same parameters")
    return sum(improvement_factor(kind, point[kind], baseline[kind]) for kind in point)


def get_param(hw: HardwareParams, kind: ParamKind) -> float:
    return getattr(hw, kind.field)


def with_params(hw: HardwareParams, values: Mapping[ParamKind, float]) -> HardwareParams:
    return replace(hw, **{kind.field: float(v) for kind, v in values.items()})


BASELINE_HW = HardwareParams(p_m0=5.95e-4, t_coh=0.062, f_m=0.88, p_b=1.51e-6, f_b=0.60)
OPTIMISTIC_HW = HardwareParams(p_m0=1.43e-2, t_coh=4.0, f_m=0.95, p_b=4.18e-3, f_b=0.90)
BASELINE_ION = IonExperimentParams(
    eta_ion=0.462 / 0.87, eta_det_ion_freq=0.87, eta_fc=0.25, eta_penalty=0.12, eta_det_telecom=0.75
)
OPTIMISTIC_ION = IonExperimentParams(
    eta_ion=0.5 / 0.87, eta_det_ion_freq=0.87, eta_fc=0.70, eta_penalty=0.20, eta_det_telecom=0.94
)
DEFAULT_GEOMETRY = Geometry()

_PRESETS = {
    "baseline": (BASELINE_HW, BASELINE_ION),
    "optimistic": (OPTIMISTIC_HW, OPTIMISTIC_ION),
}


def load_preset(name: str) -> tuple[HardwareParams, Geometry, IonExperimentParams]:
    try:
        hw, ion = _PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; expected one of {sorted(_PRESETS)}") from None
    return hw, DEFAULT_GEOMETRY, ion


# JSON config keys and the dataclass fields they populate.
_HW_KEYS = {"p_m0": "p_m0", "t_coh_s": "t_coh", "f_m": "f_m", "p_b": "p_b", "f_b": "f_b"}
_GEO_KEYS = {
    "d_metro_km": "d_metro",
    "d_backbone_km": "d_backbone",
    "alpha_per_km": "alpha",
    "c_km_s": "c_fiber",
    "t_prep_us": "t_prep",
}
CONFIG_KEYS = tuple(_HW_KEYS) + tuple(_GEO_KEYS)


def config_from_mapping(
    data: Mapping[str, Any], base: str = "baseline"
) -> tuple[HardwareParams, Geometry]:
    """Build parameters from a flat mapping; missing keys fall back to preset ``base``."""
    unknown = set(data) - set(CONFIG_KEYS) - {"preset"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    hw, geo, _ = load_preset(str(data.get("preset", base)))
    hw_over = {field: data[key] for key, field in _HW_KEYS.items() if key in data}
    geo_over = {field: data[key] for key, field in _GEO_KEYS.items() if key in data}
    for key, value in {**hw_over, **geo_over}.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"config field {key!r} must be a number, got {value!r}")
    if "t_prep" in geo_over:
        if int(geo_over["t_prep"]) != geo_over["t_prep"]:
            raise ConfigError(f"t_prep_us must be an integer, got {geo_over['t_prep']}")
        geo_over["t_prep"] = int(geo_over["t_prep"])
    return replace(hw, **hw_over), replace(geo, **geo_over)


def load_config(path: str | Path) -> tuple[HardwareParams, Geometry]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a JSON object")
    return config_from_mapping(data)


def config_to_mapping(hw: HardwareParams, geometry: Geometry) -> dict[str, Any]:
    hw_d, geo_d = asdict(hw), asdict(geometry)
    out: dict[str, Any] = {key: hw_d[field] for key, field in _HW_KEYS.items()}
    out.update({key: geo_d[field] for key, field in _GEO_KEYS.items()})
    return out
