"""Teleportation between two end nodes of one metropolitan network."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import OutOfRange
from .params import Geometry, HardwareParams, Timing, derive_timing, link_success_probs

Mode = Literal["ER", "QR"]


@dataclass(frozen=True)
class MetroScenario:
    """Single end-to-end metro link. Times in integer microseconds."""

    p_mprime: float
    w_mprime: float
    t_coh_us: float
    timing: Timing
    mode: Mode = "ER"

    def __post_init__(self) -> None:
        if not 0.0 < self.p_mprime <= 1.0:
            raise OutOfRange(f"p_mprime must lie in (0, 1], got {self.p_mprime}")
        if not 0.0 <= self.w_mprime <= 1.0:
            raise OutOfRange(f"w_mprime must lie in [0, 1], got {self.w_mprime}")
        if not self.t_coh_us > 0:
            raise OutOfRange(f"t_coh_us must be positive, got {self.t_coh_us}")
        if self.mode not in ("ER", "QR"):
            raise OutOfRange(f"mode must be 'ER' or 'QR', got {self.mode!r}")

    @classmethod
    def from_hardware(cls, hw: HardwareParams, geometry: Geometry, mode: Mode = "ER") -> "MetroScenario":
        p_mprime, _ = link_success_probs(hw.p_m0, geometry)
        return cls(p_mprime, hw.w_m, hw.t_coh_us, derive_timing(geometry), mode)


def metro_rate(scn: MetroScenario) -> float:
    """Teleportation rate in 1/s (identical for both modes)."""
    t = scn.timing
    return 1e6 * scn.p_mprime / (2.0 * scn.p_mprime * t.t_m_class + t.t_mprime)


def metro_fidelity_er(scn: MetroScenario) -> float:
    return 0.5 * (1.0 + scn.w_mprime * math.exp(-scn.timing.t_m_class / scn.t_coh_us))


def metro_fidelity_qr(scn: MetroScenario) -> float:
    """Expected fidelity when the data qubit waits for every failed attempt."""
    t = scn.timing
    p = scn.p_mprime
    decay = math.exp(-t.t_m_class / scn.t_coh_us)
    # Geometric number of attempts of length t_mprime, each decaying the data qubit.
    wait = p / (math.expm1(t.t_mprime / scn.t_coh_us) + p)
    return 0.5 + 0.5 * scn.w_mprime * decay * wait


def metro_fidelity(scn: MetroScenario) -> float:
    return metro_fidelity_er(scn) if scn.mode == "ER" else metro_fidelity_qr(scn)
