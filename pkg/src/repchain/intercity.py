"""Exact rate and fidelity of the two-metro plus backbone chain with a global cut-off.

A round draws three independent geometric attempt counts ``M1, M2, Mb`` and sets
``X1 = t_m*M1``, ``X2 = t_m*M2`` and ``Xb = t_b*Mb``. The round succeeds when
``max(X) - min(X) <= t_cut - 1``. Every quantity of interest is a
combination of expectations of the form

    E[exp(-(th1*X1 + th2*X2 + thb*Xb)) ; event]

over the events of an inclusion-exclusion split of success (by which link
finished last) and of failure (by which link finished first). Each such
expectation is a sum over one "anchor" attempt count with the other two
summed in closed form. Shifting all three links by ``lcm(t_m, t_b)`` multiplies
a summand by the same ratio ``R``, so the anchor sum is a single period
divided by ``1 - R``.

Linear moments such as ``E[X_max ; Y=1]`` come from a complex-step derivative
of the same expressions with respect to one tilt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DivergentSeries, OutOfRange
from .params import (
    Geometry,
    HardwareParams,
    Timing,
    derive_timing,
    link_success_probs,
)
from .series import floor_window_sums, geo, geo_tail

# Complex-step size for first moments (units of 1/us).
_CS_STEP = 1e-20
# log(1 - p) is clipped here so that p = 1 stays finite; exp(-700 * m) is 0 for m >= 2.
_LOG_Q_FLOOR = -700.0

Tilt = tuple[np.ndarray, np.ndarray, np.ndarray]


@dataclass(frozen=True)
class IntercityScenario:
    """One intercity operating point. Times in integer microseconds."""

    p_m: float
    p_b: float
    timing: Timing
    t_coh_us: float
    w_m: float
    w_b: float
    t_cut: int

    def __post_init__(self) -> None:
        for name in ("p_m", "p_b"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise OutOfRange(f"{name} must lie in (0, 1], got {value}")
        for name in ("w_m", "w_b"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise OutOfRange(f"{name} must lie in [0, 1], got {value}")
        if not self.t_coh_us > 0:
            raise OutOfRange(f"t_coh_us must be positive, got {self.t_coh_us}")
        if int(self.t_cut) != self.t_cut or self.t_cut < 1:
            raise OutOfRange(f"t_cut must be a positive integer (us), got {self.t_cut}")
        if self.timing.t_m < 1 or self.timing.t_b < 1:
            raise OutOfRange("attempt cycle times must be positive integers")
        object.__setattr__(self, "t_cut", int(self.t_cut))

    @property
    def k(self) -> float:
        """Werner decay rate of a stored two-qubit link, per microsecond."""
        return 2.0 / self.t_coh_us

    @classmethod
    def from_hardware(
        cls, hw: HardwareParams, geometry: Geometry, t_cut: int, timing: Timing | None = None
    ) -> "IntercityScenario":
        _, p_m = link_success_probs(hw.p_m0, geometry)
        return cls(
            p_m=p_m,
            p_b=hw.p_b,
            timing=timing or derive_timing(geometry),
            t_coh_us=hw.t_coh_us,
            w_m=hw.w_m,
            w_b=hw.w_b,
            t_cut=t_cut,
        )

    def with_t_cut(self, t_cut: int) -> "IntercityScenario":
        return IntercityScenario(
            self.p_m, self.p_b, self.timing, self.t_coh_us, self.w_m, self.w_b, int(t_cut)
        )


@dataclass(frozen=True)
class EventTermSet:
    """Expectations of one payoff over each inclusion-exclusion event.

    Success events are named after the link(s) finishing last (``plus``), failure
    events after the link(s) finishing first (``minus``). ``a12`` style names
    list the latest link first and the earliest second for success, and the
    reverse for failure; a bare pair such as ``a1_a2`` means both links tie.
    """

    a12_plus: float
    a1b_plus: float
    a12_a1b_plus: float
    ab_plus: float
    a1_a2_plus: float
    a1_ab_plus: float
    a1_a2_ab_plus: float
    a12_minus: float
    a1b_minus: float
    ab1_minus: float
    a12_a1b_minus: float
    ab1_ab2_minus: float
    a1_a2_minus: float
    a1_ab_minus: float

    @property
    def a1_plus(self) -> float:
        return self.a12_plus + self.a1b_plus - self.a12_a1b_plus

    @property
    def success_total(self) -> float:
        return (
            2.0 * self.a1_plus
            + self.ab_plus
            - self.a1_a2_plus
            - 2.0 * self.a1_ab_plus
            + self.a1_a2_ab_plus
        )

    @property
    def failure_total(self) -> float:
        return (
            2.0 * (self.a12_minus + self.a1b_minus + self.ab1_minus)
            - 2.0 * self.a12_a1b_minus
            - self.ab1_ab2_minus
            - self.a1_a2_minus
            - 2.0 * self.a1_ab_minus
        )

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _direct_len(n: np.ndarray | None) -> int:
    # Leading terms where the closed form would cancel; beyond these the
    # inner sums differ enough from their head term.
    cap = 32
    if n is None:
        return cap
    return int(min(cap, int(np.max(n, initial=0))))


def _nested_floor(l_out, l_in, q: Fraction, lo, n, base):
    """``sum_{m=lo}^{lo+n-1} exp(l_out*(m-1)) * sum_{j=base+1}^{floor(m*q)} exp(l_in*(j-1-base))``.

    Equals the closed form ``(S_head - S_floor) / (1 - exp(l_in))`` but the
    leading terms, where the two parts nearly cancel, are summed one by one
    with ``expm1``. ``n=None`` means an infinite window.
    """
    l_out = l_out[:, :, None]
    l_in3 = l_in[:, :, None]
    k0 = _direct_len(n)
    k = np.arange(k0)
    m = lo[:, None] + k[None, :]
    span = (m * q.numerator) // q.denominator - base[:, None]
    mask = (k[None, :] < n[:, None]) if n is not None else np.ones_like(m, dtype=bool)
    expo = np.where(mask[None], l_out * (m - 1)[None], 0.0)
    body = np.exp(expo) * geo(l_in3, span[None])
    direct = np.where(mask[None], body, 0.0).sum(axis=2)
    lo2 = lo + k0
    if n is None:
        rest_n = None
        head = np.exp(l_out[:, :, 0] * (lo2 - 1)) * geo_tail(l_out[:, :, 0])
    else:
        rest_n = np.maximum(n - k0, 0)
        head = np.exp(l_out[:, :, 0] * (lo2 - 1)) * geo(l_out[:, :, 0], rest_n)
    tail = floor_window_sums(l_out[:, 0, 0], l_in[:, 0], q, lo2, rest_n, offset=base)
    closed = (head - tail) / (-np.expm1(l_in))
    return direct + closed


def _nested_linear(l_out, l_in, delta, n):
    """``sum_{t=0}^{n-1} exp(l_out*t) * sum_{s=0}^{delta+t-1} exp(l_in*s)`` (``n=None``: infinite)."""
    k0 = _direct_len(n)
    t = np.arange(k0)
    mask = (t[None, :] < n[:, None]) if n is not None else np.ones((delta.shape[0], k0), dtype=bool)
    l_out3, l_in3 = l_out[:, :, None], l_in[:, :, None]
    body = np.exp(l_out3 * t) * geo(l_in3, (delta[:, None] + t[None, :])[None])
    direct = np.where(mask[None], body, 0.0).sum(axis=2)
    # remainder t >= k0:  sum exp(l_out t) (1 - exp(l_in (delta + t))) / (1 - exp(l_in))
    if n is None:
        g_out, g_both = geo_tail(l_out), geo_tail(l_out + l_in)
    else:
        rest = np.maximum(n - k0, 0)
        g_out, g_both = geo(l_out, rest), geo(l_out + l_in, rest)
    first = np.exp(l_out * k0) * g_out
    second = np.exp(l_out * k0 + l_in * (delta + k0)) * g_both
    return direct + (first - second) / (-np.expm1(l_in))


class _Engine:
    """Anchored closed forms of every event expectation for a fixed scenario.

    Each event method takes tilt arrays ``th1, th2, thb`` of shape ``(T,)``
    (possibly complex) and returns the ``T`` expectations
    ``E[exp(-(th1*X1 + th2*X2 + thb*Xb)) ; event]``.
    """

    def __init__(self, scn: IntercityScenario) -> None:
        self.a = a = scn.timing.t_m
        self.b = b = scn.timing.t_b
        g = math.gcd(a, b)
        self.L = a * b // g
        self.Pa = b // g  # steps of X1/X2 per lcm
        self.Pb = a // g  # steps of Xb per lcm
        self.c = scn.t_cut - 1  # largest admissible spread
        self.tau = scn.t_cut  # smallest failing spread
        self.log_p = (math.log(scn.p_m), math.log(scn.p_b))
        self.log_q = (
            max(math.log1p(-scn.p_m), _LOG_Q_FLOOR) if scn.p_m < 1 else _LOG_Q_FLOOR,
            max(math.log1p(-scn.p_b), _LOG_Q_FLOOR) if scn.p_b < 1 else _LOG_Q_FLOOR,
        )
        self.i_anchor = np.arange(1, self.Pa + 1, dtype=np.int64)
        self.j_anchor = np.arange(1, self.Pb + 1, dtype=np.int64)

    # -- per-tilt constants ------------------------------------------------

    def _prep(self, th1, th2, thb):
        th1, th2, thb = (np.asarray(t, dtype=complex)[:, None] for t in (th1, th2, thb))
        a, b = self.a, self.b
        lq_m, lq_b = self.log_q
        lp_m, lp_b = self.log_p
        l1 = lq_m - th1 * a
        l2 = lq_m - th2 * a
        lb = lq_b - thb * b
        log_c = 2 * lp_m + lp_b - (th1 + th2) * a - thb * b
        log_r = (l1 + l2) * self.Pa + lb * self.Pb
        if np.any(log_r.real >= 0):
            raise DivergentSeries("tilted event sum does not converge")
        inv_r = -1.0 / np.expm1(log_r)
        return l1, l2, lb, log_c, inv_r

    @staticmethod
    def _ceil_div(n, d):
        return -((-n) // d)

    # -- success events ----------------------------------------------------

    def a12_plus(self, th1, th2, thb):
        # X1 last, X2 first, Xb in between; anchor M2 = i.
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        a, b, i = self.a, self.b, self.i_anchor
        w = self.c // a
        base = self._ceil_div(a * i, b) - 1
        inner = _nested_floor(
            np.broadcast_to(l1, (l1.shape[0], i.shape[0])), np.broadcast_to(lb, (lb.shape[0], i.shape[0])),
            Fraction(a, b), i, np.full(i.shape, w + 1), base,
        )
        c_i = np.exp(log_c + l2 * (i - 1) + lb * base) * inner
        return c_i.sum(axis=1) * inv_r[:, 0]

    def a1b_plus(self, th1, th2, thb):
        # X1 last, Xb first, X2 in between; anchor Mb = j.
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        a, b, j = self.a, self.b, self.j_anchor
        lo = self._ceil_div(b * j, a)
        n = (b * j + self.c) // a - lo + 1
        shape = (l1.shape[0], j.shape[0])
        inner = _nested_linear(
            np.broadcast_to(l1, shape), np.broadcast_to(l2, shape), np.ones_like(j), np.maximum(n, 0)
        )
        c_j = np.exp(log_c + lb * (j - 1) + (l1 + l2) * (lo - 1)) * inner
        return c_j.sum(axis=1) * inv_r[:, 0]

    def a12_a1b_plus(self, th1, th2, thb):
        # X1 last, X2 = Xb first (they meet only on multiples of the lcm).
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        w = self.c // self.a
        expo = log_c + (l1 + l2) * (self.Pa - 1) + lb * (self.Pb - 1)
        return (np.exp(expo) * geo(l1, w + 1) * inv_r)[:, 0]

    def ab_plus(self, th1, th2, thb):
        # Xb last; X1 and X2 anywhere in [Xb - c, Xb]. Anchor Mb = j; the first
        # c // b anchors are clipped at one attempt and summed directly.
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        a, b, c = self.a, self.b, self.c
        j0 = c // b + 1

        def block(j):
            lo = np.maximum(1, self._ceil_div(b * j - c, a))
            n = (b * j) // a - lo + 1
            return np.exp(log_c + lb * (j - 1) + (l1 + l2) * (lo - 1)) * geo(l1, n) * geo(l2, n)

        prefix = block(np.arange(1, j0, dtype=np.int64)).sum(axis=1) if j0 > 1 else 0.0
        periodic = block(np.arange(j0, j0 + self.Pb, dtype=np.int64)).sum(axis=1)
        return prefix + periodic * inv_r[:, 0]

    def a1_a2_plus(self, th1, th2, thb):
        # X1 = X2 last, Xb first; anchor Mb = j.
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        a, b, j = self.a, self.b, self.j_anchor
        lo = self._ceil_div(b * j, a)
        n = (b * j + self.c) // a - lo + 1
        c_j = np.exp(log_c + lb * (j - 1) + (l1 + l2) * (lo - 1)) * geo(l1 + l2, n)
        return c_j.sum(axis=1) * inv_r[:, 0]

    def a1_ab_plus(self, th1, th2, thb):
        # X1 = Xb last (a multiple k*lcm), X2 first; anchor M2 = i.
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        a, L, i = self.a, self.L, self.i_anchor
        k_lo = self._ceil_div(a * i, L)
        k_hi = (a * i + self.c) // L
        log_step = l1 * self.Pa + lb * self.Pb
        expo = log_c + l2 * (i - 1) + l1 * (k_lo * self.Pa - 1) + lb * (k_lo * self.Pb - 1)
        c_i = np.exp(expo) * geo(log_step, k_hi - k_lo + 1)
        return c_i.sum(axis=1) * inv_r[:, 0]

    def a1_a2_ab_plus(self, th1, th2, thb):
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        expo = log_c + (l1 + l2) * (self.Pa - 1) + lb * (self.Pb - 1)
        return (np.exp(expo) * inv_r)[:, 0]

    # -- failure events ----------------------------------------------------

    def a12_minus(self, th1, th2, thb):
        # X2 first, X1 last with X1 - X2 >= tau, Xb in between; anchor M2 = i.
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        a, b, i = self.a, self.b, self.i_anchor
        d = self._ceil_div(self.tau, a)
        base = self._ceil_div(a * i, b) - 1
        shape = (l1.shape[0], i.shape[0])
        inner = _nested_floor(
            np.broadcast_to(l1, shape), np.broadcast_to(lb, shape), Fraction(a, b), i + d, None, base
        )
        c_i = np.exp(log_c + l2 * (i - 1) + lb * base) * inner
        return c_i.sum(axis=1) * inv_r[:, 0]

    def a1b_minus(self, th1, th2, thb):
        # Xb first, X1 last with X1 - Xb >= tau, X2 in between; anchor Mb = j.
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        a, b, j = self.a, self.b, self.j_anchor
        lo = self._ceil_div(b * j, a)
        h = self._ceil_div(b * j + self.tau, a)
        shape = (l1.shape[0], j.shape[0])
        inner = _nested_linear(np.broadcast_to(l1, shape), np.broadcast_to(l2, shape), h - lo + 1, None)
        c_j = np.exp(log_c + lb * (j - 1) + l1 * (h - 1) + l2 * (lo - 1)) * inner
        return c_j.sum(axis=1) * inv_r[:, 0]

    def ab1_minus(self, th1, th2, thb):
        # X1 first, Xb last with Xb - X1 >= tau, X2 in between; anchor M1 = i.
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        a, b, i = self.a, self.b, self.i_anchor
        h = self._ceil_div(a * i + self.tau, b)
        shape = (l1.shape[0], i.shape[0])
        inner = _nested_floor(
            np.broadcast_to(lb, shape), np.broadcast_to(l2, shape), Fraction(b, a), h, None, i - 1
        )
        c_i = np.exp(log_c + l1 * (i - 1) + l2 * (i - 1)) * inner
        return c_i.sum(axis=1) * inv_r[:, 0]

    def a12_a1b_minus(self, th1, th2, thb):
        # X2 = Xb first (a multiple of the lcm), X1 last.
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        d = self._ceil_div(self.tau, self.a)
        expo = log_c + l2 * (self.Pa - 1) + lb * (self.Pb - 1) + l1 * (self.Pa + d - 1)
        return (np.exp(expo) * geo_tail(l1) * inv_r)[:, 0]

    def ab1_ab2_minus(self, th1, th2, thb):
        # X1 = X2 first, Xb last; anchor M1 = M2 = i.
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        a, b, i = self.a, self.b, self.i_anchor
        h = self._ceil_div(a * i + self.tau, b)
        c_i = np.exp(log_c + (l1 + l2) * (i - 1) + lb * (h - 1)) * geo_tail(lb)
        return c_i.sum(axis=1) * inv_r[:, 0]

    def a1_a2_minus(self, th1, th2, thb):
        # Xb first, X1 = X2 last; anchor Mb = j.
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        a, b, j = self.a, self.b, self.j_anchor
        h = self._ceil_div(b * j + self.tau, a)
        c_j = np.exp(log_c + lb * (j - 1) + (l1 + l2) * (h - 1)) * geo_tail(l1 + l2)
        return c_j.sum(axis=1) * inv_r[:, 0]

    def a1_ab_minus(self, th1, th2, thb):
        # X2 first, X1 = Xb last (a multiple k*lcm); anchor M2 = i.
        l1, l2, lb, log_c, inv_r = self._prep(th1, th2, thb)
        a, L, i = self.a, self.L, self.i_anchor
        k_lo = self._ceil_div(a * i + self.tau, L)
        log_step = l1 * self.Pa + lb * self.Pb
        expo = log_c + l2 * (i - 1) + l1 * (k_lo * self.Pa - 1) + lb * (k_lo * self.Pb - 1)
        c_i = np.exp(expo) * geo_tail(log_step)
        return c_i.sum(axis=1) * inv_r[:, 0]


# Event name -> (inclusion-exclusion coefficient, index of the latest/earliest link
# that carries the X_max / X_min tilt, with 0 = X1, 1 = X2, 2 = Xb).
_SUCCESS = {
    "a12_plus": (2.0, 0),
    "a1b_plus": (2.0, 0),
    "a12_a1b_plus": (-2.0, 0),
    "ab_plus": (1.0, 2),
    "a1_a2_plus": (-1.0, 0),
    "a1_ab_plus": (-2.0, 0),
    "a1_a2_ab_plus": (1.0, 0),
}
_FAILURE = {
    "a12_minus": (2.0, 1),
    "a1b_minus": (2.0, 2),
    "ab1_minus": (2.0, 0),
    "a12_a1b_minus": (-2.0, 1),
    "ab1_ab2_minus": (-1.0, 0),
    "a1_a2_minus": (-1.0, 2),
    "a1_ab_minus": (-2.0, 1),
}


def _u_tilt(event: str, v: complex, alpha: float) -> tuple[complex, complex, complex]:
    """Tilt reproducing ``exp(-v*(X_diff + (alpha - 2)*X_max))`` on a success event."""
    if event == "ab_plus":
        return (-v, -v, v * alpha)
    if event == "a1_a2_ab_plus":
        return (v * (alpha - 2.0), 0.0, 0.0)
    if event in ("a1b_plus", "a1_a2_plus"):
        return (v * (alpha - 1.0), 0.0, -v)
    return (v * (alpha - 1.0), -v, 0.0)


def _axis_tilt(axis: int, value: complex) -> tuple[complex, complex, complex]:
    out = [0.0, 0.0, 0.0]
    out[axis] = value
    return tuple(out)  # type: ignore[return-value]


# A request is one of ("one",), ("u", v, alpha), ("u3", v), ("moment",).
Request = tuple


def _run(
    scn: IntercityScenario,
    table: dict[str, tuple[float, int]],
    tilt_for: Callable[[str, Request], tuple[complex, complex, complex]],
    requests: Sequence[Request],
) -> dict[str, np.ndarray]:
    eng = _Engine(scn)
    out = {}
    for name, (_, _axis) in table.items():
        tilts = np.array([tilt_for(name, r) for r in requests], dtype=complex)
        out[name] = getattr(eng, name)(tilts[:, 0], tilts[:, 1], tilts[:, 2])
    return out


def _success_tilt(event: str, req: Request):
    kind = req[0]
    if kind == "one":
        return (0.0, 0.0, 0.0)
    if kind == "u":
        return _u_tilt(event, req[1], req[2])
    if kind == "moment":
        return _axis_tilt(_SUCCESS[event][1], 1j * _CS_STEP)
    raise ValueError(f"unknown success request {req!r}")


def _failure_tilt(event: str, req: Request):
    kind = req[0]
    if kind == "one":
        return (0.0, 0.0, 0.0)
    if kind == "u3":
        return _axis_tilt(_FAILURE[event][1], req[1] / 2.0)
    if kind == "moment":
        return _axis_tilt(_FAILURE[event][1], 1j * _CS_STEP)
    raise ValueError(f"unknown failure request {req!r}")


def _combine(values: dict[str, np.ndarray], table: dict[str, tuple[float, int]]) -> np.ndarray:
    return sum(coef * values[name] for name, (coef, _) in table.items())


def success_expectations(scn: IntercityScenario, requests: Sequence[Request]) -> np.ndarray:
    """Batched success-side expectations, one complex value per request."""
    return _combine(_run(scn, _SUCCESS, _success_tilt, requests), _SUCCESS)


def failure_expectations(scn: IntercityScenario, requests: Sequence[Request]) -> np.ndarray:
    """Batched failure-side expectations, one complex value per request."""
    return _combine(_run(scn, _FAILURE, _failure_tilt, requests), _FAILURE)


def event_terms(scn: IntercityScenario, payoff: str = "one", v: float = 0.0, alpha: float = 2.0) -> EventTermSet:
    """Per-event expectations of the indicator (``payoff="one"``), of the
    ``U(v, alpha)`` payoff on success events together with the ``U3(v)``
    payoff on failure events (``payoff="u"``), or of the round duration
    ``Z`` (``payoff="z"``)."""
    if payoff == "one":
        s_req, f_req = [("one",)], [("one",)]
    elif payoff == "u":
        s_req, f_req = [("u", v, alpha)], [("u3", v)]
    elif payoff == "z":
        s_req = f_req = [("one",), ("moment",)]
    else:
        raise ValueError(f"unknown payoff {payoff!r}")
    s_vals = _run(scn, _SUCCESS, _success_tilt, s_req)
    f_vals = _run(scn, _FAILURE, _failure_tilt, f_req)
    if payoff == "z":
        t_msg = scn.timing.t_msg
        out = {n: (-x[1].imag / _CS_STEP) + t_msg * x[0].real for n, x in s_vals.items()}
        out.update({n: (-x[1].imag / _CS_STEP) + scn.t_cut * x[0].real for n, x in f_vals.items()})
    else:
        out = {n: x[0].real for n, x in {**s_vals, **f_vals}.items()}
    return EventTermSet(**{k: float(v_) for k, v_ in out.items()})


# ---------------------------------------------------------------------------
# Public quantities
# ---------------------------------------------------------------------------


def u_alpha(v: float, alpha: float, scn: IntercityScenario) -> float:
    """``E[exp(-v*(X_diff + (alpha - 2)*X_max)) ; Y=1]``."""
    if v < 0:
        raise OutOfRange(f"v must be nonnegative, got {v}")
    return float(success_expectations(scn, [("u", v, alpha)])[0].real)


def u1(v: float, scn: IntercityScenario) -> float:
    return u_alpha(v, 2.0, scn)


def u2(v: float, scn: IntercityScenario) -> float:
    return u_alpha(v, 2.5, scn)


def u3(v: float, scn: IntercityScenario) -> float:
    """``E[exp(-v*X_min/2) ; Y=0]``."""
    if v < 0:
        raise OutOfRange(f"v must be nonnegative, got {v}")
    return float(failure_expectations(scn, [("u3", v)])[0].real)


def success_probability(scn: IntercityScenario) -> float:
    return float(success_expectations(scn, [("one",)])[0].real)


def expected_z_success(scn: IntercityScenario) -> float:
    """``E[Z ; Y=1]`` with ``Z = X_max + t_msg`` on success, in microseconds."""
    one, mom = success_expectations(scn, [("one",), ("moment",)])
    return float(-mom.imag / _CS_STEP + scn.timing.t_msg * one.real)


def expected_z_fail(scn: IntercityScenario) -> float:
    """``E[Z ; Y=0]`` with ``Z = X_min + t_cut`` on failure, in microseconds."""
    one, mom = failure_expectations(scn, [("one",), ("moment",)])
    return float(-mom.imag / _CS_STEP + scn.t_cut * one.real)


@dataclass(frozen=True)
class IntercityPoint:
    """All analytic outputs of one scenario, from a single batched evaluation."""

    p: float
    one_minus_p: float
    ez_success_us: float
    ez_fail_us: float
    e2e_time_us: float
    rate: float
    u1: float
    u2: float
    u3: float
    mean_werner: float
    fidelity_e2e: float
    fidelity_er: float
    fidelity_qr: float


def evaluate(scn: IntercityScenario, *, need: str = "all") -> IntercityPoint:
    """Evaluate every analytic output; ``need`` may be ``"er"`` or ``"qr"`` to skip unused work."""
    k = scn.k
    s_req: list[Request] = [("one",), ("moment",), ("u", k, 2.0), ("u", k, 2.5)]
    f_req: list[Request] = [("one",), ("moment",), ("u3", k)]
    if need == "er":
        s_req, f_req = s_req[:3], f_req[:2]
    s = success_expectations(scn, s_req)
    f = failure_expectations(scn, f_req)
    p = float(s[0].real)
    one_minus_p = float(f[0].real)
    ez1 = float(-s[1].imag / _CS_STEP + scn.timing.t_msg * p)
    ez0 = float(-f[1].imag / _CS_STEP + scn.t_cut * one_minus_p)
    t = scn.timing
    amp = scn.w_m**2 * scn.w_b
    val_u1 = float(s[2].real)
    if p > 0.0:
        e2e = (ez0 + ez1) / p
        rate = 1e6 / (t.t_int_class + e2e)
        mean_w = amp * math.exp(-k * t.t_msg) * val_u1 / p
    else:
        # No round can ever succeed: the chain never delivers a link.
        e2e, rate, mean_w = math.inf, 0.0, math.nan
    f_er = 0.5 + 0.5 * mean_w * math.exp(-k * t.t_int_class / 2.0)
    if need == "er":
        val_u2 = val_u3 = f_qr = math.nan
    else:
        val_u2 = float(s[3].real)
        val_u3 = float(f[2].real)
        f_qr = _qr_from_terms(scn, val_u2, val_u3)
    return IntercityPoint(
        p=p,
        one_minus_p=one_minus_p,
        ez_success_us=ez1,
        ez_fail_us=ez0,
        e2e_time_us=e2e,
        rate=rate,
        u1=val_u1,
        u2=val_u2,
        u3=val_u3,
        mean_werner=mean_w,
        fidelity_e2e=(1.0 + 3.0 * mean_w) / 4.0,
        fidelity_er=f_er,
        fidelity_qr=f_qr,
    )


def _qr_from_terms(scn: IntercityScenario, val_u2: float, val_u3: float) -> float:
    k, t = scn.k, scn.timing
    amp = scn.w_m**2 * scn.w_b
    # The stored link decays over t_msg; the data qubit over the successful round
    # (which ends t_msg after X_max) and over the classical correction delay.
    prefactor = amp * math.exp(-k * (1.5 * t.t_msg + t.t_int_class / 2.0))
    denom = 1.0 - math.exp(-k * scn.t_cut / 2.0) * val_u3
    return 0.5 + 0.5 * prefactor * val_u2 / denom


def expected_e2e_time(scn: IntercityScenario) -> float:
    return evaluate(scn, need="er").e2e_time_us


def intercity_rate(scn: IntercityScenario) -> float:
    """Teleportation rate in 1/s."""
    return evaluate(scn, need="er").rate


def e2e_werner_expectation(scn: IntercityScenario) -> tuple[float, float]:
    pt = evaluate(scn, need="er")
    return pt.mean_werner, pt.fidelity_e2e


def intercity_fidelity_er(scn: IntercityScenario) -> float:
    """ER fidelity alone; needs only ``p`` and ``U1(k)``."""
    k, t = scn.k, scn.timing
    p, val_u1 = (float(x.real) for x in success_expectations(scn, [("one",), ("u", k, 2.0)]))
    if p <= 0.0:
        return math.nan
    mean_w = scn.w_m**2 * scn.w_b * math.exp(-k * t.t_msg) * val_u1 / p
    return 0.5 + 0.5 * mean_w * math.exp(-k * t.t_int_class / 2.0)


def intercity_fidelity_qr(scn: IntercityScenario) -> float:
    """QR fidelity alone; needs only ``U2(k)`` and ``U3(k)``."""
    k = scn.k
    (val_u2,) = success_expectations(scn, [("u", k, 2.5)])
    (val_u3,) = failure_expectations(scn, [("u3", k)])
    return _qr_from_terms(scn, float(val_u2.real), float(val_u3.real))
