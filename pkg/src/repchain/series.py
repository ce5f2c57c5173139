"""Power series whose exponents are floors or ceilings of a rational multiple of the index.

Every sum here has the shape ``sum_i x**i * y**e(i)`` where ``e(i)`` is built from
``ceil(i*q - alpha)`` or ``floor(i*q - alpha)``. Because ``q`` is rational, the
exponent pattern repeats after ``z_star(q)`` steps, so an infinite sum equals a
one-period sum divided by ``1 - ratio**z_star``.

Rationals are carried as :class:`fractions.Fraction` and all floors and
ceilings are computed in integer arithmetic. Finite sums are evaluated term
by term; the closed forms are used only for ``u = math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .errors import DivergentSeries

Rational = Fraction | int
Variant = Literal["c", "f", "cc", "cf", "ff"]
VARIANTS: tuple[Variant, ...] = ("c", "f", "cc", "cf", "ff")


def as_fraction(value: float | int | str | Fraction) -> Fraction:
    """Exact rational for ``value``; floats are read through their shortest repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if not math.isfinite(value):
        raise ValueError(f"cannot convert {value} to a rational")
    return Fraction(repr(float(value)))


def ceil_frac(v: Fraction) -> int:
    return -((-v.numerator) // v.denominator)


def floor_frac(v: Fraction) -> int:
    return v.numerator // v.denominator


def z_star(q: Rational) -> int:
    """Smallest positive ``z`` with ``z*q`` integral."""
    q = as_fraction(q)
    if q <= 0:
        raise ValueError(f"q must be positive, got {q}")
    return q.denominator


def z_bar(r: Rational, q: Rational) -> int:
    """Smallest positive ``z`` with both ``z*r`` and ``z*r*q`` integral."""
    r, q = as_fraction(r), as_fraction(q)
    if r <= 0 or q <= 0:
        raise ValueError(f"r and q must be positive, got r={r}, q={q}")
    # z*r integral  <=>  den(r) | z ;  z*r*q integral  <=>  den(r*q) | z
    return math.lcm(r.denominator, (r * q).denominator)


@dataclass(frozen=True)
class SeriesArgs:
    """Arguments of the sum primitives.

    ``u`` may be ``math.inf``. ``sigma`` is the second shift of the two-exponent
    variants, ``s`` the extra base of :func:`gamma_sum` and :func:`delta_sum`,
    and ``r``/``kappa`` the inner-range slope and shift of :func:`delta_sum`.
    """

    x: complex
    y: complex
    q: Fraction
    l: int
    u: int | float
    alpha: Fraction = Fraction(0)
    sigma: Fraction = Fraction(0)
    s: complex = 1.0
    r: Fraction = Fraction(1)
    kappa: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        for name in ("q", "alpha", "sigma", "r", "kappa"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.q <= 0 or self.r <= 0:
            raise ValueError("q and r must be positive")
        if int(self.l) != self.l:
            raise ValueError(f"lower bound must be an integer, got {self.l}")
        object.__setattr__(self, "l", int(self.l))
        if self.u != math.inf:
            if int(self.u) != self.u:
                raise ValueError(f"upper bound must be an integer or inf, got {self.u}")
            object.__setattr__(self, "u", int(self.u))


def _exponents(variant: str, i: int, q: Fraction, alpha: Fraction, sigma: Fraction) -> tuple[int, int]:
    """(total y-exponent, floor(iq - alpha)) for index ``i``."""
    first = i * q - alpha
    second = i * q - sigma
    if variant == "c":
        return ceil_frac(first), 0
    if variant == "f":
        return floor_frac(first), 0
    if variant == "cc":
        return ceil_frac(first) + ceil_frac(second), 0
    if variant == "cf":
        return ceil_frac(first) + floor_frac(second), 0
    if variant == "ff":
        f1 = floor_frac(first)
        return f1 + floor_frac(second), f1
    raise ValueError(f"unknown variant {variant!r}")


def _pi_theta_direct(variant: str, a: SeriesArgs, lo: int, hi: int) -> tuple[complex, complex]:
    """Direct (Pi, Theta) partial sums over ``lo..hi`` in index order."""
    pi = 0.0
    theta = 0.0
    for i in range(lo, hi + 1):
        e, f1 = _exponents(variant, i, a.q, a.alpha, a.sigma)
        term = a.x**i * a.y**e
        pi += term
        theta += (f1 if variant == "ff" else i) * term
    return pi, theta


def _y_power(y: complex, e: Fraction) -> complex:
    """``y**e`` for an exponent that is an integer on every call site here."""
    if e.denominator != 1:
        raise AssertionError("period exponent must be integral")
    return y ** int(e)


def _period_ratio(a: SeriesArgs, y_slope: Fraction, period: int, with_s: Fraction | None = None) -> complex:
    """``(x * y**y_slope * s**with_s) ** period`` using integral exponents only."""
    ratio = a.x**period * _y_power(a.y, y_slope * period)
    if with_s is not None:
        ratio *= _y_power(a.s, with_s * period)
    if not abs(ratio) < 1.0:
        raise DivergentSeries(f"period ratio {ratio} is not below 1 in modulus")
    return ratio


def pi_sum(variant: Variant, args: SeriesArgs) -> complex:
    """``sum_{i=l}^{u} x**i * y**e(i)`` for the exponent pattern ``variant``.

    ``c``/``f`` use ``ceil``/``floor(iq - alpha)``; ``cc``, ``cf`` and ``ff`` add a
    second ceiling or floor of ``iq - sigma``.
    """
    if args.u != math.inf:
        return _pi_theta_direct(variant, args, args.l, int(args.u))[0]
    z = z_star(args.q)
    slope = args.q if variant in ("c", "f") else 2 * args.q
    ratio = _period_ratio(args, slope, z)
    pi1, _ = _pi_theta_direct(variant, args, args.l, args.l + z - 1)
    return pi1 / (1.0 - ratio)


def theta_sum(variant: Variant, args: SeriesArgs) -> complex:
    """Index-weighted version of :func:`pi_sum`.

    The weight is ``i`` for every variant except ``ff``, which is weighted by
    ``floor(iq - alpha)``.
    """
    if args.u != math.inf:
        return _pi_theta_direct(variant, args, args.l, int(args.u))[1]
    z = z_star(args.q)
    slope = args.q if variant in ("c", "f") else 2 * args.q
    ratio = _period_ratio(args, slope, z)
    pi1, theta1 = _pi_theta_direct(variant, args, args.l, args.l + z - 1)
    # One period later the weight grows by z (or by z*q for the floor weight).
    step = z * args.q if variant == "ff" else z
    return theta1 / (1.0 - ratio) + float(step) * ratio * pi1 / (1.0 - ratio) ** 2


def _gamma_direct(a: SeriesArgs, lo: int, hi: int) -> complex:
    total = 0.0
    for i in range(lo, hi + 1):
        total += a.x**i * a.y ** floor_frac(i * a.q) * a.s ** floor_frac(i * a.q - a.alpha)
    return total


def gamma_sum(args: SeriesArgs) -> complex:
    """``sum_{i=l}^{u} x**i * y**floor(iq) * s**floor(iq - alpha)``."""
    if args.u != math.inf:
        return _gamma_direct(args, args.l, int(args.u))
    z = z_star(args.q)
    ratio = _period_ratio(args, args.q, z, with_s=args.q)
    return _gamma_direct(args, args.l, args.l + z - 1) / (1.0 - ratio)


def _delta_direct(a: SeriesArgs, lo: int, hi: int) -> complex:
    total = 0.0
    for i in range(lo, hi + 1):
        inner = 0.0
        for j in range(ceil_frac(i * a.r - a.kappa), floor_frac(i * a.r) + 1):
            inner += a.y**j * a.s ** ceil_frac(j * a.q)
        total += a.x**i * inner
    return total


def delta_sum(args: SeriesArgs) -> complex:
    """``sum_i x**i * sum_{j=ceil(ir - kappa)}^{floor(ir)} y**j * s**ceil(jq)``."""
    if args.u != math.inf:
        return _delta_direct(args, args.l, int(args.u))
    z = z_bar(args.r, args.q)
    ratio = _period_ratio(args, args.r, z, with_s=args.r * args.q)
    return _delta_direct(args, args.l, args.l + z - 1) / (1.0 - ratio)


def series_term(kind: str, args: SeriesArgs, i: int) -> complex:
    """Single summand at index ``i``; ``kind`` is a Pi variant, ``theta_<variant>``, ``gamma`` or ``delta``."""
    single = SeriesArgs(
        args.x, args.y, args.q, i, i, args.alpha, args.sigma, args.s, args.r, args.kappa
    )
    if kind in VARIANTS:
        return pi_sum(kind, single)  # type: ignore[arg-type]
    if kind.startswith("theta_"):
        return theta_sum(kind[len("theta_"):], single)  # type: ignore[arg-type]
    if kind == "gamma":
        return gamma_sum(single)
    if kind == "delta":
        return delta_sum(single)
    raise ValueError(f"unknown series kind {kind!r}")


# ---------------------------------------------------------------------------
# Vectorised log-domain helpers used by the intercity engine.
# ---------------------------------------------------------------------------


def geo(lam: np.ndarray | complex, n: np.ndarray | int) -> np.ndarray:
    """``sum_{k=0}^{n-1} exp(lam*k)``, accurate for ``lam`` near zero; 0 for ``n <= 0``."""
    lam = np.asarray(lam, dtype=complex)
    n = np.asarray(n)
    nn = np.maximum(n, 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.expm1(nn * lam) / np.expm1(lam)
    return np.where(lam == 0, nn.astype(float), val)


def geo_tail(lam: np.ndarray | complex) -> np.ndarray:
    """``sum_{k>=0} exp(lam*k)``; requires ``Re(lam) < 0``."""
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam.real >= 0):
        raise DivergentSeries("geometric tail with non-decaying ratio")
    return -1.0 / np.expm1(lam)


def floor_window_sums(
    lx: np.ndarray,
    ly: np.ndarray,
    q: Fraction,
    lo: np.ndarray,
    n: np.ndarray | None,
    offset: np.ndarray | int = 0,
) -> np.ndarray:
    """``sum_{m=lo}^{lo+n-1} exp(lx*(m-1) + ly*(floor(m*q) - offset))`` for arrays of windows.

    ``lx`` and ``ly`` have shape ``(T,)`` and ``lo``/``n`` shape ``(A,)``; the
    result has shape ``(T, A)``. ``n=None`` means an infinite window. The
    floor pattern repeats after ``P = den(q)`` steps with the floor shifted by
    ``num(q)``, so each window reduces to a number of whole periods plus a
    remainder, and only window sums of length below ``P`` are evaluated directly.
    """
    q = as_fraction(q)
    period, shift = q.denominator, q.numerator
    lx = np.asarray(lx, dtype=complex)[:, None]
    ly = np.asarray(ly, dtype=complex)[:, None]
    lo = np.asarray(lo, dtype=np.int64)
    offset = np.broadcast_to(np.asarray(offset, dtype=np.int64), lo.shape)
    log_rho = lx * period + ly * shift  # (T, 1)

    def partial(lengths: np.ndarray) -> np.ndarray:
        # sum over m = lo .. lo + lengths - 1 with lengths <= period, computed
        # relative to nothing (absolute exponents) to avoid cancellation.
        out = np.zeros((lx.shape[0], lo.shape[0]), dtype=complex)
        max_len = int(lengths.max(initial=0))
        if max_len == 0:
            return out
        if lo.shape[0] * max_len <= 400_000:
            k = np.arange(max_len)
            m = lo[:, None] + k[None, :]  # (A, K)
            fl = (m * shift) // period - offset[:, None]
            mask = k[None, :] < lengths[:, None]
            expo = lx[:, :, None] * (m - 1)[None] + ly[:, :, None] * fl[None]
            terms = np.where(mask[None], np.exp(np.where(mask[None], expo, 0.0)), 0.0)
            return terms.sum(axis=2)
        for k in range(max_len):
            m = lo + k
            fl = (m * shift) // period - offset
            active = k < lengths
            out += np.where(active[None, :], np.exp(lx * (m - 1)[None] + ly * fl[None]), 0.0)
        return out

    if n is None:
        if np.any(log_rho.real >= 0):
            raise DivergentSeries("floor series with non-decaying period ratio")
        full = partial(np.full(lo.shape, period))
        return full * (-1.0 / np.expm1(log_rho))
    n = np.maximum(np.asarray(n, dtype=np.int64), 0)
    whole, rest = n // period, n % period
    if np.any(whole > 0):
        full = partial(np.where(whole > 0, period, 0))
        head = full * geo(log_rho, whole[None, :])
    else:
        head = 0.0
    tail = partial(rest) * np.exp(log_rho * whole[None, :])
    return head + tail
