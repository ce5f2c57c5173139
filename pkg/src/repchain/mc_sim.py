"""Monte-Carlo oracle for the intercity and metro protocols, plus a density-matrix teleportation oracle.

The intercity sampler never loops over time slots: elementary-link durations
are geometric draws. Whole runs (rounds until the first success) are sampled
with a thinning construction that is exact for every round which can possibly
succeed; long stretches of rounds that are certain to fail contribute only
their total duration (see ``simulate_runs``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .intercity import IntercityScenario
from .metro import MetroScenario

Mode = Literal["ER", "QR"]

# Below this many consecutive sure-to-fail rounds, every round is sampled.
EXACT_BLOCK = 64
# Number of sure-to-fail rounds used to estimate the block-sum moments.
PILOT_ROUNDS = 100_000
LOG_UNDERFLOW = math.log(1e-300)


@dataclass(frozen=True)
class RoundOutcome:
    """One intercity round. Times in microseconds; ``w_e2e`` is NaN on failure."""

    y: bool
    z: float
    w_e2e: float
    x1: int
    x2: int
    xb: int

    @property
    def x_max(self) -> int:
        return max(self.x1, self.x2, self.xb)

    @property
    def x_min(self) -> int:
        return min(self.x1, self.x2, self.xb)


@dataclass(frozen=True)
class McConfig:
    scenario: IntercityScenario | MetroScenario
    mode: Mode = "ER"
    batches: int = 100
    runs_per_batch: int = 100
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.batches < 1 or self.runs_per_batch < 1:
            raise ValueError("batches and runs_per_batch must be positive")
        if self.mode not in ("ER", "QR"):
            raise ValueError(f"mode must be 'ER' or 'QR', got {self.mode!r}")


@dataclass(frozen=True)
class McStats:
    """Batch statistics. Percentiles are nearest-rank over batch means."""

    mean_fidelity: float
    mean_rate: float
    p5: float
    p95: float
    rate_p5: float
    rate_p95: float
    n_rounds_total: int
    batch_fidelity: tuple[float, ...]
    batch_e2e_us: tuple[float, ...]


@dataclass(frozen=True)
class RunSamples:
    """Per-run results of one simulation: both fidelities come from the same runs."""

    fidelity_er: np.ndarray
    fidelity_qr: np.ndarray
    e2e_us: np.ndarray
    n_rounds: np.ndarray

    def fidelity(self, mode: Mode) -> np.ndarray:
        return self.fidelity_er if mode == "ER" else self.fidelity_qr


def batch_rng(master_seed: int, batch: int) -> np.random.Generator:
    """Independent stream of batch ``batch``, derived from ``(master_seed, batch)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([master_seed & (2**64 - 1), batch])))


def nearest_rank(values: np.ndarray, pct: float) -> float:
    """Nearest-rank percentile: the smallest value with at least ``pct`` percent at or below it."""
    ordered = np.sort(np.asarray(values, dtype=float))
    if ordered.size == 0:
        raise ValueError("percentile of an empty sample")
    rank = max(1, math.ceil(pct / 100.0 * ordered.size))
    return float(ordered[rank - 1])


# ---------------------------------------------------------------------------
# Werner bookkeeping
# ---------------------------------------------------------------------------


def x_diff(x1: np.ndarray, x2: np.ndarray, xb: np.ndarray) -> np.ndarray:
    """Decoherence exposure of a successful round: ``2Xb - X1 - X2`` if the backbone link is strictly last."""
    x1, x2, xb = (np.asarray(v, dtype=float) for v in (x1, x2, xb))
    hi = np.maximum(np.maximum(x1, x2), xb)
    lo = np.minimum(np.minimum(x1, x2), xb)
    return np.where(xb > np.maximum(x1, x2), 2.0 * xb - x1 - x2, hi - lo)


def werner_sequential(x1: float, x2: float, xb: float, w_m: float, w_b: float, k: float, t_msg: float) -> float:
    """End-to-end Werner parameter by replaying link creation, decay and swaps in time order.

    Links: 1 (end to border J1), b (J1 to J2), 2 (J2 to end). A stored link
    decays by ``exp(-k dt)``; a swap multiplies Werner parameters and happens
    as soon as both links at a border node exist.
    """
    segments: list[list] = []  # each: [left, right, w]
    events = sorted([(x1, 0, 1, w_m), (xb, 1, 2, w_b), (x2, 2, 3, w_m)])
    now = events[0][0]
    for t, left, right, w in events:
        for seg in segments:
            seg[2] *= math.exp(-k * (t - now))
        now = t
        segments.append([left, right, w])
        merged = True
        while merged:
            merged = False
            for s in segments:
                for u in segments:
                    if s is not u and s[1] == u[0]:
                        segments.remove(s)
                        segments.remove(u)
                        segments.append([s[0], u[1], s[2] * u[2]])
                        merged = True
                        break
                if merged:
                    break
    (only,) = segments
    return only[2] * math.exp(-k * t_msg)


# ---------------------------------------------------------------------------
# Naive per-round sampling
# ---------------------------------------------------------------------------


def sample_round(rng: np.random.Generator, scn: IntercityScenario) -> RoundOutcome:
    """Draw one round: geometric attempt counts, cut-off check, duration and Werner parameter."""
    t = scn.timing
    m1, m2 = rng.geometric(scn.p_m, size=2)
    mb = rng.geometric(scn.p_b)
    x1, x2, xb = int(m1) * t.t_m, int(m2) * t.t_m, int(mb) * t.t_b
    hi, lo = max(x1, x2, xb), min(x1, x2, xb)
    if hi - lo <= scn.t_cut - 1:
        w = scn.w_m**2 * scn.w_b * math.exp(-scn.k * (float(x_diff(x1, x2, xb)) + t.t_msg))
        return RoundOutcome(True, float(hi + t.t_msg), w, x1, x2, xb)
    return RoundOutcome(False, float(lo + scn.t_cut), math.nan, x1, x2, xb)


def simulate_run(rng: np.random.Generator, scn: IntercityScenario) -> tuple[float, float, float]:
    """Repeat rounds until success; returns ``(fidelity_er, fidelity_qr, e2e_time_us)``."""
    t_int = scn.timing.t_int_class
    total = 0.0
    while True:
        r = sample_round(rng, scn)
        total += r.z
        if r.y:
            break
    base = r.w_e2e * math.exp(-scn.k * t_int / 2.0)
    log_wait = -scn.k * total / 2.0
    wait = math.exp(log_wait) if log_wait > LOG_UNDERFLOW else 0.0
    return 0.5 * (1.0 + base), 0.5 * (1.0 + base * wait), total


# ---------------------------------------------------------------------------
# Thinned run sampler
# ---------------------------------------------------------------------------


class _Thinning:
    """Exact conditional sampling of the backbone attempt count given the metro links.

    For metro durations ``X1, X2`` a round succeeds iff ``Mb`` lies in the
    integer window ``[j_lo, j_hi]``, with probability ``s(X1, X2) <= s_max``.
    """

    def __init__(self, scn: IntercityScenario) -> None:
        self.scn = scn
        self.a, self.b = scn.timing.t_m, scn.timing.t_b
        self.c = scn.t_cut - 1
        self.log_qb = math.log1p(-scn.p_b) if scn.p_b < 1 else -math.inf
        width = 2 * self.c // self.b + 1
        self.s_max = 1.0 if scn.p_b >= 1 else min(1.0, -math.expm1(width * self.log_qb))

    def window(self, x1: np.ndarray, x2: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        hi, lo = np.maximum(x1, x2), np.minimum(x1, x2)
        j_lo = np.maximum(1, -((-(hi - self.c)) // self.b))
        j_hi = (lo + self.c) // self.b
        j_hi = np.where(hi - lo > self.c, j_lo - 1, j_hi)  # metro spread alone already fails
        n = np.maximum(j_hi - j_lo + 1, 0)
        with np.errstate(invalid="ignore"):
            s = np.where(n > 0, self._q_pow(j_lo - 1) * -np.expm1(n * self.log_qb), 0.0)
        return j_lo, j_hi, s

    def _q_pow(self, j: np.ndarray) -> np.ndarray:
        if self.log_qb == -math.inf:
            return np.where(j == 0, 1.0, 0.0)
        return np.exp(j * self.log_qb)

    def _geom(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.geometric(self.scn.p_b, size=size).astype(np.int64)

    def inside(self, rng: np.random.Generator, j_lo: np.ndarray, j_hi: np.ndarray) -> np.ndarray:
        """``Mb`` conditioned on ``j_lo <= Mb <= j_hi`` (inverse CDF of the truncated geometric)."""
        if self.log_qb == -math.inf:
            return j_lo.copy()
        n = j_hi - j_lo + 1
        u = rng.random(j_lo.shape)
        # P(Mb - j_lo < r | window) = (1 - q^r) / (1 - q^n)
        frac = u * -np.expm1(n * self.log_qb)
        r = np.ceil(np.log1p(-frac) / self.log_qb)
        return j_lo + np.clip(r, 1, n).astype(np.int64) - 1

    def outside(self, rng: np.random.Generator, j_lo: np.ndarray, j_hi: np.ndarray) -> np.ndarray:
        """``Mb`` conditioned on missing the window (unconditional when the window is empty)."""
        size = j_lo.shape[0]
        mb = self._geom(rng, size)
        empty = j_hi < j_lo
        if self.log_qb == -math.inf:
            return np.where(empty, mb, np.where(j_lo > 1, 1, j_hi + 1))
        below_mass = -np.expm1((j_lo - 1) * self.log_qb)  # P(Mb < j_lo)
        above_mass = np.exp(j_hi * self.log_qb)  # P(Mb > j_hi)
        u = rng.random(size)
        pick_below = u * (below_mass + above_mass) < below_mass
        # below: truncated geometric on [1, j_lo - 1]
        v = rng.random(size)
        with np.errstate(divide="ignore", invalid="ignore"):
            below = np.ceil(np.log1p(-v * below_mass) / self.log_qb)
        below = np.clip(np.nan_to_num(below, nan=1.0), 1, np.maximum(j_lo - 1, 1)).astype(np.int64)
        above = j_hi + mb  # memoryless tail
        return np.where(empty, mb, np.where(pick_below, below, above))

    def metro(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        m = rng.geometric(self.scn.p_m, size=(2, size)).astype(np.int64) * self.a
        return m[0], m[1]

    def sure_failures(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Durations of rounds drawn given that the envelope did not fire (always failures)."""
        x1, x2 = self.metro(rng, size)
        j_lo, j_hi, _ = self.window(x1, x2)
        xb = self.outside(rng, j_lo, j_hi) * self.b
        return (np.minimum(np.minimum(x1, x2), xb) + self.scn.t_cut).astype(float)


def simulate_runs(scn: IntercityScenario, n_runs: int, rng: np.random.Generator) -> RunSamples:
    """Simulate ``n_runs`` independent runs of rounds-until-success.

    Each round draws a uniform ``U``; it can only succeed when ``U < s_max``,
    so the number of rounds until that happens is ``Geo(s_max)``. The rounds
    before it fail for sure; they are sampled one by one when there are at
    most ``EXACT_BLOCK`` of them, and otherwise only their summed duration is
    drawn from a normal law with moments estimated from a pilot sample. The
    envelope round succeeds with probability ``s(X1, X2) / s_max``.
    """
    th = _Thinning(scn)
    t = scn.timing
    mu = var = 0.0
    if th.s_max < 1.0:
        pilot = th.sure_failures(rng, PILOT_ROUNDS)
        mu, var = float(pilot.mean()), float(pilot.var(ddof=1))
    fail_time = np.zeros(n_runs)
    rounds = np.zeros(n_runs, dtype=np.int64)
    w_e2e = np.zeros(n_runs)
    z_success = np.zeros(n_runs)
    active = np.arange(n_runs)
    while active.size:
        n_act = active.size
        skip = rng.geometric(th.s_max, size=n_act).astype(np.int64) - 1 if th.s_max < 1 else np.zeros(n_act, np.int64)
        exact = skip <= EXACT_BLOCK
        if np.any(exact & (skip > 0)):
            owner = np.repeat(np.arange(n_act)[exact], skip[exact])
            durations = th.sure_failures(rng, owner.size)
            fail_time[active] += np.bincount(owner, weights=durations, minlength=n_act)
        big = ~exact
        if np.any(big):
            nb = skip[big].astype(float)
            fail_time[active[big]] += rng.normal(nb * mu, np.sqrt(nb * var))
        rounds[active] += skip + 1
        # the envelope round
        x1, x2 = th.metro(rng, n_act)
        j_lo, j_hi, s = th.window(x1, x2)
        ok = rng.random(n_act) * th.s_max < s
        if np.any(ok):
            xb = th.inside(rng, j_lo[ok], j_hi[ok]) * th.b
            a1, a2 = x1[ok], x2[ok]
            idx = active[ok]
            w_e2e[idx] = scn.w_m**2 * scn.w_b * np.exp(-scn.k * (x_diff(a1, a2, xb) + t.t_msg))
            z_success[idx] = np.maximum(np.maximum(a1, a2), xb) + t.t_msg
        if np.any(~ok):
            miss = ~ok
            xb = th.outside(rng, j_lo[miss], j_hi[miss]) * th.b
            fail_time[active[miss]] += np.minimum(np.minimum(x1[miss], x2[miss]), xb) + scn.t_cut
        active = active[~ok]
    base = w_e2e * math.exp(-scn.k * t.t_int_class / 2.0)
    log_wait = -scn.k * (fail_time + z_success) / 2.0
    wait = np.where(log_wait > LOG_UNDERFLOW, np.exp(np.maximum(log_wait, LOG_UNDERFLOW)), 0.0)
    return RunSamples(0.5 * (1.0 + base), 0.5 * (1.0 + base * wait), fail_time + z_success, rounds)


def simulate_metro_runs(scn: MetroScenario, n_runs: int, rng: np.random.Generator) -> RunSamples:
    """Metro teleportation: geometric attempts of ``t_mprime`` plus the classical message."""
    t = scn.timing
    m = rng.geometric(scn.p_mprime, size=n_runs).astype(np.int64)
    base = scn.w_mprime * math.exp(-t.t_m_class / scn.t_coh_us)
    wait = np.exp(-m * t.t_mprime / scn.t_coh_us)
    e2e = m * float(t.t_mprime) + 2.0 * t.t_m_class
    er = np.full(n_runs, 0.5 * (1.0 + base))
    return RunSamples(er, 0.5 * (1.0 + base * wait), e2e, m)


def simulate_batches(
    scn: IntercityScenario | MetroScenario, batches: int, runs_per_batch: int, master_seed: int
) -> list[RunSamples]:
    """One ``RunSamples`` per batch, each from its own derived stream."""
    out = []
    for i in range(batches):
        rng = batch_rng(master_seed, i)
        if isinstance(scn, MetroScenario):
            out.append(simulate_metro_runs(scn, runs_per_batch, rng))
        else:
            out.append(simulate_runs(scn, runs_per_batch, rng))
    return out


def batch_rate(e2e_us: np.ndarray, t_int_us: float) -> float:
    """Rate estimate of a batch: inverse of the mean run time plus the classical message."""
    return 1e6 / (t_int_us + float(np.mean(e2e_us)))


def summarize(samples: list[RunSamples], mode: Mode, t_int_us: float) -> McStats:
    fid = np.array([float(np.mean(s.fidelity(mode))) for s in samples])
    e2e = np.array([float(np.mean(s.e2e_us)) for s in samples])
    rates = 1e6 / (t_int_us + e2e)
    return McStats(
        mean_fidelity=float(fid.mean()),
        mean_rate=batch_rate(np.concatenate([s.e2e_us for s in samples]), t_int_us),
        p5=nearest_rank(fid, 5),
        p95=nearest_rank(fid, 95),
        rate_p5=nearest_rank(rates, 5),
        rate_p95=nearest_rank(rates, 95),
        n_rounds_total=int(sum(int(s.n_rounds.sum()) for s in samples)),
        batch_fidelity=tuple(float(f) for f in fid),
        batch_e2e_us=tuple(float(e) for e in e2e),
    )


def _t_int(scn: IntercityScenario | MetroScenario) -> float:
    # metro runs already include both classical messages in their duration
    return 0.0 if isinstance(scn, MetroScenario) else float(scn.timing.t_int_class)


def run_batches(config: McConfig) -> McStats:
    """Deterministic batch statistics for ``config``."""
    samples = simulate_batches(config.scenario, config.batches, config.runs_per_batch, config.master_seed)
    return summarize(samples, config.mode, _t_int(config.scenario))


# ---------------------------------------------------------------------------
# Density-matrix teleportation oracle
# ---------------------------------------------------------------------------

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
_PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2.0)


def _kron(*ops: np.ndarray) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def werner_state(w: float) -> np.ndarray:
    return w * np.outer(_PHI_PLUS, _PHI_PLUS.conj()) + (1.0 - w) * np.eye(4, dtype=complex) / 4.0


def depolarize(rho: np.ndarray, keep: float) -> np.ndarray:
    """Single-qubit depolarising channel ``keep * rho + (1 - keep) * I/2``."""
    return keep * rho + (1.0 - keep) * np.trace(rho) * _I2 / 2.0


def teleport_density(phi: np.ndarray, w: float, p_d: float, t_class: float, t_coh: float, check=None) -> np.ndarray:
    """Output state of teleporting ``phi`` with a Werner resource.

    Qubit order: 1 data, 2 sender half, 3 receiver half. The data qubit is
    depolarised to ``p_d`` before the circuit; the receiver's qubit waits
    ``t_class`` for the classical outcome.
    """
    check = check or (lambda rho: None)
    phi = np.asarray(phi, dtype=complex)
    phi = phi / np.linalg.norm(phi)
    data = depolarize(np.outer(phi, phi.conj()), p_d)
    rho = np.kron(data, werner_state(w))
    check(rho)
    proj0, proj1 = np.diag([1, 0]).astype(complex), np.diag([0, 1]).astype(complex)
    cnot12 = _kron(proj0, _I2, _I2) + _kron(proj1, _X, _I2)
    rho = cnot12 @ rho @ cnot12.conj().T
    check(rho)
    h1 = _kron(_H, _I2, _I2)
    rho = h1 @ rho @ h1.conj().T
    check(rho)
    out = np.zeros((2, 2), dtype=complex)
    for m1 in (0, 1):
        for m2 in (0, 1):
            proj = _kron(proj1 if m1 else proj0, proj1 if m2 else proj0, _I2)
            branch = (proj @ rho @ proj).reshape(2, 2, 2, 2, 2, 2)
            reduced = np.einsum("abiabj->ij", branch)  # trace out the measured qubits
            fix = np.linalg.matrix_power(_Z, m1) @ np.linalg.matrix_power(_X, m2)
            out += fix @ reduced @ fix.conj().T
    check(out)
    out = depolarize(out, math.exp(-t_class / t_coh))
    check(out)
    return out


def dm_teleport_oracle(
    w: float, p_d: float, t_class: float, t_coh: float, phi: np.ndarray | None = None
) -> float:
    """Fidelity ``<phi|rho_out|phi>`` of the exact density-matrix teleportation."""
    if phi is None:
        phi = np.array([1.0, 0.0], dtype=complex)
    phi = np.asarray(phi, dtype=complex) / np.linalg.norm(phi)
    rho = teleport_density(phi, w, p_d, t_class, t_coh)
    return float(np.real(phi.conj() @ rho @ phi))


def teleport_fidelity_closed_form(w: float, p_d: float, t_class: float, t_coh: float) -> float:
    return 0.5 * (1.0 + w * p_d * math.exp(-t_class / t_coh))
