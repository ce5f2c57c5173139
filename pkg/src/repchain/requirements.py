"""Minimal hardware requirements: cut-off domain, inner maximisation over t_cut and the optimiser.

Free parameters are searched in improvement-factor coordinates
``y in [0, 1]``: ``IF = 1 + y (IF_max - 1)``. Hardware cost is linear in ``y``
and ``y = 0`` is the baseline, so the box ``[baseline, optimistic]`` maps to
the unit cube.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import EmptyCutoffDomain, Infeasible
from .intercity import IntercityScenario, evaluate, intercity_fidelity_er, intercity_fidelity_qr
from .metro import MetroScenario, metro_fidelity_er, metro_fidelity_qr, metro_rate
from .params import (
    BASELINE_HW,
    DEFAULT_GEOMETRY,
    OPTIMISTIC_HW,
    Geometry,
    HardwareParams,
    ParamKind,
    Timing,
    derive_timing,
    get_param,
    improvement_factor,
    value_from_improvement,
    with_params,
)

F_TARGET = 2.0 / 3.0
OMEGA_PENALTY = 1e100
OMEGA_COST = 1.0


class ScenarioKind(enum.Enum):
    METRO_ER = "MetroER"
    METRO_QR = "MetroQR"
    INTERCITY_ER = "IntercityER"
    INTERCITY_QR = "IntercityQR"

    @property
    def is_metro(self) -> bool:
        return self in (ScenarioKind.METRO_ER, ScenarioKind.METRO_QR)

    @property
    def mode(self) -> str:
        return "ER" if self in (ScenarioKind.METRO_ER, ScenarioKind.INTERCITY_ER) else "QR"


# ---------------------------------------------------------------------------
# Cut-off domain and single evaluations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CutoffDomain:
    """Admissible cut-offs: integers ``t`` with ``lower < t <= upper`` (microseconds)."""

    lower: int
    upper: int

    @property
    def first(self) -> int:
        return self.lower + 1

    @property
    def size(self) -> int:
        return max(self.upper - self.lower, 0)

    def __contains__(self, t: int) -> bool:
        return self.lower < t <= self.upper


def cutoff_domain_for(timing: Timing, t_coh_us: float) -> CutoffDomain:
    # 1% of t_coh rounded up; the division by 100 is exact for whole microseconds
    one_percent = math.ceil(round(t_coh_us / 100.0, 9))
    lower = max(timing.t_m, timing.t_b, timing.t_msg, one_percent)
    upper = math.floor(round(t_coh_us, 9))
    if upper <= lower:
        raise EmptyCutoffDomain(f"t_coh = {t_coh_us} us leaves no cut-off above {lower} us")
    return CutoffDomain(lower, upper)


def cut_off_domain(scn: IntercityScenario) -> CutoffDomain:
    return cutoff_domain_for(scn.timing, scn.t_coh_us)


def fidelity_at(hw: HardwareParams, kind: ScenarioKind, t_cut: int | None, geometry: Geometry = DEFAULT_GEOMETRY) -> float:
    """Expected teleportation fidelity of ``hw`` (``t_cut`` is ignored for metro kinds)."""
    if kind.is_metro:
        scn = MetroScenario.from_hardware(hw, geometry, kind.mode)
        return metro_fidelity_er(scn) if kind.mode == "ER" else metro_fidelity_qr(scn)
    scn = IntercityScenario.from_hardware(hw, geometry, int(t_cut))
    return intercity_fidelity_er(scn) if kind.mode == "ER" else intercity_fidelity_qr(scn)


def rate_at(hw: HardwareParams, kind: ScenarioKind, t_cut: int | None, geometry: Geometry = DEFAULT_GEOMETRY) -> float:
    if kind.is_metro:
        return metro_rate(MetroScenario.from_hardware(hw, geometry, kind.mode))
    return evaluate(IntercityScenario.from_hardware(hw, geometry, int(t_cut)), need="er").rate


def _log_grid(dom: CutoffDomain, n: int) -> np.ndarray:
    if n < 2 or dom.size <= n:
        return np.arange(dom.first, dom.upper + 1, dtype=np.int64)
    pts = np.exp(np.linspace(math.log(dom.first), math.log(dom.upper), n))
    return np.unique(np.clip(np.round(pts), dom.first, dom.upper).astype(np.int64))


def _golden_max(f: Callable[[int], float], lo: int, hi: int, cache: dict[int, float]) -> int:
    """Integer maximiser of a unimodal ``f`` on ``[lo, hi]`` (golden-section, then a final scan)."""

    def val(t: int) -> float:
        if t not in cache:
            cache[t] = f(t)
        return cache[t]

    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    while hi - lo > 4:
        m1 = hi - int(round((hi - lo) * inv_phi))
        m2 = lo + int(round((hi - lo) * inv_phi))
        if m1 >= m2:
            m1, m2 = (lo + hi) // 2, (lo + hi) // 2 + 1
        if val(m1) >= val(m2):
            hi = m2
        else:
            lo = m1
    return max(range(lo, hi + 1), key=lambda t: (val(t), -t))


def best_over_tcut(
    hw: HardwareParams,
    kind: ScenarioKind,
    geometry: Geometry = DEFAULT_GEOMETRY,
    grid_points: int = 64,
    hint: int | None = None,
) -> tuple[float, int | None]:
    """Maximum expected fidelity over the cut-off domain and the maximising cut-off.

    ER fidelity is nonincreasing in the cut-off, so its maximum sits at the
    domain's first point. QR scans a logarithmic grid and refines the best
    cell to the exact integer optimum. ``hint`` adds an extra candidate.
    """
    if kind.is_metro:
        return fidelity_at(hw, kind, None, geometry), None
    dom = cutoff_domain_for(derive_timing(geometry), hw.t_coh_us)
    if kind.mode == "ER":
        return fidelity_at(hw, kind, dom.first, geometry), dom.first
    cache: dict[int, float] = {}

    def f(t: int) -> float:
        return fidelity_at(hw, kind, t, geometry)

    grid = _log_grid(dom, grid_points)
    vals = [cache.setdefault(int(t), f(int(t))) for t in grid]
    i = int(np.argmax(vals))
    lo = int(grid[max(i - 1, 0)])
    hi = int(grid[min(i + 1, len(grid) - 1)])
    _golden_max(f, lo, hi, cache)
    if hint is not None and hint in dom:
        cache.setdefault(int(hint), f(int(hint)))
    best = max(cache, key=lambda t: (cache[t], -t))
    return cache[best], best


def max_rate_at_target(
    hw: HardwareParams,
    kind: ScenarioKind,
    geometry: Geometry = DEFAULT_GEOMETRY,
    f_target: float = F_TARGET,
    grid_points: int = 64,
) -> tuple[float, int | None]:
    """Rate at the largest cut-off whose fidelity still meets ``f_target``.

    Beyond the fidelity-maximising cut-off the fidelity decreases, so the
    largest feasible cut-off is found by bisection on that side.
    """
    if kind.is_metro:
        if fidelity_at(hw, kind, None, geometry) < f_target:
            raise Infeasible(f"fidelity below target {f_target}")
        return rate_at(hw, kind, None, geometry), None
    dom = cutoff_domain_for(derive_timing(geometry), hw.t_coh_us)
    f_best, t_best = best_over_tcut(hw, kind, geometry, grid_points)
    if f_best < f_target:
        raise Infeasible(f"best fidelity {f_best:.6g} is below target {f_target}")
    lo, hi = t_best, dom.upper  # invariant: f(lo) >= target
    if fidelity_at(hw, kind, hi, geometry) >= f_target:
        lo = hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fidelity_at(hw, kind, mid, geometry) >= f_target:
            lo = mid
        else:
            hi = mid
    return rate_at(hw, kind, lo, geometry), lo


# ---------------------------------------------------------------------------
# Optimisation problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OptimProblem:
    """Minimise hardware cost over ``free`` parameters subject to a fidelity target.

    Non-free parameters take their values from ``fixed``. The search box for
    every free parameter is ``[baseline, optimistic]``; improvement factors
    are measured from ``baseline``.
    """

    kind: ScenarioKind
    free: tuple[ParamKind, ...]
    fixed: HardwareParams
    baseline: HardwareParams = BASELINE_HW
    optimistic: HardwareParams = OPTIMISTIC_HW
    f_target: float = F_TARGET
    weights: tuple[float, float] = (OMEGA_PENALTY, OMEGA_COST)
    restarts: int = 50
    seed: int = 0
    geometry: Geometry = DEFAULT_GEOMETRY
    grid_points: int = 64

    def __post_init__(self) -> None:
        if len(set(self.free)) != len(self.free):
            raise ValueError("free parameters must be distinct")
        for kind in self.free:
            lo, hi = get_param(self.baseline, kind), get_param(self.optimistic, kind)
            if lo > hi:
                raise ValueError(f"{kind.field}: baseline {lo} exceeds optimistic {hi}")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")

    def if_max(self) -> np.ndarray:
        return np.array(
            [improvement_factor(k, get_param(self.optimistic, k), get_param(self.baseline, k)) for k in self.free]
        )

    def hardware(self, y: Sequence[float]) -> HardwareParams:
        """Hardware at cube coordinates ``y`` (clipped into ``[0, 1]``)."""
        ifs = 1.0 + np.clip(np.asarray(y, dtype=float), 0.0, 1.0) * (self.if_max() - 1.0)
        values = {}
        for kind, factor in zip(self.free, ifs):
            lo, hi = get_param(self.baseline, kind), get_param(self.optimistic, kind)
            values[kind] = min(max(value_from_improvement(kind, float(factor), lo), lo), hi)
        return with_params(self.fixed, values)

    def point(self, hw: HardwareParams) -> dict[ParamKind, float]:
        return {k: get_param(hw, k) for k in self.free}

    def cost(self, hw: HardwareParams) -> float:
        return sum(improvement_factor(k, get_param(hw, k), get_param(self.baseline, k)) for k in self.free)


def question(name: str, mode: str, **overrides) -> OptimProblem:
    """The four hardware questions.

    q1: metro link alone (p_m0, t_coh, f_m). q2: intercity with an optimistic
    backbone (p_m0, t_coh, f_m). q3: intercity with an optimistic metro
    (p_b, f_b). q4: intercity, all five parameters.
    """
    mode = mode.upper()
    if mode not in ("ER", "QR"):
        raise ValueError(f"mode must be ER or QR, got {mode!r}")
    metro = (ParamKind.BASE_EFFICIENCY, ParamKind.COHERENCE_TIME, ParamKind.METRO_FIDELITY)
    backbone = (ParamKind.BACKBONE_PROB, ParamKind.BACKBONE_FIDELITY)
    inter = ScenarioKind.INTERCITY_ER if mode == "ER" else ScenarioKind.INTERCITY_QR
    table = {
        "q1": (ScenarioKind.METRO_ER if mode == "ER" else ScenarioKind.METRO_QR, metro, BASELINE_HW),
        "q2": (inter, metro, with_params(BASELINE_HW, {k: get_param(OPTIMISTIC_HW, k) for k in backbone})),
        "q3": (inter, backbone, with_params(BASELINE_HW, {k: get_param(OPTIMISTIC_HW, k) for k in metro})),
        "q4": (inter, metro + backbone, BASELINE_HW),
    }
    try:
        kind, free, fixed = table[name.lower()]
    except KeyError:
        raise ValueError(f"unknown question {name!r}; expected q1..q4") from None
    return OptimProblem(kind=kind, free=free, fixed=fixed, **overrides)


def scalarized_cost(hw: HardwareParams, problem: OptimProblem, fidelity: float | None = None) -> float:
    """Penalised cost: ``w1 (1 + (target - F)^2)`` when infeasible, plus ``w2 h``."""
    if fidelity is None:
        fidelity, _ = best_over_tcut(hw, problem.kind, problem.geometry, problem.grid_points)
    w1, w2 = problem.weights
    penalty = w1 * (1.0 + (problem.f_target - fidelity) ** 2) if fidelity < problem.f_target else 0.0
    return penalty + w2 * problem.cost(hw)


@dataclass(frozen=True)
class OptimResult:
    point: dict[ParamKind, float]
    hardware: HardwareParams
    t_cut_star: int | None
    fidelity: float
    rate: float
    cost_h: float
    per_param_if: dict[ParamKind, float]
    feasible: bool
    deficit: float = 0.0
    restarts_feasible: int = 0
    evaluations: int = 0

    def to_json(self) -> dict:
        return {
            "point": {k.field: v for k, v in self.point.items()},
            "t_cut_star_us": self.t_cut_star,
            "fidelity": self.fidelity,
            "rate_per_s": self.rate,
            "cost_h": self.cost_h,
            "improvement_factors": {k.field: v for k, v in self.per_param_if.items()},
            "feasible": self.feasible,
            "deficit": self.deficit,
            "restarts_feasible": self.restarts_feasible,
            "evaluations": self.evaluations,
        }


def make_result(problem: OptimProblem, hw: HardwareParams, hint: int | None = None, evaluations: int = 0,
                restarts_feasible: int = 0) -> OptimResult:
    """Certify ``hw``: best fidelity over the cut-off domain, rate there, cost and feasibility."""
    fid, t_star = best_over_tcut(hw, problem.kind, problem.geometry, problem.grid_points, hint=hint)
    feasible = fid >= problem.f_target
    rate = rate_at(hw, problem.kind, t_star, problem.geometry) if not math.isnan(fid) else 0.0
    ifs = {k: improvement_factor(k, get_param(hw, k), get_param(problem.baseline, k)) for k in problem.free}
    return OptimResult(
        point=problem.point(hw),
        hardware=hw,
        t_cut_star=t_star,
        fidelity=fid,
        rate=rate,
        cost_h=sum(ifs.values()),
        per_param_if=ifs,
        feasible=feasible,
        deficit=max(problem.f_target - fid, 0.0),
        restarts_feasible=restarts_feasible,
        evaluations=evaluations,
    )


# ---------------------------------------------------------------------------
# Local search
# ---------------------------------------------------------------------------


@dataclass
class _Objective:
    """Fidelity constraint on the cube, with the QR cut-off as an extra coordinate.

    For QR the cut-off is searched jointly: the last coordinate ``s`` maps to
    ``log t_cut`` over the widest domain in the box, and is clipped into each
    point's own domain. Maximising over ``t_cut`` inside the constraint is
    equivalent to asking for one cut-off that meets the target.
    """

    problem: OptimProblem
    evaluations: int = 0
    cache: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        p = self.problem
        self.joint = p.kind is ScenarioKind.INTERCITY_QR
        self.d = len(p.free)
        self.slope = p.if_max() - 1.0
        if not p.kind.is_metro:
            timing = derive_timing(p.geometry)
            t_lo = min(p.baseline.t_coh_us, p.fixed.t_coh_us)
            t_hi = max(p.optimistic.t_coh_us, p.fixed.t_coh_us)
            self.log_t_lo = math.log(cutoff_domain_for(timing, t_lo).first)
            self.log_t_hi = math.log(max(cutoff_domain_for(timing, t_hi).upper, math.e * cutoff_domain_for(timing, t_lo).first))
            self.timing = timing

    def t_cut(self, hw: HardwareParams, s: float | None) -> int | None:
        if self.problem.kind.is_metro:
            return None
        dom = cutoff_domain_for(self.timing, hw.t_coh_us)
        if not self.joint:
            return dom.first
        t = round(math.exp(self.log_t_lo + float(np.clip(s, 0.0, 1.0)) * (self.log_t_hi - self.log_t_lo)))
        return min(max(t, dom.first), dom.upper)

    def s_of(self, t: int) -> float:
        return (math.log(t) - self.log_t_lo) / (self.log_t_hi - self.log_t_lo)

    def split(self, x: np.ndarray) -> tuple[np.ndarray, float | None]:
        return (x[: self.d], float(x[self.d])) if self.joint else (x, None)

    def fidelity(self, x: np.ndarray) -> float:
        key = tuple(np.round(np.clip(x, 0.0, 1.0), 15))
        if key not in self.cache:
            y, s = self.split(np.asarray(key))
            hw = self.problem.hardware(y)
            try:
                f = fidelity_at(hw, self.problem.kind, self.t_cut(hw, s), self.problem.geometry)
            except EmptyCutoffDomain:
                f = 0.5
            self.evaluations += 1
            self.cache[key] = 0.5 if math.isnan(f) else f
        return self.cache[key]

    def gradient(self, x: np.ndarray) -> np.ndarray:
        f0 = self.fidelity(x)
        grad = np.zeros_like(x)
        for i in range(x.size):
            h = 1e-3 if (self.joint and i == self.d) else 1e-6
            xi = x.copy()
            step = h if x[i] + h <= 1.0 else -h
            xi[i] = x[i] + step
            grad[i] = (self.fidelity(xi) - f0) / step
        return grad


def _repair(obj: _Objective, x: np.ndarray) -> np.ndarray | None:
    """Push ``y`` toward the optimistic corner until the fidelity target is met (at fixed ``s``)."""
    target = obj.problem.f_target
    if obj.fidelity(x) >= target:
        return x
    y, s = obj.split(x)

    def at(lam: float) -> np.ndarray:
        yy = y + lam * (1.0 - y)
        return np.append(yy, s) if obj.joint else yy

    if obj.fidelity(at(1.0)) < target:
        return None
    lo, hi = 0.0, 1.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if obj.fidelity(at(mid)) >= target:
            hi = mid
        else:
            lo = mid
    return at(hi)


def _local_search(problem: OptimProblem, restart: int) -> tuple[np.ndarray, float, float, int]:
    """One seeded restart; returns ``(x, fidelity, cost, evaluations)``.

    SLSQP minimises the (linear) hardware cost subject to the fidelity
    constraint; an end point that misses the target by solver tolerance is
    repaired by moving toward the optimistic corner.
    """
    obj = _Objective(problem)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([problem.seed, restart])))
    dim = obj.d + (1 if obj.joint else 0)
    x0 = rng.random(dim)
    slope = np.append(obj.slope, 0.0) if obj.joint else obj.slope
    res = minimize(
        lambda x: float(slope @ np.clip(x, 0.0, 1.0)),
        x0,
        jac=lambda x: slope,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * dim,
        constraints=[{"type": "ineq", "fun": lambda x: obj.fidelity(x) - problem.f_target, "jac": obj.gradient}],
        options={"maxiter": 100, "ftol": 1e-10},
    )
    x = np.clip(res.x, 0.0, 1.0)
    fixed = _repair(obj, x)
    if fixed is None:
        return x, obj.fidelity(x), math.inf, obj.evaluations
    y, _ = obj.split(fixed)
    return fixed, obj.fidelity(fixed), float(problem.cost(problem.hardware(y))), obj.evaluations


def _restart_task(args: tuple[OptimProblem, int]) -> tuple[np.ndarray, float, float, int]:
    return _local_search(*args)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("QNET_THREADS", "1")))
    except ValueError:
        return 1


def optimize(problem: OptimProblem, workers: int | None = None) -> OptimResult:
    """Cheapest hardware within the box meeting the fidelity target.

    Returns the baseline when it is already feasible. Otherwise runs
    ``problem.restarts`` seeded local searches and keeps the cheapest
    feasible end point (ties go to lexicographically smaller values). When
    no restart is feasible the highest-fidelity end point is reported with
    ``feasible=False``.
    """
    base_hw = problem.hardware(np.zeros(len(problem.free)))
    base = make_result(problem, base_hw)
    if base.feasible or not problem.free or np.all(problem.if_max() <= 1.0):
        return base
    workers = default_workers() if workers is None else workers
    tasks = [(problem, r) for r in range(problem.restarts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_restart_task, tasks))
    else:
        outcomes = [_restart_task(t) for t in tasks]
    evaluations = sum(o[3] for o in outcomes) + base.evaluations
    obj = _Objective(problem)
    feasible = [o for o in outcomes if math.isfinite(o[2])]
    if feasible:
        def order(o):
            y, _ = obj.split(o[0])
            return (round(o[2], 12), tuple(get_param(problem.hardware(y), k) for k in problem.free))

        x, _, _, _ = min(feasible, key=order)
    else:
        x, _, _, _ = max(outcomes, key=lambda o: o[1])
    y, s = obj.split(x)
    hw = problem.hardware(y)
    hint = obj.t_cut(hw, s) if obj.joint else None
    result = make_result(problem, hw, hint=hint, evaluations=evaluations, restarts_feasible=len(feasible))
    if not feasible and base.fidelity > result.fidelity:
        result = replace(base, evaluations=evaluations)
    return result


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurfaceRow:
    p_m0: float
    t_coh: float
    f_min: float
    feasible: bool
    rate: float


def min_link_fidelity(
    hw: HardwareParams,
    kind: ScenarioKind,
    geometry: Geometry = DEFAULT_GEOMETRY,
    f_target: float = F_TARGET,
    f_hi: float = OPTIMISTIC_HW.f_m,
    tol: float = 1e-12,
) -> float | None:
    """Smallest metro link fidelity meeting ``f_target`` (bisection); ``None`` if ``f_hi`` fails."""

    def meets(f: float) -> bool:
        cand = replace(hw, f_m=f)
        return best_over_tcut(cand, kind, geometry)[0] >= f_target

    if not meets(f_hi):
        return None
    lo, hi = 0.25, f_hi  # a link of fidelity 1/4 carries no entanglement
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if meets(mid):
            hi = mid
        else:
            lo = mid
    return hi


def min_fidelity_surface(
    p_m0_grid: Sequence[float],
    t_coh_grid: Sequence[float],
    fixed: HardwareParams,
    kind: ScenarioKind,
    geometry: Geometry = DEFAULT_GEOMETRY,
    f_target: float = F_TARGET,
) -> list[SurfaceRow]:
    """Minimal metro link fidelity over a ``(p_m0, t_coh)`` grid, with the max rate at that fidelity."""
    rows = []
    for p_m0 in p_m0_grid:
        for t_coh in t_coh_grid:
            hw = replace(fixed, p_m0=float(p_m0), t_coh=float(t_coh))
            try:
                f_min = min_link_fidelity(hw, kind, geometry, f_target)
            except EmptyCutoffDomain:
                f_min = None
            if f_min is None:
                rows.append(SurfaceRow(float(p_m0), float(t_coh), math.nan, False, 0.0))
                continue
            rate, _ = max_rate_at_target(replace(hw, f_m=f_min), kind, geometry, f_target)
            rows.append(SurfaceRow(float(p_m0), float(t_coh), f_min, True, rate))
    return rows


@dataclass(frozen=True)
class RegionRow:
    p_b: float
    f_b: float
    feasible: bool
    max_rate: float
    t_cut: int | None


def feasibility_region(
    p_b_grid: Sequence[float],
    f_b_grid: Sequence[float],
    fixed: HardwareParams,
    kind: ScenarioKind,
    geometry: Geometry = DEFAULT_GEOMETRY,
    f_target: float = F_TARGET,
) -> list[RegionRow]:
    """Feasibility and maximal rate over a backbone ``(p_b, f_b)`` grid."""
    rows = []
    for p_b in p_b_grid:
        for f_b in f_b_grid:
            hw = replace(fixed, p_b=float(p_b), f_b=float(f_b))
            try:
                rate, t_cut = max_rate_at_target(hw, kind, geometry, f_target)
                rows.append(RegionRow(float(p_b), float(f_b), True, rate, t_cut))
            except (Infeasible, EmptyCutoffDomain):
                rows.append(RegionRow(float(p_b), float(f_b), False, 0.0, None))
    return rows


def reference_points() -> Mapping[str, dict[ParamKind, float]]:
    """Published optimal points, keyed by ``question-mode``."""
    pk = ParamKind
    return {
        "q1-QR": {pk.BASE_EFFICIENCY: 1.43e-2, pk.COHERENCE_TIME: 0.196, pk.METRO_FIDELITY: 0.88},
        "q2-QR": {pk.BASE_EFFICIENCY: 1.40e-2, pk.COHERENCE_TIME: 1.095, pk.METRO_FIDELITY: 0.94},
        "q3-QR": {pk.BACKBONE_PROB: 2.73e-3, pk.BACKBONE_FIDELITY: 0.64},
        "q4-ER": {
            pk.BASE_EFFICIENCY: 6.45e-4, pk.COHERENCE_TIME: 0.064, pk.METRO_FIDELITY: 0.89,
            pk.BACKBONE_PROB: 1.57e-6, pk.BACKBONE_FIDELITY: 0.67,
        },
        "q4-QR": {
            pk.BASE_EFFICIENCY: 1.41e-2, pk.COHERENCE_TIME: 1.128, pk.METRO_FIDELITY: 0.95,
            pk.BACKBONE_PROB: 4.16e-3, pk.BACKBONE_FIDELITY: 0.87,
        },
    }
