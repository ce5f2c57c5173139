"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 analytic value outside the
Monte-Carlo band, 4 infeasible optimisation.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys
from dataclasses import replace
from typing import ContextManager, Iterable, Sequence, TextIO

import numpy as np

from .errors import ConfigError, RepchainError
from .intercity import IntercityScenario, evaluate
from .mc_sim import simulate_batches, summarize
from .metro import MetroScenario, metro_fidelity_er, metro_fidelity_qr, metro_rate
from .params import (
    OPTIMISTIC_HW,
    Geometry,
    HardwareParams,
    config_from_mapping,
    config_to_mapping,
    get_param,
    load_config,
    with_params,
)
from .requirements import (
    ScenarioKind,
    feasibility_region,
    min_fidelity_surface,
    optimize,
    question,
)

EXIT_OK, EXIT_CONFIG, EXIT_BAND, EXIT_INFEASIBLE = 0, 2, 3, 4


def fmt(x: object) -> str:
    """17 significant digits for floats so CSV output round-trips exactly."""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if x is None:
        return ""
    return str(x)


def write_csv(out: TextIO, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def parse_grid(spec: str, integer: bool = False) -> list[float]:
    """``lo:hi:n`` (linear) or ``lo:hi:n:log``; ``n = 0`` gives an empty grid."""
    parts = spec.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
        raise ConfigError(f"grid must be lo:hi:n or lo:hi:n:log, got {spec!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad grid {spec!r}: {exc}") from None
    if n < 0 or lo > hi:
        raise ConfigError(f"grid needs lo <= hi and n >= 0, got {spec!r}")
    if n == 0:
        return []
    if len(parts) == 4 and parts[3] == "log":
        if lo <= 0:
            raise ConfigError("log grid needs a positive lower end")
        pts = np.exp(np.linspace(math.log(lo), math.log(hi), n))
    else:
        pts = np.linspace(lo, hi, n)
    if integer:
        return [int(v) for v in dict.fromkeys(int(round(p)) for p in pts)]
    return [float(p) for p in pts]


def load_parameters(args: argparse.Namespace) -> tuple[HardwareParams, Geometry]:
    if args.config:
        hw, geo = load_config(args.config)
    else:
        hw, geo = config_from_mapping({"preset": args.preset})
    return hw, geo


def _open_out(path: str | None) -> ContextManager[TextIO]:
    return open(path, "w", newline="") if path else contextlib.nullcontext(sys.stdout)


def _t_cuts(args: argparse.Namespace) -> list[int]:
    if args.tcut_us is not None and args.tcut_grid:
        raise ConfigError("give either --tcut-us or --tcut-grid, not both")
    if args.tcut_us is not None:
        return [int(args.tcut_us)]
    if args.tcut_grid:
        return parse_grid(args.tcut_grid, integer=True)
    raise ConfigError("this command needs --tcut-us or --tcut-grid")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_metro(args: argparse.Namespace) -> int:
    hw, geo = load_parameters(args)
    scn = MetroScenario.from_hardware(hw, geo)
    with _open_out(args.out) as out:
        write_csv(
            out,
            ["p_m0", "t_coh_s", "f_m", "fidelity_er", "fidelity_qr", "rate_per_s"],
            [[hw.p_m0, hw.t_coh, hw.f_m, metro_fidelity_er(scn), metro_fidelity_qr(scn), metro_rate(scn)]],
        )
    return EXIT_OK


def cmd_intercity(args: argparse.Namespace) -> int:
    hw, geo = load_parameters(args)
    rows = []
    for t_cut in _t_cuts(args):
        pt = evaluate(IntercityScenario.from_hardware(hw, geo, t_cut))
        rows.append([t_cut, pt.p, pt.e2e_time_us, pt.rate, pt.fidelity_e2e, pt.fidelity_er, pt.fidelity_qr])
    with _open_out(args.out) as out:
        write_csv(out, ["t_cut_us", "p", "e2e_time_us", "rate_per_s", "fidelity_e2e", "fidelity_er", "fidelity_qr"], rows)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    """Analytic values against Monte-Carlo percentile bands over a grid."""
    hw, geo = load_parameters(args)
    mode = args.mode.upper()
    mc_hw = replace(hw, t_coh=args.mc_t_coh) if args.mc_t_coh is not None else hw
    rows, bad = [], []
    if args.scenario == "metro":
        grid = parse_grid(args.pm0_grid) if args.pm0_grid else [hw.p_m0]
        points = [(p, replace(hw, p_m0=p), replace(mc_hw, p_m0=p)) for p in grid]
        label = "p_m0"
    else:
        points = [(t, t, t) for t in _t_cuts(args)]
        label = "t_cut_us"
    for i, (x, a_side, m_side) in enumerate(points):
        if args.scenario == "metro":
            a_scn, m_scn = MetroScenario.from_hardware(a_side, geo), MetroScenario.from_hardware(m_side, geo)
            fid = metro_fidelity_er(a_scn) if mode == "ER" else metro_fidelity_qr(a_scn)
            rate, t_int = metro_rate(a_scn), 0.0
        else:
            a_scn = IntercityScenario.from_hardware(hw, geo, int(x))
            m_scn = IntercityScenario.from_hardware(mc_hw, geo, int(x))
            pt = evaluate(a_scn)
            fid = pt.fidelity_er if mode == "ER" else pt.fidelity_qr
            rate, t_int = pt.rate, float(a_scn.timing.t_int_class)
        stats = summarize(simulate_batches(m_scn, args.batches, args.runs, args.seed + i), mode, t_int)
        fid_ok = stats.p5 <= fid <= stats.p95
        rate_ok = stats.rate_p5 <= rate <= stats.rate_p95
        rows.append([x, fid, rate, stats.mean_fidelity, stats.p5, stats.p95, stats.mean_rate, stats.rate_p5,
                     stats.rate_p95, int(fid_ok and rate_ok)])
        if not (fid_ok and rate_ok):
            bad.append(f"{label}={fmt(x)}: fidelity {fid:.6g} band [{stats.p5:.6g}, {stats.p95:.6g}], "
                       f"rate {rate:.6g} band [{stats.rate_p5:.6g}, {stats.rate_p95:.6g}]")
    with _open_out(args.out) as out:
        write_csv(out, [label, "analytic_fidelity", "analytic_rate", "mc_mean", "mc_p5", "mc_p95", "mc_rate",
                        "mc_rate_p5", "mc_rate_p95", "in_band"], rows)
    if bad:
        print(f"{len(bad)} of {len(rows)} points outside the Monte-Carlo band:", file=sys.stderr)
        for line in bad:
            print("  " + line, file=sys.stderr)
        return EXIT_BAND
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    if not args.question:
        raise ConfigError("optimize needs --question")
    hw, geo = load_parameters(args)
    problem = question(args.question, args.mode, restarts=args.restarts, seed=args.seed, geometry=geo)
    if args.config:
        # parameters outside the question's free set come from the configuration
        problem = replace(problem, fixed=hw)
    if args.no_improvement:
        problem = replace(problem, optimistic=with_params(OPTIMISTIC_HW, {k: get_param(problem.baseline, k) for k in problem.free}))
    result = optimize(problem)
    doc = {"question": args.question, "mode": args.mode.upper(), **result.to_json()}
    with _open_out(args.out) as out:
        json.dump(doc, out, indent=2)
        out.write("\n")
    if not result.feasible and not args.allow_infeasible:
        print(f"infeasible: best fidelity {result.fidelity:.6g}, deficit {result.deficit:.3g}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    hw, geo = load_parameters(args)
    q = (args.question or "").lower()
    kind_er = args.mode.upper() == "ER"
    if q in ("q1", "q2"):
        if not (args.pm0_grid is not None and args.tcoh_grid is not None):
            raise ConfigError("surface sweeps need --pm0-grid and --tcoh-grid")
        if q == "q1":
            kind = ScenarioKind.METRO_ER if kind_er else ScenarioKind.METRO_QR
        else:
            kind = ScenarioKind.INTERCITY_ER if kind_er else ScenarioKind.INTERCITY_QR
        fixed = question(q, args.mode).fixed if not args.config else hw
        rows = min_fidelity_surface(parse_grid(args.pm0_grid), parse_grid(args.tcoh_grid), fixed, kind, geo)
        header = ["p_m0", "t_coh_s", "f_m_min", "feasible", "rate_per_s"]
        data = [[r.p_m0, r.t_coh, r.f_min, int(r.feasible), r.rate] for r in rows]
    elif q == "q3":
        if not (args.pb_grid is not None and args.fb_grid is not None):
            raise ConfigError("region sweeps need --pb-grid and --fb-grid")
        kind = ScenarioKind.INTERCITY_ER if kind_er else ScenarioKind.INTERCITY_QR
        fixed = question("q3", args.mode).fixed if not args.config else hw
        rows = feasibility_region(parse_grid(args.pb_grid), parse_grid(args.fb_grid), fixed, kind, geo)
        header = ["p_b", "f_b", "feasible", "max_rate_per_s", "t_cut_us"]
        data = [[r.p_b, r.f_b, int(r.feasible), r.max_rate, r.t_cut] for r in rows]
    else:
        raise ConfigError("sweep needs --question q1, q2 or q3")
    with _open_out(args.out) as out:
        write_csv(out, header, data)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "metro": cmd_metro,
    "intercity": cmd_intercity,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repchain", description="Repeater-chain teleportation analysis.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--preset", choices=["baseline", "optimistic"], default="baseline")
    parser.add_argument("--config", help="JSON file of parameter values (missing keys use the baseline)")
    parser.add_argument("--dump-config", action="store_true", help="print the resolved configuration and exit")
    parser.add_argument("--mode", type=str.lower, choices=["er", "qr"], default="er")
    parser.add_argument("--scenario", choices=["intercity", "metro"], default="intercity", help="validate only")
    parser.add_argument("--tcut-us", type=int)
    parser.add_argument("--tcut-grid", help="cut-off grid in microseconds, lo:hi:n or lo:hi:n:log")
    parser.add_argument("--pm0-grid", help="base-efficiency grid, lo:hi:n[:log]")
    parser.add_argument("--tcoh-grid", help="coherence-time grid in seconds, lo:hi:n[:log]")
    parser.add_argument("--pb-grid", help="backbone success-probability grid, lo:hi:n[:log]")
    parser.add_argument("--fb-grid", help="backbone fidelity grid, lo:hi:n[:log]")
    parser.add_argument("--batches", type=int, default=100)
    parser.add_argument("--runs", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--mc-t-coh", type=float, help="override t_coh (s) on the Monte-Carlo side only")
    parser.add_argument("--question", type=str.lower, choices=["q1", "q2", "q3", "q4"])
    parser.add_argument("--restarts", type=int, default=50)
    parser.add_argument("--no-improvement", action="store_true", help="pin the free parameters at baseline")
    parser.add_argument("--allow-infeasible", action="store_true")
    parser.add_argument("--out", help="output file (default: standard output)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.batches < 1 or args.runs < 1 or args.restarts < 1:
            raise ConfigError("--batches, --runs and --restarts must be positive")
        if args.dump_config:
            hw, geo = load_parameters(args)
            with _open_out(args.out) as out:
                json.dump(config_to_mapping(hw, geo), out, indent=2)
                out.write("\n")
            return EXIT_OK
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RepchainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
