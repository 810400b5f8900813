"""Command-line front end: run the lattice, integral and asymptotic paths side by side.

Exit codes: 0 when every tolerance gate passes, 2 on invalid input, 3 when a
gate fails. Output is deterministic for a fixed command line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analytic, asymptotic, oracle
from .analytic import Representation
from .errors import QuarterWalkError
from .walk import DriftClass, StartPoint, WalkParams, load_config, non_absorption_probability

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_GATE = 3

SYMMETRIC = {"p_e": 0.25, "p_w": 0.25, "p_n": 0.25, "p_s": 0.25}


@dataclass
class RunSpec:
    command: str
    params: WalkParams
    start: StartPoint
    caps: dict[str, object]
    fmt: str = "csv"
    out: Path | None = None
    seed: int | None = None
    options: dict[str, object] = field(default_factory=dict)


@dataclass
class Report:
    columns: list[str]
    rows: list[list[object]]
    meta: dict[str, object]
    gates: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.gates.values())


def _cell(value: object) -> object:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return value


def _json_value(value: object) -> object:
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def render(report: Report, fmt: str) -> str:
    meta = dict(report.meta)
    meta["gates"] = {name: bool(ok) for name, ok in report.gates.items()}
    if fmt == "json":
        payload = dict(meta)
        payload["columns"] = report.columns
        payload["data"] = [[_json_value(v) for v in row] for row in report.rows]
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"
    out = io.StringIO()
    out.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_cell(v) for v in row])
    return out.getvalue()


def _ratio(a: float, b: float) -> float:
    return a / b if b != 0 else math.nan


def _base_meta(spec: RunSpec) -> dict[str, object]:
    return {
        "command": spec.command,
        "params": spec.params.as_dict(),
        "start": {"n0": spec.start.n0, "m0": spec.start.m0},
        "regime": spec.params.drift_class.value,
        "caps": spec.caps,
    }


def cmd_absorb_site(spec: RunSpec) -> Report:
    """Per-site absorption probabilities on the x-axis from the three paths."""
    p, st = spec.params, spec.start
    i_cap, n_cap = int(spec.caps["icap"]), int(spec.caps["ncap"])
    grid = int(spec.caps["grid"])
    table = oracle.dp_absorption(p, st, i_cap, n_cap, grid_cap=grid)
    dp_sites = table.site_totals()[0]
    law = asymptotic.site_asymptotics(p, st, "x")
    tail = table.tail_mass
    rows, within = [], True
    for i in range(1, i_cap + 1):
        exact = analytic.site_probability(p, st, i)
        approx = law(i)
        # the DP misses exactly the absorptions after the time cap
        gap = exact - dp_sites[i]
        within &= -1e-9 <= gap <= tail + 1e-9
        rows.append([i, dp_sites[i], exact, approx, _ratio(dp_sites[i], exact), _ratio(exact, approx)])
    meta = _base_meta(spec)
    meta["tail_mass"] = tail
    meta["law"] = {"constant": law.constant, "power": law.power, "base": law.base}
    return Report(
        ["i", "h_dp", "h_analytic", "h_asymptotic", "dp_over_analytic", "analytic_over_asymptotic"],
        rows,
        meta,
        {"dp_within_tail_mass": bool(within)},
    )


def cmd_absorb_time(spec: RunSpec) -> Report:
    """Hitting-time distributions of the axes and the boundary against their laws."""
    p, st = spec.params, spec.start
    n_cap, stride = int(spec.caps["ncap"]), int(spec.options.get("stride", 1))
    tau = oracle.dp_tau(p, st, n_cap, grid_cap=int(spec.caps["grid"]))
    s_law, t_law, tau_law = asymptotic.s_tail(p, st), asymptotic.t_tail(p, st), asymptotic.tau_tail(p, st)
    rows = []
    for k in range(stride, n_cap + 1, stride):
        tau_ge = tau.survival[k - 1]
        rows.append([
            k, tau.s[k], tau.t[k], tau.survival[k],
            s_law(k), t_law(k), tau_law(k),
            _ratio(tau.s[k], s_law(k)), _ratio(tau.t[k], t_law(k)), _ratio(tau_ge, tau_law(k)),
        ])
    conservation = abs(tau.s.sum() + tau.t.sum() + tau.survival[-1] - 1.0)
    meta = _base_meta(spec)
    meta["tail_mass"] = float(tau.survival[-1])
    meta["escaped_mass"] = float(tau.escaped[-1])
    meta["laws"] = {
        name: {"constant": law.constant, "power": law.power, "base": law.base}
        for name, law in (("S", s_law), ("T", t_law), ("tau", tau_law))
    }
    return Report(
        ["k", "P_S_eq_k", "P_T_eq_k", "P_tau_gt_k", "law_S", "law_T", "law_tau_ge",
         "ratio_S", "ratio_T", "ratio_tau_ge"],
        rows,
        meta,
        {"mass_conservation": conservation < 1e-12},
    )


def cmd_green(spec: RunSpec) -> Report:
    """Expected visits to ``(i, j)`` from a box solve against the asymptotic law."""
    p, st = spec.params, spec.start
    i, j = int(spec.options["i"]), int(spec.options["j"])
    box = int(spec.caps["box"])
    if max(i, j) >= box:
        raise QuarterWalkError(f"site ({i}, {j}) must lie inside the box of size {box}")
    table = oracle.green_box(p, st, box)
    law = asymptotic.green_asymptotics(p, st, i, j)
    dp = float(table.G[i, j])
    meta = _base_meta(spec)
    meta["tail_mass"] = table.residual_bound
    if law.s3 is not None:
        meta["saddle"] = {"gamma": law.gamma, "s3": law.s3, "t3": law.t3}
    row = [i, j, dp, law.value, _ratio(dp, law.value), table.residual_bound]
    return Report(["i", "j", "G_dp", "G_law", "ratio", "exit_mass"], [row], meta)


def cmd_martin(spec: RunSpec) -> Report:
    """Martin kernel along sampled directions and along both axes."""
    p, st = spec.params, spec.start
    half = bool(spec.options.get("half_exponent", False))
    if spec.options.get("gamma") is not None:
        gammas = [float(spec.options["gamma"])]
    else:
        count = int(spec.options.get("gamma_grid", 100))
        gammas = list(np.linspace(0.0, math.pi / 2, count)) if count > 1 else [0.0]
    rows: list[list[object]] = [
        ["gamma", g, asymptotic.martin_kernel(p, st, g, half)] for g in gammas
    ]
    for axis in ("axis-x", "axis-y"):
        rows.append([axis, math.nan, asymptotic.martin_kernel(p, st, axis, half)])
    values = [row[2] for row in rows[: len(gammas)]]
    jumps = np.abs(np.diff(values)) if len(values) > 1 else np.zeros(1)
    meta = _base_meta(spec)
    meta["max_adjacent_jump"] = float(jumps.max())
    gates = {}
    if len(gammas) > 1 and gammas[0] == 0.0:
        gates["gamma_0_matches_axis_x"] = abs(values[0] - rows[len(gammas)][2]) <= 1e-9 * max(1.0, abs(values[0]))
    return Report(["direction", "gamma", "kernel"], rows, meta, gates)


def _four_representations(p: WalkParams, st: StartPoint, x: float, z: float) -> tuple[float, list[str]]:
    values, used = [], []
    for rep in Representation:
        try:
            values.append(analytic.eval_h(p, st, x, z, rep).value)
            used.append(rep.value)
        except QuarterWalkError:
            continue
    spread = max(abs(a - b) for a in values for b in values) if values else math.nan
    return spread, used


def cmd_verify(spec: RunSpec) -> Report:
    """Battery of cross-path residuals with a pass/fail verdict per gate."""
    p, st = spec.params, spec.start
    x, z = float(spec.options.get("x", 0.3)), float(spec.options.get("z", 0.9))
    n_cap = int(spec.caps["ncap"])
    rows: list[list[object]] = []
    gates: dict[str, bool] = {}

    def record(name: str, value: float, bound: float) -> None:
        ok = bool(value <= bound)
        gates[name] = ok
        rows.append([name, value, bound, "pass" if ok else "fail"])

    spread, used = _four_representations(p, st, x, z)
    record("representation_spread", spread, 1e-8)
    dp_value, dp_tail = oracle.dp_genfunc(p, st, x, z, n_cap, grid_cap=int(spec.caps["grid"]))
    h = analytic.eval_h(p, st, x, z).value
    record("h_vs_dp", abs(h - dp_value), dp_tail + 1e-8)
    record("boundary_jump", analytic.boundary_residual(p, st, z, n_samples=16), 1e-9)
    fe = analytic.functional_equation_residual(p, st, x, 0.4, z, n_cap=n_cap, grid_cap=int(spec.caps["grid"]))
    record("functional_equation", fe.residual, fe.bound)
    if p.r_tilde < 1.0:
        y = 0.5 * (1.0 + p.r_tilde)
        record("link_identity", analytic.link_identity_residual(p, st, y, min(z, 1.0)), 1e-9)
    table = oracle.dp_absorption(p, st, 1, n_cap, grid_cap=int(spec.caps["grid"]))
    total = table.h.sum() + table.h_tilde.sum() + table.beyond_cap_mass + table.interior_mass + table.escaped_mass
    record("mass_conservation", abs(total - 1.0), 1e-12)
    if p.drift_class is DriftClass.POS_POS:
        a = non_absorption_probability(p, st)
        record("green_constant_two_routes", abs(
            analytic.green_constant_via_h(p, st, math.pi / 4) - analytic.green_constant_product(p, st, math.pi / 4)
        ), 1e-8)
        rows.append(["non_absorption_probability", a, math.nan, "info"])
    meta = _base_meta(spec)
    meta["x"], meta["z"] = x, z
    meta["representations"] = used
    return Report(["check", "value", "bound", "status"], rows, meta, gates)


COMMANDS = {
    "absorb-site": cmd_absorb_site,
    "absorb-time": cmd_absorb_time,
    "green": cmd_green,
    "martin": cmd_martin,
    "verify": cmd_verify,
}


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    walk = common.add_argument_group("walk")
    walk.add_argument("--params", type=Path, help="key=value file with p_e, p_w, p_n, p_s, n0, m0")
    for name in ("p-e", "p-w", "p-n", "p-s"):
        walk.add_argument(f"--{name}", type=float, dest=name.replace("-", "_"))
    walk.add_argument("--n0", type=_positive_int)
    walk.add_argument("--m0", type=_positive_int)
    out = common.add_argument_group("output")
    out.add_argument("--format", choices=("csv", "json"), default="csv")
    out.add_argument("--out", type=Path, help="write here instead of stdout")
    out.add_argument("--seed", type=int, help="recorded in the output; all paths are deterministic")

    parser = argparse.ArgumentParser(prog="quarterwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    site = sub.add_parser("absorb-site", parents=[common], help="absorption probability per x-axis site")
    site.add_argument("--icap", type=_positive_int, default=50)
    site.add_argument("--ncap", type=_positive_int, default=2000)
    site.add_argument("--grid", type=_positive_int, default=300)

    time = sub.add_parser("absorb-time", parents=[common], help="hitting-time tails")
    time.add_argument("--ncap", type=_positive_int, default=400)
    time.add_argument("--grid", type=_positive_int, help="lattice size (default n0 + ncap)")
    time.add_argument("--stride", type=_positive_int, default=1)

    green = sub.add_parser("green", parents=[common], help="expected visits to one site")
    green.add_argument("--i", type=_positive_int, required=True)
    green.add_argument("--j", type=_positive_int, required=True)
    green.add_argument("--box", type=_positive_int, help="box size of the linear solve (default 20 max(i, j), at least 200)")

    martin = sub.add_parser("martin", parents=[common], help="Martin kernel by direction")
    martin.add_argument("--gamma", type=float)
    martin.add_argument("--gamma-grid", type=_positive_int, default=100)
    martin.add_argument("--half-exponent", action="store_true", help="axis values with halved r exponents, for comparison")

    verify = sub.add_parser("verify", parents=[common], help="cross-path residual battery")
    verify.add_argument("--x", type=float, default=0.3)
    verify.add_argument("--z", type=float, default=0.9)
    verify.add_argument("--ncap", type=_positive_int, default=200)
    verify.add_argument("--grid", type=_positive_int, help="lattice size (default n0 + ncap)")
    return parser


def _resolve_walk(args: argparse.Namespace) -> tuple[WalkParams, StartPoint]:
    values: dict[str, float | int] = {}
    if args.params is not None:
        values.update(load_config(args.params))
    for key in ("p_e", "p_w", "p_n", "p_s", "n0", "m0"):
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    given = [k for k in SYMMETRIC if k in values]
    if given and len(given) < 4:
        missing = sorted(set(SYMMETRIC) - set(given))
        raise QuarterWalkError(f"incomplete jump probabilities, missing {', '.join(missing)}")
    probs = {k: float(values.get(k, SYMMETRIC[k])) for k in SYMMETRIC}
    start = StartPoint(int(values.get("n0", 1)), int(values.get("m0", 1)))
    return WalkParams(**probs), start


def make_spec(args: argparse.Namespace) -> RunSpec:
    params, start = _resolve_walk(args)
    caps: dict[str, object] = {}
    options: dict[str, object] = {}
    cmd = args.command
    if cmd == "absorb-site":
        caps = {"icap": args.icap, "ncap": args.ncap, "grid": max(args.grid, args.icap + 1)}
    elif cmd in ("absorb-time", "verify"):
        grid = args.grid or max(start.n0, start.m0) + args.ncap
        caps = {"ncap": args.ncap, "grid": grid}
        if cmd == "absorb-time":
            options["stride"] = args.stride
        else:
            options.update(x=args.x, z=args.z)
    elif cmd == "green":
        caps = {"box": args.box or max(200, 20 * max(args.i, args.j))}
        options.update(i=args.i, j=args.j)
    elif cmd == "martin":
        options.update(gamma=args.gamma, gamma_grid=args.gamma_grid, half_exponent=args.half_exponent)
        caps = {"gamma_grid": 1 if args.gamma is not None else args.gamma_grid}
    return RunSpec(cmd, params, start, caps, args.format, args.out, args.seed, options)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = make_spec(args)
        report = COMMANDS[spec.command](spec)
    except (QuarterWalkError, OSError) as exc:
        print(f"quarterwalk: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_INVALID
    if spec.seed is not None:
        report.meta["seed"] = spec.seed
    text = render(report, spec.fmt)
    if spec.out is None:
        sys.stdout.write(text)
    else:
        spec.out.write_text(text, encoding="utf-8")
    if not report.passed:
        failed = ", ".join(name for name, ok in report.gates.items() if not ok)
        print(f"quarterwalk: gate failed: {failed}", file=sys.stderr)
        return EXIT_GATE
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
