"""End-to-end acceptance checks.

Each test appends one ``PASS``/``FAIL`` line to the acceptance summary that
pytest prints at the end of the run. Running this file directly prints the
same lines without pytest.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, ORIGIN_NEIGHBOUR, POS_POS, SYMMETRIC
from quarterwalk import (
    Representation,
    StartPoint,
    WalkParams,
    dp_absorption,
    dp_genfunc,
    dp_tau,
    eval_h,
    eval_htilde,
    gamma_set_green,
    green_asymptotics,
    green_box,
    non_absorption_probability,
    s_tail,
    saddle,
    site_asymptotics,
    site_probability,
    tau_tail,
)
from quarterwalk.analytic import (
    boundary_residual,
    functional_equation_residual,
    green_constant_product,
    green_constant_via_h,
    link_identity_residual,
    ruin_series,
)
from quarterwalk.curve import branch_points
from quarterwalk.oracle import gambler_dp


def record(label: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")


@contextmanager
def budget(seconds: float, out: dict):
    start = time.perf_counter()
    yield
    out["elapsed"] = time.perf_counter() - start
    out["within"] = out["elapsed"] < seconds


def richardson(values: dict[int, float]) -> float:
    """Extrapolate ``f(k) = C + a/k + b/k^2`` to ``k -> infinity`` by least squares."""
    ks = np.array(sorted(values), dtype=float)
    design = np.column_stack([np.ones_like(ks), 1 / ks, 1 / ks**2])
    coef, *_ = np.linalg.lstsq(design, np.array([values[int(k)] for k in ks]), rcond=None)
    return float(coef[0])


def test_gamblers_ruin_exactness():
    clock: dict = {}
    worst = 0.0
    with budget(1.0, clock):
        for p_n, p_s in ((0.5, 0.5), (0.6, 0.4)):
            for m0 in (1, 2, 3):
                worst = max(worst, float(np.max(np.abs(gambler_dp(p_n, p_s, m0, 40) - ruin_series(p_n, p_s, m0, 40)))))
    ok = worst < 1e-12 and clock["within"]
    record("1 ruin-time exactness", ok, f"max |dp - series| = {worst:.2e} (tol 1e-12), {clock['elapsed']:.2f}s")
    assert ok


def _random_case(rng: np.random.Generator):
    horizontal = rng.uniform(0.3, 0.7)
    east = 0.5 if rng.random() < 0.25 else rng.uniform(0.5, 0.8)
    north = 0.5 if rng.random() < 0.25 else rng.uniform(0.5, 0.8)
    params = WalkParams(
        horizontal * east, horizontal * (1 - east), (1 - horizontal) * north, (1 - horizontal) * (1 - north)
    )
    start = StartPoint(int(rng.integers(1, 4)), int(rng.integers(1, 4)))
    z = rng.uniform(0.3, min(1.0, params.z1))
    bp = branch_points(params, z)
    while True:
        x = 0.9 * params.r * math.sqrt(rng.random()) * complex(np.exp(2j * np.pi * rng.random()))
        if abs(x - min(max(x.real, bp.x1), bp.x2)) > 1e-2:
            return params, start, x, z


def test_four_representation_agreement():
    rng = np.random.default_rng(20240601)
    clock: dict = {}
    spread = 0.0
    dp_excess = 0.0
    with budget(30.0, clock):
        for _ in range(50):
            params, start, x, z = _random_case(rng)
            values = [eval_h(params, start, x, z, rep).value for rep in Representation]
            spread = max(spread, max(abs(a - b) for a in values for b in values))
            dp, bound = dp_genfunc(params, start, x, z, 250)
            dp_excess = max(dp_excess, abs(values[0] - dp) - bound)
    ok = spread < 1e-8 and dp_excess < 1e-8 and clock["within"]
    record(
        "2 four representations",
        ok,
        f"max pairwise spread {spread:.2e}, max |h - dp| - tail bound {dp_excess:.2e} (tol 1e-8), {clock['elapsed']:.1f}s",
    )
    assert ok


def test_absorption_probability():
    clock: dict = {}
    worst_dp = 0.0
    worst_closed = 0.0
    with budget(60.0, clock):
        for start in (StartPoint(1, 1), StartPoint(2, 1), StartPoint(2, 3)):
            a = (1 - (2 / 3) ** start.n0) * (1 - (2 / 3) ** start.m0)
            assert non_absorption_probability(POS_POS, start) == pytest.approx(a, abs=1e-15)
            survival = dp_tau(POS_POS, start, 5000, grid_cap=60).survival[-1]
            worst_dp = max(worst_dp, abs(survival - a))
            total = eval_h(POS_POS, start, 1.0, 1.0).value.real + eval_htilde(POS_POS, start, 1.0, 1.0).value.real
            worst_closed = max(worst_closed, abs(total + a - 1))
    ok = worst_dp < 1e-3 and worst_closed < 1e-10 and clock["within"]
    record(
        "3 escape probability",
        ok,
        f"max |P(tau > 5000) - A| = {worst_dp:.2e} (tol 1e-3), max |h + h_tilde + A - 1| = {worst_closed:.2e}, "
        f"{clock['elapsed']:.1f}s",
    )
    assert ok


def test_zero_drift_hitting_tail():
    clock: dict = {}
    with budget(120.0, clock):
        table = dp_tau(SYMMETRIC, ORIGIN_NEIGHBOUR, 400, grid_cap=200)
        ks = range(200, 401, 25)
        s_limit = richardson({k: k**2 * table.s[k] for k in ks})
        tau_limit = richardson({k: k * table.survival[k - 1] for k in ks})
    s_target = 1 / (2 * math.pi * 0.25)
    tau_target = 4 / math.pi
    assert s_tail(SYMMETRIC, ORIGIN_NEIGHBOUR).constant == pytest.approx(s_target)
    assert tau_tail(SYMMETRIC, ORIGIN_NEIGHBOUR).constant == pytest.approx(tau_target)
    s_err = abs(s_limit / s_target - 1)
    tau_err = abs(tau_limit / tau_target - 1)
    ok = s_err < 0.05 and tau_err < 0.05 and clock["within"]
    record(
        "4 zero-drift hitting tails",
        ok,
        f"k^2 P(S=k) -> {s_limit:.5f} vs {s_target:.5f} ({s_err:.2%}), "
        f"k P(tau>=k) -> {tau_limit:.5f} vs {tau_target:.5f} ({tau_err:.2%}), tol 5%, {clock['elapsed']:.1f}s",
    )
    assert ok


def test_zero_drift_site_law():
    clock: dict = {}
    with budget(30.0, clock):
        limit = richardson({i: i**3 * site_probability(SYMMETRIC, ORIGIN_NEIGHBOUR, i) for i in range(40, 101, 10)})
    target = 4 / math.pi
    assert site_asymptotics(SYMMETRIC, ORIGIN_NEIGHBOUR).constant == pytest.approx(target)
    err = abs(limit / target - 1)
    ok = err < 0.05 and clock["within"]
    record("5 zero-drift site law", ok, f"i^3 h_i -> {limit:.6f} vs {target:.6f} ({err:.2%}, tol 5%), {clock['elapsed']:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def symmetric_green():
    clock: dict = {}
    with budget(300.0, clock):
        table = green_box(SYMMETRIC, ORIGIN_NEIGHBOUR, 800)
    return table, clock


def test_zero_drift_green_ratio(symmetric_green):
    table, clock = symmetric_green
    ratio = table.G[20, 20] / green_asymptotics(SYMMETRIC, ORIGIN_NEIGHBOUR, 20, 20).value
    ok = abs(ratio - 1) < 0.15 and clock["within"]
    record("6 zero-drift Green ratio", ok, f"G(20,20) lattice/law = {ratio:.5f} (tol 15%), box 800 in {clock['elapsed']:.1f}s")
    assert ok


def test_zero_drift_green_residual_bound(symmetric_green):
    # the exit probability of the box is the unresolved mass; the clause asks for < 1e-4 G(20, 20)
    table, _ = symmetric_green
    half = green_box(SYMMETRIC, ORIGIN_NEIGHBOUR, 400)
    relative = table.residual_bound / table.G[20, 20]
    change = abs(table.G[20, 20] - half.G[20, 20])
    ok = relative < 1e-4
    record(
        "6 zero-drift Green residual bound",
        ok,
        f"exit mass / G(20,20) = {relative:.2e} (tol 1e-4); change of G(20,20) from box 400 to 800 = {change:.1e}",
    )
    assert ok


def test_gamma_set_target_eight(symmetric_green):
    table, _ = symmetric_green
    value = 40 * table.diagonal_sum(1, 40)
    ok = abs(value / 8 - 1) < 0.10
    record("6 line-set Green, target 8", ok, f"k G = {value:.4f} at k = 40 vs 8 ({abs(value / 8 - 1):.1%}, tol 10%)")
    assert ok


def test_gamma_set_law(symmetric_green):
    table, _ = symmetric_green
    law = gamma_set_green(SYMMETRIC, ORIGIN_NEIGHBOUR, 1)
    value = 40 * table.diagonal_sum(1, 40)
    err = abs(value / law.constant - 1)
    ok = err < 0.10
    record("6 line-set Green, target 8/pi", ok, f"k G = {value:.4f} at k = 40 vs {law.constant:.4f} ({err:.1%}, tol 10%)")
    assert ok


def test_positive_drift_structure():
    p = POS_POS
    bp = branch_points(p, 1.0)
    y_bp = branch_points(p.swapped(), 1.0)
    flat, steep = saddle(p, 0.0), saddle(p, math.pi / 2)
    endpoint_err = max(abs(flat.s3 - bp.x3), abs(steep.s3 - p.r), abs(flat.t3 - p.r_tilde), abs(steep.t3 - y_bp.x3))
    constant_err = 0.0
    for start in (StartPoint(1, 1), StartPoint(2, 3)):
        for gamma in np.linspace(0.1, math.pi / 2 - 0.1, 7):
            a = green_constant_via_h(p, start, gamma)
            b = green_constant_product(p, start, gamma)
            constant_err = max(constant_err, abs(a - b))
    ok = endpoint_err < 1e-10 and constant_err < 1e-8
    record(
        "7 positive-drift structure",
        ok,
        f"saddle endpoint error {endpoint_err:.1e} (tol 1e-10), Green constant two ways {constant_err:.1e} (tol 1e-8)",
    )
    assert ok


def test_residual_battery():
    clock: dict = {}
    lines = []
    ok = True
    with budget(60.0, clock):
        for name, params in (("zero drift", SYMMETRIC), ("positive drift", POS_POS)):
            start = StartPoint(2, 1)
            bres = boundary_residual(params, start, 0.9, 64)
            fe = functional_equation_residual(params, start, 0.3, 0.4, 0.9)
            link = link_identity_residual(params, start, 1.2, 0.9)
            table = dp_absorption(params, start, i_cap=40, n_cap=400, grid_cap=120)
            mass = abs(table.h.sum() + table.h_tilde.sum() + table.tail_mass - 1)
            ok &= bres < 1e-8 and fe.ok and link < 1e-8 and mass < 1e-12
            lines.append(
                f"{name}: boundary {bres:.1e}, functional eq {fe.residual:.1e} <= {fe.bound:.1e}, "
                f"link {link:.1e}, mass {mass:.1e}"
            )
    ok &= clock["within"]
    record("8 residual battery", ok, "; ".join(lines) + f", {clock['elapsed']:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def positive_tail():
    clock: dict = {}
    with budget(120.0, clock):
        table = dp_tau(POS_POS, ORIGIN_NEIGHBOUR, 300)
    ks = np.arange(100, 301)
    return ks, np.log(table.s[ks]), clock


def test_positive_drift_raw_slope(positive_tail):
    ks, logs, clock = positive_tail
    target = math.log(s_tail(POS_POS, ORIGIN_NEIGHBOUR).base)
    slope = float(np.polyfit(ks, logs, 1)[0])
    err = abs(slope / target - 1)
    ok = err < 0.02 and clock["within"]
    record("9 tail base, raw log slope", ok, f"slope {slope:.5f} vs log B = {target:.5f} ({err:.1%}, tol 2%)")
    assert ok


def test_positive_drift_tail_base(positive_tail):
    # fit log P(S=k) = alpha + beta k - 1.5 log k, the k^(-3/2) factor being part of the law
    ks, logs, clock = positive_tail
    target = math.log(s_tail(POS_POS, ORIGIN_NEIGHBOUR).base)
    beta = float(np.polyfit(ks, logs + 1.5 * np.log(ks), 1)[0])
    err = abs(beta / target - 1)
    ok = err < 0.02 and clock["within"]
    record(
        "9 tail base, with k^-1.5 factor",
        ok,
        f"beta {beta:.5f} vs log B = {target:.5f} ({err:.2%}, tol 2%), {clock['elapsed']:.1f}s",
    )
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
