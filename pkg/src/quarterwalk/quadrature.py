"""Gauss rules for the weight sqrt(1 - u^2) and integrals along the cuts of the curve."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal

import numpy as np

from .curve import CurveCoeffs, branch_points, dt_du, t_pm
from .errors import NonFiniteIntegrand, PoleNearContour
from .walk import WalkParams

DEFAULT_NODES = 96
DEFAULT_TOL = 1e-11
DEFAULT_MAX_NODES = 1536
POLE_CLEARANCE = 1e-9

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    node_count: int
    error_estimate: float

    @property
    def converged(self) -> bool:
        return self.error_estimate <= DEFAULT_TOL * max(1.0, abs(self.value))


@lru_cache(maxsize=64)
def chebyshev_u_rule(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``n_nodes``-point Gauss rule for weight sqrt(1 - u^2)."""
    k = np.arange(1, n_nodes + 1)
    angle = k * math.pi / (n_nodes + 1)
    nodes = np.cos(angle)
    weights = (math.pi / (n_nodes + 1)) * np.sin(angle) ** 2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _apply_rule(f: Integrand, n_nodes: int) -> complex:
    nodes, weights = chebyshev_u_rule(n_nodes)
    values = np.asarray(f(nodes))
    if not np.all(np.isfinite(values)):
        bad = nodes[~np.isfinite(values)][0]
        raise NonFiniteIntegrand(f"integrand is not finite at u={bad!r}")
    return complex(np.sum(weights * values))


def gauss_chebyshev_U(f: Integrand, n_nodes: int = DEFAULT_NODES) -> QuadratureResult:
    """Integral of ``f(u) sqrt(1 - u^2)`` over [-1, 1] with a fixed node count.

    The error estimate compares against the rule with half as many nodes.
    """
    if n_nodes < 2:
        raise ValueError("n_nodes must be at least 2")
    value = _apply_rule(f, n_nodes)
    coarse = _apply_rule(f, max(n_nodes // 2, 1))
    return QuadratureResult(value, n_nodes, abs(value - coarse))


def integrate_chebyshev_U(
    f: Integrand,
    n_start: int = DEFAULT_NODES,
    tol: float = DEFAULT_TOL,
    n_max: int = DEFAULT_MAX_NODES,
) -> QuadratureResult:
    """Like :func:`gauss_chebyshev_U` but doubles the node count until stable."""
    n = n_start
    previous = _apply_rule(f, n)
    while True:
        n *= 2
        current = _apply_rule(f, n)
        err = abs(current - previous)
        if err <= tol * max(1.0, abs(current)) or n >= n_max:
            return QuadratureResult(current, n, err)
        previous = current


def cut_integral(
    smooth: Integrand,
    params: WalkParams,
    z: float,
    n_nodes: int | None = None,
    cut: Literal["high", "low"] = "high",
    pole: complex | None = None,
    tol: float = DEFAULT_TOL,
    n_max: int = DEFAULT_MAX_NODES,
) -> QuadratureResult:
    """Integral of ``smooth(t) * sqrt(-d(t, z))`` over [x3, x4] (or [x1, x2] with ``cut="low"``).

    The substitution ``t = t2(u, z)`` (``t1`` for the low cut) turns
    ``sqrt(-d)`` into ``sqrt(4ac) sqrt(1 - u^2)``, leaving a Gauss-Chebyshev
    integral with a smooth integrand. ``pole`` declares a point where
    ``smooth`` blows up so it can be rejected when it sits on the cut.
    With ``n_nodes`` given a single fixed rule is used; otherwise nodes are
    doubled from the default until the estimate drops below ``tol``.
    """
    bp = branch_points(params, z)
    lo, hi = (bp.x3, bp.x4) if cut == "high" else (bp.x1, bp.x2)
    if hi - lo <= 0.0:
        return QuadratureResult(0j, 0, 0.0)
    if pole is not None:
        pole = complex(pole)
        gap = abs(pole.imag) if lo <= pole.real <= hi else abs(pole - (lo if pole.real < lo else hi))
        if gap < POLE_CLEARANCE:
            raise PoleNearContour(f"pole {pole!r} within {POLE_CLEARANCE} of [{lo}, {hi}]")
    curve = CurveCoeffs(params)
    pick = 1 if cut == "high" else 0
    # orientation: on the low cut u runs from x2 (u=-1) down to x1 (u=1)
    orient = 1.0 if cut == "high" else -1.0

    def transformed(u: np.ndarray) -> np.ndarray:
        t = t_pm(params, u, z)[pick]
        jac = dt_du(params, u, z)[pick]
        scale = np.sqrt(4.0 * curve.a(t, z) * curve.c(t, z))
        return orient * smooth(t) * scale * jac

    if n_nodes is not None:
        return gauss_chebyshev_U(transformed, n_nodes)
    return integrate_chebyshev_U(transformed, tol=tol, n_max=n_max)
