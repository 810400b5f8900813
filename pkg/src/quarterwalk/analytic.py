"""Generating functions of the absorption probabilities in closed integral form.

``h(x, z) = sum_{i,n} P(first boundary hit at (i, 0) at time n) x^i z^n``.
Four integral formulas for ``h`` are implemented; they agree on the disk
``|x| < r`` and the one built on the outer cut continues ``h`` to the whole
plane minus ``[x3, x4]``. The y-axis function is ``h`` of the mirrored walk.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import curve
from .curve import CurveCoeffs, branch_points, cheb_U, dt_du, mu, principal_part, t_pm
from .errors import DomainViolation, QuadratureFailure
from .quadrature import (
    DEFAULT_MAX_NODES,
    QuadratureResult,
    cut_integral,
    integrate_chebyshev_U,
)
from .walk import StartPoint, WalkParams, derive, non_absorption_probability

DOMAIN_CLEARANCE = 1e-9
PINCH_EXCLUSION = 1e-6
ACCEPT_ERROR = 1e-9
CIRCLE_START_NODES = 512
CIRCLE_MAX_NODES = 1 << 17


class Representation(enum.Enum):
    CIRCLE_CONTOUR = "circle"
    CUT_X1X2 = "cut12"
    CUT_X3X4 = "cut34"
    CHEBYSHEV = "chebyshev"


@dataclass(frozen=True)
class HValue:
    value: complex
    representation: Representation
    error_estimate: float
    probabilistic: bool = True


def _check_result(res: QuadratureResult, what: str) -> QuadratureResult:
    if res.error_estimate > ACCEPT_ERROR * max(1.0, abs(res.value)):
        raise QuadratureFailure(
            f"{what}: error estimate {res.error_estimate:.3g} after {res.node_count} nodes"
        )
    return res


def _pinched(params: WalkParams, z: float) -> bool:
    return params.drift_y == 0.0 and z == 1.0


def _circle_contour(params: WalkParams, start: StartPoint, x: complex, z: float, max_nodes: int) -> QuadratureResult:
    """Trapezoid rule on |t| = r after a periodic change of angle.

    ``theta = s - sin(s)`` clusters nodes at ``t = r``, the point of the
    circle closest to the cuts, where the integrand is only Hölder
    continuous when the two cuts touch.
    """
    n0, m0 = start.n0, start.m0
    r = params.r
    r2 = r * r

    def trapezoid(n: int) -> complex:
        s = -math.pi + (np.arange(n) + 0.5) * (2 * math.pi / n)
        theta = s - np.sin(s)
        dtheta = 1.0 - np.cos(s)
        t = r * np.exp(1j * theta)
        y0 = curve._roots(params, t, z)[0]
        kernel = 1.0 / (t - x) + t / (x * t - r2)
        vals = t**n0 * y0**m0 * kernel * dtheta
        return complex(x * vals.mean())

    n = CIRCLE_START_NODES
    prev = trapezoid(n)
    while True:
        n *= 2
        cur = trapezoid(n)
        err = abs(cur - prev)
        if err <= 1e-11 * max(1.0, abs(cur)) or n >= max_nodes:
            return QuadratureResult(cur, n, err)
        prev = cur


def _cut_low(params: WalkParams, start: StartPoint, x: complex, z: float, max_nodes: int) -> QuadratureResult:
    n0, m0 = start.n0, start.m0
    r2 = params.r**2

    def smooth(t: np.ndarray) -> np.ndarray:
        kernel = 1.0 / (t * (t - x)) + 1.0 / (x * t - r2)
        return t**n0 * kernel * mu(params, t, z, m0)

    res = cut_integral(smooth, params, z, cut="low", pole=x, n_max=max_nodes)
    y0 = curve._roots(params, np.asarray(x, dtype=complex), z)[0][()]
    return QuadratureResult(x**n0 * y0**m0 + x / math.pi * res.value, res.node_count, res.error_estimate)


def _cut_high(params: WalkParams, start: StartPoint, x: complex, z: float, max_nodes: int) -> QuadratureResult:
    n0, m0 = start.n0, start.m0
    r2 = params.r**2

    def smooth(t: np.ndarray) -> np.ndarray:
        return (t**n0 - (r2 / t) ** n0) * mu(params, t, z, m0) / (t * (t - x))

    res = cut_integral(smooth, params, z, cut="high", pole=x, n_max=max_nodes)
    poly = principal_part(params, z, n0, m0)(x)
    return QuadratureResult(x / math.pi * res.value + poly, res.node_count, res.error_estimate)


def _chebyshev(params: WalkParams, start: StartPoint, x: complex, z: float, max_nodes: int) -> QuadratureResult:
    n0, m0 = start.n0, start.m0
    r2 = params.r**2
    scale = (params.p_s / params.p_n) ** (m0 / 2)

    def integrand(u: np.ndarray) -> np.ndarray:
        t2 = t_pm(params, u, z)[1]
        jac = dt_du(params, u, z)[1]
        return (t2**n0 - (r2 / t2) ** n0) * jac * cheb_U(m0 - 1, -u) / (t2 * (t2 - x))

    res = integrate_chebyshev_U(integrand, n_max=max_nodes)
    poly = principal_part(params, z, n0, m0)(x)
    return QuadratureResult(x / math.pi * scale * res.value + poly, res.node_count, res.error_estimate)


_ENGINES = {
    Representation.CIRCLE_CONTOUR: _circle_contour,
    Representation.CUT_X1X2: _cut_low,
    Representation.CUT_X3X4: _cut_high,
    Representation.CHEBYSHEV: _chebyshev,
}


def _check_domain(params: WalkParams, rep: Representation, x: complex, z: float) -> None:
    r = params.r
    bp = branch_points(params, z)
    if _pinched(params, z) and abs(x - 1.0) < PINCH_EXCLUSION:
        raise DomainViolation(
            "x is within 1e-6 of the pinch point x = 1 at z = 1; use the asymptotic expansions"
        )
    if rep is Representation.CUT_X3X4:
        if bp.x3 - DOMAIN_CLEARANCE <= x.real <= bp.x4 + DOMAIN_CLEARANCE and abs(x.imag) < DOMAIN_CLEARANCE:
            raise DomainViolation(f"{rep.value}: x={x!r} lies on the cut [x3, x4]")
        return
    if abs(x) >= r:
        raise DomainViolation(f"{rep.value}: needs |x| < r = {r!r}, got |x| = {abs(x)!r}")
    if rep is Representation.CUT_X1X2:
        if bp.x1 - DOMAIN_CLEARANCE <= x.real <= bp.x2 + DOMAIN_CLEARANCE and abs(x.imag) < DOMAIN_CLEARANCE:
            raise DomainViolation(f"{rep.value}: x={x!r} lies on the cut [x1, x2]")


def default_representation(params: WalkParams, x: complex) -> Representation:
    return Representation.CHEBYSHEV if abs(x) < params.r else Representation.CUT_X3X4


def eval_h(
    params: WalkParams,
    start: StartPoint,
    x: complex,
    z: float,
    rep: Representation | None = None,
    max_nodes: int | None = None,
) -> HValue:
    """Generating function ``h(x, z)`` of the x-axis absorption probabilities.

    Valid for ``z`` in (0, z1]. Values for ``z > 1`` are analytic
    continuations and are flagged with ``probabilistic=False``.
    """
    x = complex(x)
    z = float(z)
    derive(params)
    curve._check_z(params, z)
    rep = default_representation(params, x) if rep is None else rep
    _check_domain(params, rep, x, z)
    probabilistic = z <= 1.0
    if x == 0:
        return HValue(0j, rep, 0.0, probabilistic)
    if max_nodes is None:
        max_nodes = CIRCLE_MAX_NODES if rep is Representation.CIRCLE_CONTOUR else 8 * DEFAULT_MAX_NODES
    res = _check_result(_ENGINES[rep](params, start, x, z, max_nodes), rep.value)
    return HValue(res.value, rep, res.error_estimate, probabilistic)


def eval_htilde(
    params: WalkParams,
    start: StartPoint,
    y: complex,
    z: float,
    rep: Representation | None = None,
    max_nodes: int | None = None,
) -> HValue:
    """Generating function of the y-axis absorption probabilities (mirrored walk)."""
    return eval_h(params.swapped(), start.swapped(), y, z, rep, max_nodes)


def absorption_probability(params: WalkParams, start: StartPoint) -> tuple[float, float]:
    """Return ``(A, 1 - A)``: the probabilities of never and of eventually being absorbed."""
    a = non_absorption_probability(params, start)
    return a, 1.0 - a


def ruin_generating_function(p_n: float, p_s: float, m0: int, z: complex) -> complex:
    """Generating function of the ruin time of the walk on the half-line started at ``m0``."""
    root = np.sqrt(complex(1.0 - 4.0 * p_n * p_s * z * z))
    return complex(((1.0 - root) / (2.0 * p_n * z)) ** m0)


def ruin_series(p_n: float, p_s: float, m0: int, k_max: int) -> np.ndarray:
    """Taylor coefficients of :func:`ruin_generating_function` up to ``z**k_max``.

    The one-start series is ``sum_k Cat(k) p_n^k p_s^(k+1) z^(2k+1)``;
    higher starts are its powers.
    """
    one = np.zeros(k_max + 1)
    catalan = 1
    for k in range((k_max - 1) // 2 + 1):
        one[2 * k + 1] = catalan * p_n**k * p_s ** (k + 1)
        catalan = catalan * 2 * (2 * k + 1) // (k + 2)
    out = np.zeros(k_max + 1)
    out[0] = 1.0
    for _ in range(m0):
        out = np.convolve(out, one)[: k_max + 1]
    return out


def ruin_integral(p_n: float, p_s: float, m0: int, z: float) -> complex:
    """The ruin generating function through its Chebyshev integral form."""
    root = math.sqrt(p_n * p_s)

    def f(u: np.ndarray) -> np.ndarray:
        return 2 * root * z / (1 + 2 * root * z * u) * cheb_U(m0 - 1, -u)

    res = integrate_chebyshev_U(f)
    return (p_s / p_n) ** (m0 / 2) * res.value / math.pi


def site_probability(params: WalkParams, start: StartPoint, i: int, max_nodes: int = 8 * DEFAULT_MAX_NODES) -> float:
    """Probability that the boundary is first reached at ``(i, 0)``."""
    if i < 1:
        raise ValueError("site index must be at least 1")
    n0, m0 = start.n0, start.m0
    r2 = params.r**2

    def smooth(t: np.ndarray) -> np.ndarray:
        return (t**n0 - (r2 / t) ** n0) * mu(params, t, 1.0, m0) * np.exp(-(i + 1) * np.log(t))

    res = _check_result(cut_integral(smooth, params, 1.0, n_max=max_nodes), "site")
    poly = principal_part(params, 1.0, n0, m0)
    return float(res.value.real / math.pi + poly.coefficient(i))



def boundary_residual(params: WalkParams, start: StartPoint, z: float, n_samples: int = 64) -> float:
    """Largest violation of the jump condition of ``h`` across the circle |t| = r.

    On that circle ``h(t) - h(conj t)`` must equal
    ``t^n0 Y0(t)^m0 - conj(t)^n0 Y0(conj t)^m0``; ``h`` is evaluated through
    the outer-cut formula, which is valid on and outside the circle.
    """
    n0, m0 = start.n0, start.m0
    theta = np.pi * (np.arange(1, n_samples + 1) - 0.5) / n_samples
    worst = 0.0
    for t in params.r * np.exp(1j * theta):
        tc = np.conj(t)
        jump = eval_h(params, start, t, z, Representation.CUT_X3X4).value
        jump -= eval_h(params, start, tc, z, Representation.CUT_X3X4).value
        y_t = curve._roots(params, np.asarray(t), z)[0][()]
        y_tc = curve._roots(params, np.asarray(tc), z)[0][()]
        target = t**n0 * y_t**m0 - tc**n0 * y_tc**m0
        worst = max(worst, abs(jump - target))
    return worst


@dataclass(frozen=True)
class FunctionalEquationCheck:
    residual: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.residual <= self.bound


def functional_equation_residual(
    params: WalkParams,
    start: StartPoint,
    x: complex,
    y: complex,
    z: float,
    n_cap: int = 400,
    grid_cap: int | tuple[int, int] | None = None,
) -> FunctionalEquationCheck:
    """Check ``Q G = h + h_tilde - x^n0 y^m0`` with ``G`` from the lattice recursion.

    ``h`` and ``h_tilde`` come from the integral formulas, ``G`` is the
    time-truncated generating function of the interior occupation. The
    returned bound collects the exact truncation term of the recursion,
    the absorption that can still happen after the time cap, mass that
    left a capped grid and the quadrature tolerance.
    """
    from .oracle import dp_genfunc_both

    x, y = complex(x), complex(y)
    sums = dp_genfunc_both(params, start, x, y, z, n_cap, grid_cap)
    h = eval_h(params, start, x, z).value if x != 0 else 0j
    h_tilde = eval_htilde(params, start, y, z).value if y != 0 else 0j
    kernel = CurveCoeffs(params).kernel(x, y, z)
    residual = abs(kernel * sums["G"] - (h + h_tilde - x**start.n0 * y**start.m0))
    late = max(sums["alive"] + sums["escaped"] - non_absorption_probability(params, start), 0.0)
    bound = (
        abs(sums["boundary_term"])
        + abs(z) ** (n_cap + 1) * late
        + 2.0 * sums["escaped"]
        + ACCEPT_ERROR * (1.0 + abs(h) + abs(h_tilde))
    )
    return FunctionalEquationCheck(float(residual), float(bound))


def link_identity_residual(params: WalkParams, start: StartPoint, y: complex, z: float) -> float:
    """Residual of the identity tying ``h`` and ``h_tilde`` together along the curve.

    For ``|y| > r_tilde``:
    ``h(X1(y)) + h_tilde(y) - X1^n0 y^m0 = (y^m0 - (r_tilde^2/y)^m0)(X0^n0 - (r^2/X0)^n0)``.
    """
    y = complex(y)
    if abs(y) <= params.r_tilde:
        raise DomainViolation(f"need |y| > r_tilde = {params.r_tilde!r}")
    n0, m0 = start.n0, start.m0
    x0 = complex(curve.eval_X(params, 0, y, z))
    x1 = complex(curve.eval_X(params, 1, y, z))
    lhs = (
        eval_h(params, start, x1, z, Representation.CUT_X3X4).value
        + eval_htilde(params, start, y, z, Representation.CUT_X3X4).value
        - x1**n0 * y**m0
    )
    r2, rt2 = params.r**2, params.r_tilde**2
    rhs = (y**m0 - (rt2 / y) ** m0) * (x0**n0 - (r2 / x0) ** n0)
    return float(abs(lhs - rhs))


def green_constant_via_h(params: WalkParams, start: StartPoint, gamma: float) -> float:
    """``s3^n0 t3^m0 - h(s3, 1) - h_tilde(t3, 1)`` at the saddle point of direction ``gamma``."""
    sp = curve.saddle(params, gamma)
    h = eval_h(params, start, sp.s3, 1.0, Representation.CUT_X3X4).value
    h_tilde = eval_htilde(params, start, sp.t3, 1.0, Representation.CUT_X3X4).value
    return float((sp.s3**start.n0 * sp.t3**start.m0 - h - h_tilde).real)


def green_constant_product(params: WalkParams, start: StartPoint, gamma: float) -> float:
    """The same constant in product form, ``(t3^m0 - (rt^2/t3)^m0)(s3^n0 - (r^2/s3)^n0)``."""
    sp = curve.saddle(params, gamma)
    r2, rt2 = params.r**2, params.r_tilde**2
    return (sp.t3**start.m0 - (rt2 / sp.t3) ** start.m0) * (sp.s3**start.n0 - (r2 / sp.s3) ** start.n0)


def taylor_coefficients(params: WalkParams, start: StartPoint, z: float, count: int, radius: float | None = None) -> np.ndarray:
    """Coefficients of ``h(., z)`` in ``x`` by a discrete Cauchy integral on a circle inside |x| < r."""
    radius = 0.8 * params.r if radius is None else radius
    n_points = max(64, 4 * count)
    xs = radius * np.exp(2j * np.pi * np.arange(n_points) / n_points)
    values = np.array([eval_h(params, start, x, z).value for x in xs])
    coeffs = np.fft.fft(values) / n_points
    return (coeffs[:count] / radius ** np.arange(count)).real
