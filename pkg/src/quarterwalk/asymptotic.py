"""Leading-order asymptotic laws for hitting times, absorption sites, Green functions
and the Martin kernel, dispatched on the drift class of the walk.

Every law is of the form ``constant * base**k * k**power`` so that each factor
can be inspected on its own.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Literal

from .curve import CurveCoeffs, branch_points, saddle
from .errors import OutOfRange, WrongRegime
from .walk import DriftClass, StartPoint, WalkParams, non_absorption_probability

ZZ = DriftClass.ZERO_ZERO
PP = DriftClass.POS_POS
ZP = DriftClass.ZERO_X_POS_Y
PZ = DriftClass.POS_X_ZERO_Y


class Quantity(enum.Enum):
    S_TAIL = "S-tail"
    T_TAIL = "T-tail"
    TAU_TAIL = "tau-tail"
    SITE_X = "site-x"
    SITE_Y = "site-y"
    GREEN = "green"
    GREEN_GAMMA_SET = "green-gamma-set"
    MARTIN_KERNEL = "martin-kernel"


@dataclass(frozen=True)
class AsymptoticLaw:
    """``constant * base**k * k**power`` as ``k`` grows."""

    regime: DriftClass
    quantity: Quantity
    constant: float
    power: float
    base: float = 1.0

    def __call__(self, k: float) -> float:
        return self.constant * self.base**k * k**self.power


def _mirror(law: AsymptoticLaw, quantity: Quantity, regime: DriftClass) -> AsymptoticLaw:
    return AsymptoticLaw(regime, quantity, law.constant, law.power, law.base)


def _s_tail_native(params: WalkParams, start: StartPoint, uncorrected: bool) -> AsymptoticLaw:
    p, n0, m0 = params, start.n0, start.m0
    regime = p.drift_class
    root_ns = math.sqrt(p.p_n * p.p_s)
    if regime is ZZ:
        return AsymptoticLaw(regime, Quantity.S_TAIL, n0 * m0 / (2 * math.pi * math.sqrt(p.p_e * p.p_n)), -2.0)
    if regime is PP:
        base = p.p_e + p.p_w + 2 * root_ns
        const = (
            m0 / (2 * math.sqrt(math.pi))
            * math.sqrt(base / root_ns)
            * (p.p_s / p.p_n) ** (m0 / 2)
            * (1 - (p.p_w / p.p_e) ** n0)
        )
        return AsymptoticLaw(regime, Quantity.S_TAIL, const, -1.5, base)
    if regime is ZP:
        const = n0 * m0 / (2 * math.pi * math.sqrt(p.p_e) * root_ns**0.5) * (p.p_s / p.p_n) ** (m0 / 2)
        return AsymptoticLaw(regime, Quantity.S_TAIL, const, -2.0, 2 * (p.p_e + root_ns))
    # horizontal drift only: the x-axis is reached like the far axis of the mirrored walk
    return _mirror(_t_tail_native(p.swapped(), start.swapped(), uncorrected), Quantity.S_TAIL, regime)


def _t_tail_native(params: WalkParams, start: StartPoint, uncorrected: bool) -> AsymptoticLaw:
    """Law of the y-axis hitting time for the classes where it is not a mirror image."""
    p, n0, m0 = params, start.n0, start.m0
    regime = p.drift_class
    if regime is ZP:
        if uncorrected:
            const = n0 / math.sqrt(math.pi * p.p_e) * (1 - (p.p_s / p.p_n) ** m0) / (2 * p.p_n) ** m0
        else:
            const = n0 / (2 * math.sqrt(math.pi * p.p_e)) * (1 - (p.p_s / p.p_n) ** m0)
        return AsymptoticLaw(regime, Quantity.T_TAIL, const, -1.5)
    return _mirror(_s_tail_native(p.swapped(), start.swapped(), uncorrected), Quantity.T_TAIL, regime)


def s_tail(params: WalkParams, start: StartPoint, uncorrected: bool = False) -> AsymptoticLaw:
    """Law of ``P(S = k)``, ``S`` the hitting time of the x-axis.

    ``uncorrected`` only matters when the horizontal drift is positive and
    the vertical one zero. It selects the far-axis constant with the extra
    factor ``2 (2 p_e)^(-n0)``, which the lattice recursion contradicts.
    """
    return _s_tail_native(params, start, uncorrected)


def t_tail(params: WalkParams, start: StartPoint, uncorrected: bool = False) -> AsymptoticLaw:
    """Law of ``P(T = k)``, ``T`` the hitting time of the y-axis."""
    if params.drift_class is ZP:
        return _t_tail_native(params, start, uncorrected)
    law = _s_tail_native(params.swapped(), start.swapped(), uncorrected)
    return _mirror(law, Quantity.T_TAIL, params.drift_class)


def tau_tail(params: WalkParams, start: StartPoint) -> AsymptoticLaw:
    """Law of ``P(tau >= k)`` for the boundary hitting time ``tau = min(S, T)``.

    With both drifts positive the tail tends to the non-absorption
    probability (power 0). With one zero drift it is the sum of the two
    axis tails, dominated by the polynomially decaying one.
    """
    p, n0, m0 = params, start.n0, start.m0
    regime = p.drift_class
    if regime is ZZ:
        return AsymptoticLaw(regime, Quantity.TAU_TAIL, n0 * m0 / (math.pi * math.sqrt(p.p_e * p.p_n)), -1.0)
    if regime is PP:
        return AsymptoticLaw(regime, Quantity.TAU_TAIL, non_absorption_probability(p, start), 0.0)
    # sum over j >= k of c j^(-3/2) ~ 2 c k^(-1/2)
    slow = t_tail(p, start) if regime is ZP else s_tail(p, start)
    return AsymptoticLaw(regime, Quantity.TAU_TAIL, 2.0 * slow.constant, slow.power + 1.0)


def site_asymptotics(params: WalkParams, start: StartPoint, axis: Literal["x", "y"] = "x") -> AsymptoticLaw:
    """Law of the probability of absorption at ``(i, 0)`` (or ``(0, j)``) as the site index grows.

    The inverse-cube law holds when both drifts vanish. In every other case
    the nearest singularity of ``h(., 1)`` is the square-root branch point
    ``x3(1)`` and the decay is ``i^(-3/2) x3(1)^(-i)``.
    """
    if axis == "y":
        law = site_asymptotics(params.swapped(), start.swapped(), "x")
        return AsymptoticLaw(params.drift_class, Quantity.SITE_Y, law.constant, law.power, law.base)
    p, n0, m0 = params, start.n0, start.m0
    if p.drift_class is ZZ:
        const = 4 / math.pi * math.sqrt(p.p_e / p.p_n) * n0 * m0
        return AsymptoticLaw(ZZ, Quantity.SITE_X, const, -3.0)
    bp = branch_points(p, 1.0)
    x2, x3 = bp.x2, bp.x3
    const = (
        math.sqrt(p.p_e * (x3 - x2))
        / (2 * math.sqrt(math.pi) * (p.p_n * p.p_s) ** 0.25)
        * m0
        * (p.p_s / p.p_n) ** (m0 / 2)
        * (x3**n0 - x2**n0)
    )
    return AsymptoticLaw(p.drift_class, Quantity.SITE_X, const, -1.5, 1.0 / x3)


def _ratio_sum(u: float, rho2: float, n: int) -> float:
    """``(u^n - (rho2/u)^n) / (u - rho2/u)`` written as a finite geometric sum."""
    v = rho2 / u
    return sum(u ** (n - 1 - k) * v**k for k in range(n))


@dataclass(frozen=True)
class GreenEstimate:
    """``prefactor * exp(-log_decay)``; the split keeps far sites from underflowing."""

    regime: DriftClass
    prefactor: float
    log_decay: float = 0.0
    gamma: float | None = None
    s3: float | None = None
    t3: float | None = None
    constant: float | None = None

    @property
    def value(self) -> float:
        return self.prefactor * math.exp(-self.log_decay)

    @property
    def log_value(self) -> float:
        return math.log(self.prefactor) - self.log_decay


def _log_y_second_derivative(params: WalkParams, x: float, y: float) -> float:
    """Second derivative of ``log Y`` along the curve ``Q(x, Y(x), 1) = 0`` at the point ``(x, y)``."""
    p = params
    f_x = p.p_n * y * y + (2 * p.p_e * x - 1) * y + p.p_s
    f_y = 2 * p.p_n * x * y + p.p_e * x * x - x + p.p_w
    f_xx = 2 * p.p_e * y
    f_xy = 2 * p.p_n * y + 2 * p.p_e * x - 1
    f_yy = 2 * p.p_n * x
    dy = -f_x / f_y
    d2y = -(f_xx + 2 * f_xy * dy + f_yy * dy * dy) / f_y
    return d2y / y - (dy / y) ** 2


def green_asymptotics(params: WalkParams, start: StartPoint, i: int, j: int) -> GreenEstimate:
    """Leading-order estimate of the expected number of visits to ``(i, j)``.

    Zero drifts use the rational law in ``(i, j)``. Two positive drifts use
    the saddle point of direction ``atan(j/i)`` with the constant in its
    product form.
    """
    p, n0, m0 = params, start.n0, start.m0
    if i < 1 or j < 1:
        raise OutOfRange("Green estimates are for interior sites")
    if p.drift_class is ZZ:
        denom = math.pi * (p.p_n * i * i + p.p_e * j * j) ** 2
        return GreenEstimate(ZZ, 4 * math.sqrt(p.p_n * p.p_e) * n0 * m0 * i * j / denom)
    if p.drift_class is not PP:
        raise WrongRegime("Green asymptotics are available for zero or two positive drifts")
    gamma = math.atan2(j, i)
    sp = saddle(p, gamma)
    tan_g = j / i
    r2, rt2 = p.r**2, p.r_tilde**2
    constant = (sp.t3**m0 - (rt2 / sp.t3) ** m0) * (sp.s3**n0 - (r2 / sp.s3) ** n0)
    coeffs = CurveCoeffs(p)
    root_d = 2 * coeffs.a(sp.s3, 1.0) * sp.t3 + coeffs.b(sp.s3, 1.0)
    # (x^(1/tan) Y1)'' / (x^(1/tan) Y1) at the critical point equals the
    # second derivative of its logarithm
    curvature = -1.0 / (tan_g * sp.s3**2) + _log_y_second_derivative(p, sp.s3, sp.t3)
    log_decay = i * math.log(sp.s3) + j * math.log(sp.t3)
    prefactor = constant / (math.sqrt(2 * math.pi) * root_d * math.sqrt(j * abs(curvature)))
    return GreenEstimate(PP, prefactor, log_decay, gamma, sp.s3, sp.t3, constant)


def green_boundary_asymptotics(
    params: WalkParams,
    start: StartPoint,
    i: int,
    j: int,
    side: Literal["x", "y"],
    uncorrected: bool = False,
) -> GreenEstimate:
    """Estimate of the visits to ``(i, j)`` when ``j/i -> 0`` (``side="x"``) or ``i/j -> 0`` (``side="y"``).

    The default constant is the small-angle limit of the interior law,
    which carries an extra ``1/(2 p_n)`` (``1/(2 p_e)`` on the other side)
    compared with the form selected by ``uncorrected``.
    """
    if params.drift_class is not PP:
        raise WrongRegime("boundary-direction Green asymptotics need two positive drifts")
    if side == "y":
        est = green_boundary_asymptotics(params.swapped(), start.swapped(), j, i, "x", uncorrected)
        return GreenEstimate(PP, est.prefactor, est.log_decay, math.pi / 2, est.t3, est.s3)
    p, n0, m0 = params, start.n0, start.m0
    bp = branch_points(p, 1.0)
    rt = p.r_tilde
    d_tilde = CurveCoeffs(p.swapped()).d(rt, 1.0)
    pref = math.sqrt((1 - 2 * math.sqrt(p.p_s * p.p_n)) ** 2 - 4 * p.p_w * p.p_e)
    num = pref * m0 * rt ** (m0 - 1) * (bp.x3**n0 - bp.x2**n0) * j
    den = math.sqrt(math.pi * p.p_n * math.sqrt(d_tilde)) * i**1.5
    if not uncorrected:
        den *= 2 * p.p_n
    return GreenEstimate(PP, num / den, i * math.log(bp.x3) + j * math.log(rt), 0.0, bp.x3, rt)


def gamma_set_green(params: WalkParams, start: StartPoint, a: int, uncorrected: bool = False) -> AsymptoticLaw:
    """Law of the expected visits to the line ``{i - 1 + a (j - 1) = k}``, the same for every ``a >= 0``.

    The log-singularity coefficient of the line generating function is
    ``2 n0 m0 / (pi sqrt(p_e p_n))``. ``uncorrected`` drops the ``pi``,
    which overstates the lattice values by that factor.
    """
    if params.drift_class is not ZZ:
        raise WrongRegime("the line-set Green law needs zero drifts")
    if a < 0:
        raise OutOfRange("a must be a non-negative integer")
    const = 2 * start.n0 * start.m0 / math.sqrt(params.p_e * params.p_n)
    if not uncorrected:
        const /= math.pi
    return AsymptoticLaw(ZZ, Quantity.GREEN_GAMMA_SET, const, -1.0)


def martin_kernel(
    params: WalkParams,
    start: StartPoint,
    direction: float | Literal["axis-x", "axis-y"],
    half_exponent: bool = False,
) -> float:
    """Limit of ``G(start -> (i, j)) / G((1, 1) -> (i, j))`` along a direction.

    ``direction`` is an angle ``gamma`` in [0, pi/2] (``j/i -> tan gamma``)
    or one of the axes. With ``half_exponent`` the axis values use
    ``r_tilde^(m0/2 - 1)`` and ``r^(n0/2 - 1)`` in place of ``r_tilde^(m0 - 1)``
    and ``r^(n0 - 1)``; that variant does not match the limit of the
    interior kernel and is kept for comparison only.
    """
    p, n0, m0 = params, start.n0, start.m0
    if p.drift_class is ZZ:
        return float(n0 * m0)
    if p.drift_class is not PP:
        raise WrongRegime("the Martin kernel is available for zero or two positive drifts")
    r2, rt2 = p.r**2, p.r_tilde**2
    if direction in ("axis-x", "axis-y"):
        if direction == "axis-y":
            return martin_kernel(p.swapped(), start.swapped(), "axis-x", half_exponent)
        bp = branch_points(p, 1.0)
        exponent = m0 / 2 - 1 if half_exponent else m0 - 1
        return m0 * p.r_tilde**exponent * _ratio_sum(bp.x3, r2, n0)
    gamma = float(direction)
    if not 0.0 <= gamma <= math.pi / 2:
        raise OutOfRange(f"gamma={gamma!r} outside [0, pi/2]")
    sp = saddle(p, gamma)
    return _ratio_sum(sp.t3, rt2, m0) * _ratio_sum(sp.s3, r2, n0)


def harmonic(params: WalkParams, start: StartPoint) -> float:
    """Positive harmonic function of the killed walk used for conditioning."""
    if params.drift_class is ZZ:
        return float(start.n0 * start.m0)
    if params.drift_class is PP:
        return non_absorption_probability(params, start)
    raise WrongRegime("no harmonic function is assigned to a walk with exactly one zero drift")


def harmonicity_residual(params: WalkParams, i: int, j: int) -> float:
    """``|sum_steps p * f(neighbour) - f(i, j)|`` for the harmonic function ``f``, with ``f = 0`` on the axes."""

    def f(a: int, b: int) -> float:
        return 0.0 if a <= 0 or b <= 0 else harmonic(params, StartPoint(a, b))

    p = params
    mean = p.p_e * f(i + 1, j) + p.p_w * f(i - 1, j) + p.p_n * f(i, j + 1) + p.p_s * f(i, j - 1)
    return abs(mean - f(i, j))
