"""The kernel curve Q(x, y, z) = 0 of the walk and the objects built on it.

Viewed as a quadratic in ``y`` the kernel reads ``a y^2 + b y + c`` with
coefficients depending on ``(x, z)``; its discriminant ``d`` has four real
positive roots (the branch points) which bound two cuts of the real axis.
Everything involving the other coordinate is obtained by calling the same
function on ``params.swapped()``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import OnCircle, OnCut, OutOfRange, PoleAtZero, SeriesDepthExceeded, WrongRegime
from .walk import DriftClass, WalkParams, derive

CUT_GUARD = 1e-12
ArrayLike = complex | float | np.ndarray


@dataclass(frozen=True)
class CurveCoeffs:
    """Coefficient polynomials of the kernel for one walk."""

    params: WalkParams

    def a(self, x: ArrayLike, z: ArrayLike) -> ArrayLike:
        return z * self.params.p_n * x

    def b(self, x: ArrayLike, z: ArrayLike) -> ArrayLike:
        p = self.params
        return z * p.p_e * x * x - x + z * p.p_w

    def c(self, x: ArrayLike, z: ArrayLike) -> ArrayLike:
        return z * self.params.p_s * x

    def d(self, x: ArrayLike, z: ArrayLike) -> ArrayLike:
        b = self.b(x, z)
        return b * b - 4.0 * self.a(x, z) * self.c(x, z)

    def d_factored(self, x: ArrayLike, z: ArrayLike) -> ArrayLike:
        b = self.b(x, z)
        shift = 2.0 * z * x * math.sqrt(self.params.p_n * self.params.p_s)
        return (b - shift) * (b + shift)

    def kernel(self, x: ArrayLike, y: ArrayLike, z: ArrayLike) -> ArrayLike:
        """Q(x, y, z) = xyz (p_e x + p_w/x + p_n y + p_s/y - 1/z)."""
        p = self.params
        return z * (p.p_e * x * x * y + p.p_w * y + p.p_n * x * y * y + p.p_s * x) - x * y

    @property
    def tilde(self) -> "CurveCoeffs":
        return CurveCoeffs(self.params.swapped())


@dataclass(frozen=True)
class BranchPoints:
    x1: float
    x2: float
    x3: float
    x4: float
    z: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x1, self.x2, self.x3, self.x4)


def _check_z(params: WalkParams, z: float) -> float:
    z1 = derive(params).z1
    if not (0.0 < z <= z1 * (1.0 + 1e-15)):
        raise OutOfRange(f"z={z!r} outside (0, z1={z1!r}]")
    return min(float(z), z1)


def branch_points(params: WalkParams, z: float) -> BranchPoints:
    """The four real roots of the discriminant at a fixed ``z`` in (0, z1]."""
    z = _check_z(params, z)
    root_ns = math.sqrt(params.p_n * params.p_s)
    r2 = params.p_w / params.p_e
    inner = (1.0 / z - 2.0 * root_ns) / (2.0 * params.p_e)
    outer = (1.0 / z + 2.0 * root_ns) / (2.0 * params.p_e)
    x3 = inner + math.sqrt(max(inner * inner - r2, 0.0))
    x4 = outer + math.sqrt(outer * outer - r2)
    # the small roots follow from the products x1 x4 = x2 x3 = r^2
    return BranchPoints(x1=r2 / x4, x2=r2 / x3, x3=x3, x4=x4, z=z)


def _on_cuts(params: WalkParams, x: np.ndarray, z: float) -> np.ndarray:
    bp = branch_points(params, z)
    xr = x.real
    real_axis = np.abs(x.imag) <= CUT_GUARD
    in_low = (xr >= bp.x1 - CUT_GUARD) & (xr <= bp.x2 + CUT_GUARD)
    in_high = (xr >= bp.x3 - CUT_GUARD) & (xr <= bp.x4 + CUT_GUARD)
    return real_axis & (in_low | in_high)


def _roots(params: WalkParams, x: ArrayLike, z: float) -> tuple[np.ndarray, np.ndarray]:
    """Both roots in y, ordered by modulus, with no cut check."""
    curve = CurveCoeffs(params)
    x = np.asarray(x, dtype=complex)
    a = curve.a(x, z)
    b = curve.b(x, z)
    c = curve.c(x, z)
    sq = np.sqrt(b * b - 4.0 * a * c)
    # pick the sign that avoids cancellation; then |q| >= sqrt|ac|
    sign = np.where((b.conjugate() * sq).real >= 0.0, 1.0, -1.0)
    q = -0.5 * (b + sign * sq)
    with np.errstate(divide="ignore", invalid="ignore"):
        large = q / a
        small = np.where(q == 0, 0.0, c / q)
    return small, large


def eval_Y(params: WalkParams, branch: Literal[0, 1], x: ArrayLike, z: float) -> ArrayLike:
    """Branch ``Y0`` (small modulus) or ``Y1`` (large modulus) of the curve at ``x``."""
    z = _check_z(params, z)
    xa = np.asarray(x, dtype=complex)
    if np.any(_on_cuts(params, xa, z)):
        raise OnCut(f"x={x!r} lies on a cut at z={z!r}")
    small, large = _roots(params, xa, z)
    out = small if branch == 0 else large
    return out[()] if out.ndim == 0 else out


def eval_X(params: WalkParams, branch: Literal[0, 1], y: ArrayLike, z: float) -> ArrayLike:
    """Branch ``X0`` or ``X1`` of the curve at ``y``."""
    return eval_Y(params.swapped(), branch, y, z)


def y0_edge(params: WalkParams, t: ArrayLike, z: float, side: int = 1) -> ArrayLike:
    """Limit of ``Y0`` on the upper (``side=+1``) or lower (``side=-1``) edge of a cut.

    ``t`` must be real and inside ``[x1, x2]`` or ``[x3, x4]`` where the
    discriminant is non-positive.
    """
    curve = CurveCoeffs(params)
    t = np.asarray(t, dtype=float)
    a = curve.a(t, z)
    b = curve.b(t, z)
    root = np.sqrt(np.maximum(-curve.d(t, z), 0.0))
    # On [x1, x2] the upper-edge value of Y0 lies in the lower half-plane;
    # on [x3, x4] the orientation flips. The circle |t| = r separates the cuts.
    orient = np.where(t < params.r, -1.0, 1.0) * side
    out = (-b + 1j * orient * root) / (2.0 * a)
    return out[()] if out.ndim == 0 else out


def compose_XY(params: WalkParams, x: complex, z: float) -> tuple[complex, complex]:
    """Return ``(X0(Y0(x)), X1(Y0(x)))``, which equals ``(x, r^2/x)`` inside the circle |x| = r."""
    r = params.r
    if abs(abs(x) - r) <= CUT_GUARD:
        raise OnCircle(f"|x|={abs(x)!r} equals r={r!r}")
    y = eval_Y(params, 0, x, z)
    swapped = params.swapped()
    small, large = _roots(swapped, y, _check_z(params, z))
    return complex(small), complex(large)


def mu(params: WalkParams, t: ArrayLike, z: float, m0: int) -> ArrayLike:
    """Jump coefficient of ``Y0**m0`` across a cut.

    ``(2a)^{-m0} * sum_k C(m0, 2k+1) d^k (-b)^{m0-2k-1}`` for ``k`` up to ``(m0-1)//2``.
    """
    curve = CurveCoeffs(params)
    a = curve.a(t, z)
    b = curve.b(t, z)
    d = curve.d(t, z)
    total = 0.0
    for k in range((m0 - 1) // 2 + 1):
        total = total + math.comb(m0, 2 * k + 1) * d**k * (-b) ** (m0 - 2 * k - 1)
    return total / (2.0 * a) ** m0


def mu_chebyshev(params: WalkParams, t: ArrayLike, z: float, m0: int) -> ArrayLike:
    """``mu * sqrt(-d)`` through the Chebyshev polynomial in ``b / sqrt(4ac)``."""
    curve = CurveCoeffs(params)
    a = curve.a(t, z)
    c = curve.c(t, z)
    b_hat = curve.b(t, z) / np.sqrt(4.0 * a * c + 0j)
    return (c / a) ** (m0 / 2) * cheb_U(m0 - 1, -b_hat) * np.sqrt(1.0 - b_hat * b_hat + 0j)


def cheb_U(n: int, t: ArrayLike) -> ArrayLike:
    """Chebyshev polynomial of the second kind by the three-term recurrence."""
    t = np.asarray(t)
    if n < 0:
        return np.zeros_like(t)
    prev, cur = np.ones_like(t), 2 * t
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 2 * t * cur - prev
    return cur


def cheb_T(n: int, t: ArrayLike) -> ArrayLike:
    """Chebyshev polynomial of the first kind by the three-term recurrence."""
    t = np.asarray(t)
    prev, cur = np.ones_like(t), t
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 2 * t * cur - prev
    return cur


def cheb_U_closed(n: int, t: ArrayLike) -> ArrayLike:
    t = np.asarray(t, dtype=complex)
    s = np.sqrt(t * t - 1)
    return ((t + s) ** (n + 1) - (t - s) ** (n + 1)) / (2 * s)


def cheb_T_closed(n: int, t: ArrayLike) -> ArrayLike:
    t = np.asarray(t, dtype=complex)
    s = np.sqrt(t * t - 1)
    return 0.5 * ((t + s) ** n + (t - s) ** n)


def _t_pm_parts(params: WalkParams, u: ArrayLike, z: float):
    u = np.asarray(u, dtype=float)
    root_ns = math.sqrt(params.p_n * params.p_s)
    lin = 1.0 + 2.0 * root_ns * u * z
    disc = np.sqrt(np.maximum(lin * lin - 4.0 * params.p_e * params.p_w * z * z, 0.0))
    return u, root_ns, lin, disc


def t_pm(params: WalkParams, u: ArrayLike, z: float) -> tuple[ArrayLike, ArrayLike]:
    """Solutions ``t1 <= t2`` of ``b(t, z) = u * sqrt(4 a c)``, mapping [-1, 1] onto the two cuts."""
    _, _, lin, disc = _t_pm_parts(params, u, z)
    t2 = (lin + disc) / (2.0 * params.p_e * z)
    t1 = (params.p_w / params.p_e) / t2
    return t1, t2


def dt_du(params: WalkParams, u: ArrayLike, z: float) -> tuple[ArrayLike, ArrayLike]:
    """Derivatives of ``t1`` and ``t2`` with respect to ``u``."""
    u, root_ns, lin, disc = _t_pm_parts(params, u, z)
    t1, t2 = t_pm(params, u, z)
    scale = 2.0 * root_ns * z / disc
    return -t1 * scale, t2 * scale


@dataclass(frozen=True)
class PrincipalPart:
    """Polynomial in ``x`` (ascending coefficients, constant term first)."""

    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else -1

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def coefficient(self, i: int) -> float:
        return float(self.coeffs[i]) if 0 <= i < len(self.coeffs) else 0.0


def y0_series(params: WalkParams, z: float, depth: int) -> np.ndarray:
    """Taylor coefficients of ``Y0`` in ``w = 1/x`` at infinity, up to ``w**depth``."""
    p = params
    # z p_n w Y^2 + (z p_e - w + z p_w w^2) Y + z p_s w = 0, solved by fixed point
    series = np.zeros(depth + 1)
    for _ in range(depth + 1):
        sq = np.convolve(series, series)[: depth + 1]
        rhs = np.zeros(depth + 1)
        rhs[1] += z * p.p_s
        rhs[1:] += z * p.p_n * sq[:-1]
        rhs[1:] -= series[:-1]
        rhs[2:] += z * p.p_w * series[:-2]
        series = -rhs / (z * p.p_e)
    return series


def principal_part(
    params: WalkParams, z: float, n0: int, m0: int, max_depth: int = 512
) -> PrincipalPart:
    """``x`` times the polynomial part at infinity of ``x**(n0-1) * Y0(x, z)**m0``."""
    degree = n0 - m0
    if degree <= 0:
        return PrincipalPart(np.zeros(1))
    if degree > max_depth:
        raise SeriesDepthExceeded(f"n0 - m0 = {degree} exceeds the series depth {max_depth}")
    depth = n0 + 8
    y0 = y0_series(params, z, depth)
    power = np.zeros(depth + 1)
    power[0] = 1.0
    for _ in range(m0):
        power = np.convolve(power, y0)[: depth + 1]
    coeffs = np.zeros(degree + 1)
    # w^k in Y0^m0 contributes x^(n0 - k) after multiplying by x^n0
    for k in range(m0, n0):
        coeffs[n0 - k] = power[k]
    return PrincipalPart(coeffs)


def gluing(params: WalkParams, t: ArrayLike, which: Literal["M", "L"] = "M") -> ArrayLike:
    """Conformal gluing map ``(t + rho^2/t)/2`` with ``rho = r`` (M) or ``r_tilde`` (L)."""
    t = np.asarray(t, dtype=complex)
    if np.any(t == 0):
        raise PoleAtZero("gluing map has a pole at t = 0")
    rho = params.r if which == "M" else params.r_tilde
    out = 0.5 * (t + rho * rho / t)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class SaddlePoint:
    gamma: float
    s3: float
    t3: float


def _saddle_sum(pe_pw: float, pn_ps: float, gamma: float) -> float:
    """``p_e s + p_w / s`` at the saddle, in a form with no removable singularity.

    Writing ``u`` for that sum, the critical-point equations reduce to
    ``(1 - tan^2) u^2 - 2u + 1 - 4 p_n p_s + 4 p_e p_w tan^2 = 0``. Multiplying
    through by ``cos^4`` and rationalising gives an expression that is regular
    on the whole of [0, pi/2], including pi/4 and pi/2.
    """
    cos2 = math.cos(gamma) ** 2
    sin2 = math.sin(gamma) ** 2
    big = cos2 * (1.0 - 4.0 * pn_ps) + 4.0 * sin2 * pe_pw
    return big / (cos2 + math.sqrt(max(cos2 * cos2 - (cos2 - sin2) * big, 0.0)))


def saddle(params: WalkParams, gamma: float) -> SaddlePoint:
    """Critical point of ``x * y**tan(gamma)`` on the real positive part of Q(x, y, 1) = 0."""
    if params.drift_class is not DriftClass.POS_POS:
        raise WrongRegime("the saddle point is defined for two positive drifts")
    if not (0.0 <= gamma <= math.pi / 2):
        raise OutOfRange(f"gamma={gamma!r} outside [0, pi/2]")
    p = params
    pe_pw = p.p_e * p.p_w
    pn_ps = p.p_n * p.p_s
    u = _saddle_sum(pe_pw, pn_ps, gamma)
    v = 1.0 - u
    s3 = (u + math.sqrt(max(u * u - 4.0 * pe_pw, 0.0))) / (2.0 * p.p_e)
    t3 = (v + math.sqrt(max(v * v - 4.0 * pn_ps, 0.0))) / (2.0 * p.p_n)
    s3, t3 = _polish_saddle(params, gamma, s3, t3)
    return SaddlePoint(gamma=gamma, s3=s3, t3=t3)


def _polish_saddle(params: WalkParams, gamma: float, s3: float, t3: float) -> tuple[float, float]:
    """Newton steps in logarithmic coordinates around the two circle radii.

    The closed form loses half the digits near a double root (gamma close to
    0 or pi/2). With ``s = r e^theta`` and ``t = r_tilde e^phi`` the curve
    reads ``2 sqrt(p_e p_w) cosh theta + 2 sqrt(p_n p_s) cosh phi = 1`` and
    the critical-point condition is
    ``sin(gamma) sqrt(p_e p_w) sinh theta = cos(gamma) sqrt(p_n p_s) sinh phi``,
    a well-conditioned system over the whole range of angles.
    """
    ra = math.sqrt(params.p_e * params.p_w)
    rb = math.sqrt(params.p_n * params.p_s)
    sin_g, cos_g = math.sin(gamma), math.cos(gamma)
    theta = math.log(s3 / params.r)
    phi = math.log(t3 / params.r_tilde)
    for _ in range(4):
        f1 = 2 * ra * math.cosh(theta) + 2 * rb * math.cosh(phi) - 1.0
        f2 = sin_g * ra * math.sinh(theta) - cos_g * rb * math.sinh(phi)
        j11, j12 = 2 * ra * math.sinh(theta), 2 * rb * math.sinh(phi)
        j21, j22 = sin_g * ra * math.cosh(theta), -cos_g * rb * math.cosh(phi)
        det = j11 * j22 - j12 * j21
        if det == 0.0:
            break
        theta -= (f1 * j22 - f2 * j12) / det
        phi -= (j11 * f2 - j21 * f1) / det
    return params.r * math.exp(theta), params.r_tilde * math.exp(phi)

