"""Walk parameters, start points, drift classification and derived constants."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import NegativeDrift, NonPositiveProbability, SumNotOne, QuarterWalkError

SUM_TOLERANCE = 1e-12


class DriftClass(enum.Enum):
    ZERO_ZERO = "ZeroZero"
    POS_POS = "PosPos"
    ZERO_X_POS_Y = "ZeroXPosY"
    POS_X_ZERO_Y = "PosXZeroY"


@dataclass(frozen=True)
class WalkParams:
    """Transition probabilities of a nearest-neighbour walk in the quarter plane.

    ``p_e``, ``p_w``, ``p_n`` and ``p_s`` are the probabilities of a step
    east (+x), west (-x), north (+y) and south (-y). Construction validates
    positivity, the unit sum and non-negative drifts; nothing is rescaled.
    """

    p_e: float
    p_w: float
    p_n: float
    p_s: float

    def __post_init__(self) -> None:
        probs = (self.p_e, self.p_w, self.p_n, self.p_s)
        names = ("p_e", "p_w", "p_n", "p_s")
        for name, p in zip(names, probs):
            if not math.isfinite(p):
                raise NonPositiveProbability(f"positivity: {name}={p!r} is not finite")
            if p <= 0.0:
                raise NonPositiveProbability(f"positivity: {name}={p!r} must be strictly positive")
        total = math.fsum(probs)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise SumNotOne(f"unit sum: probabilities sum to {total!r}, not 1")
        if self.p_e < self.p_w:
            raise NegativeDrift(f"non-negative drift: M_x = p_e - p_w = {self.p_e - self.p_w!r} < 0")
        if self.p_n < self.p_s:
            raise NegativeDrift(f"non-negative drift: M_y = p_n - p_s = {self.p_n - self.p_s!r} < 0")

    @property
    def drift_x(self) -> float:
        return self.p_e - self.p_w

    @property
    def drift_y(self) -> float:
        return self.p_n - self.p_s

    @property
    def drift_class(self) -> DriftClass:
        zero_x = self.p_e == self.p_w
        zero_y = self.p_n == self.p_s
        if zero_x and zero_y:
            return DriftClass.ZERO_ZERO
        if zero_x:
            return DriftClass.ZERO_X_POS_Y
        if zero_y:
            return DriftClass.POS_X_ZERO_Y
        return DriftClass.POS_POS

    @property
    def r(self) -> float:
        return math.sqrt(self.p_w / self.p_e)

    @property
    def r_tilde(self) -> float:
        return math.sqrt(self.p_s / self.p_n)

    @property
    def z1(self) -> float:
        return derive(self).z1

    def swapped(self) -> "WalkParams":
        """The walk seen with the two coordinates exchanged."""
        return WalkParams(p_e=self.p_n, p_w=self.p_s, p_n=self.p_e, p_s=self.p_w)

    def as_dict(self) -> dict[str, float]:
        return {"p_e": self.p_e, "p_w": self.p_w, "p_n": self.p_n, "p_s": self.p_s}


@dataclass(frozen=True)
class StartPoint:
    n0: int
    m0: int

    def __post_init__(self) -> None:
        for name, v in (("n0", self.n0), ("m0", self.m0)):
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise QuarterWalkError(f"start coordinate {name}={v!r} must be an integer >= 1")
        object.__setattr__(self, "n0", int(self.n0))
        object.__setattr__(self, "m0", int(self.m0))

    def swapped(self) -> "StartPoint":
        return StartPoint(self.m0, self.n0)


@dataclass(frozen=True)
class DerivedConstants:
    r: float
    r_tilde: float
    z1: float


def validate(p_e: float, p_w: float, p_n: float, p_s: float) -> WalkParams:
    """Check the four raw probabilities and return a ``WalkParams``."""
    return WalkParams(float(p_e), float(p_w), float(p_n), float(p_s))


def derive(params: WalkParams) -> DerivedConstants:
    """Radii of the two circles and the radius of convergence in time.

    For a driftless walk ``z1`` is exactly one. Otherwise the closed form is
    used and clamped at one, since rounding in a sum that only equals one to
    within ``SUM_TOLERANCE`` could otherwise push it just below.
    """
    r = math.sqrt(params.p_w / params.p_e)
    r_tilde = math.sqrt(params.p_s / params.p_n)
    if params.drift_class is DriftClass.ZERO_ZERO:
        z1 = 1.0
    else:
        denom = 2.0 * math.sqrt(params.p_e * params.p_w) + 2.0 * math.sqrt(params.p_n * params.p_s)
        z1 = max(1.0 / denom, math.nextafter(1.0, 2.0))
    return DerivedConstants(r=r, r_tilde=r_tilde, z1=z1)


def non_absorption_probability(params: WalkParams, start: StartPoint) -> float:
    """Probability that the walk never reaches either axis."""
    ratio_x = params.p_w / params.p_e
    ratio_y = params.p_s / params.p_n
    return (1.0 - ratio_x**start.n0) * (1.0 - ratio_y**start.m0)


_PARAM_KEYS = ("p_e", "p_w", "p_n", "p_s")
_START_KEYS = ("n0", "m0")


def parse_config(text: str) -> dict[str, float | int]:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out: dict[str, float | int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise QuarterWalkError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in _PARAM_KEYS:
            out[key] = float(value)
        elif key in _START_KEYS:
            out[key] = int(value)
        else:
            raise QuarterWalkError(f"line {lineno}: unknown key {key!r}")
    return out


def load_config(path: str | Path) -> dict[str, float | int]:
    return parse_config(Path(path).read_text(encoding="utf-8"))
