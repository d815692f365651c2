"""Conjugacy invariants of lifts: displacement length, its sharp class, direction type."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .circle import DEFAULT_SAMPLES, Lift

EPS_INT = 1e-6
EPS_ZERO = 1e-9
TOL_FIX = 1e-9
REFINE_XATOL = 1e-10


@dataclass(frozen=True, order=True)
class RSharp:
    """A point of R-sharp: an integer ``[n]`` or an open unit interval ``(n, n+1)``.

    Only the non-negative half is needed since lengths are non-negative.
    """

    n: int
    interval: bool

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("RSharp values are non-negative")

    @classmethod
    def point(cls, n: int) -> RSharp:
        return cls(int(n), False)

    @classmethod
    def open_interval(cls, n: int) -> RSharp:
        return cls(int(n), True)

    @classmethod
    def from_value(cls, x: float, eps_int: float = EPS_INT) -> RSharp:
        r = round(x)
        if abs(x - r) <= eps_int:
            return cls.point(r)
        return cls.open_interval(math.floor(x))

    @classmethod
    def parse(cls, text: str) -> RSharp:
        text = text.strip()
        if text.startswith("[") and text.endswith("]"):
            return cls.point(int(text[1:-1]))
        if text.startswith("(") and text.endswith(")"):
            lo, hi = (int(p) for p in text[1:-1].split(","))
            if hi != lo + 1:
                raise ValueError(f"not a unit interval: {text}")
            return cls.open_interval(lo)
        raise ValueError(f"cannot parse R-sharp value {text!r}")

    def __str__(self):
        return f"({self.n},{self.n + 1})" if self.interval else f"[{self.n}]"


class DirectionType(enum.Enum):
    FORWARD = "Forward"
    SEMI_FORWARD = "SemiForward"
    ALTERNATING = "Alternating"
    SEMI_BACKWARD = "SemiBackward"
    BACKWARD = "Backward"
    IDENTITY = "Identity"

    @property
    def mirror(self) -> DirectionType:
        return _MIRROR[self]

    @property
    def pair(self) -> tuple[int, int] | None:
        """The ``(tau/|tau|, sigma)`` pair; ``None`` for the identity."""
        return _PAIRS[self]

    def __str__(self):
        return self.value


_MIRROR = {
    DirectionType.FORWARD: DirectionType.BACKWARD,
    DirectionType.BACKWARD: DirectionType.FORWARD,
    DirectionType.SEMI_FORWARD: DirectionType.SEMI_BACKWARD,
    DirectionType.SEMI_BACKWARD: DirectionType.SEMI_FORWARD,
    DirectionType.ALTERNATING: DirectionType.ALTERNATING,
    DirectionType.IDENTITY: DirectionType.IDENTITY,
}

_PAIRS = {
    DirectionType.FORWARD: (1, 1),
    DirectionType.SEMI_FORWARD: (0, 1),
    DirectionType.ALTERNATING: (0, 0),
    DirectionType.SEMI_BACKWARD: (0, -1),
    DirectionType.BACKWARD: (1, -1),
    DirectionType.IDENTITY: None,
}


@dataclass(frozen=True)
class DisplacementProfile:
    min_disp: float
    max_disp: float
    argmin: float
    argmax: float


def displacement_profile(alpha: Lift, grid: int = DEFAULT_SAMPLES) -> DisplacementProfile:
    """Extrema of ``alpha(x) - x`` on one period: grid scan, then bounded refinement."""
    if grid < 64:
        raise ValueError("grid must be at least 64")
    xs = np.arange(grid + 1) / grid
    d = alpha(xs) - xs
    disp = lambda t: alpha(t) - t  # noqa: E731

    def refine(i, sign):
        lo, hi = (i - 1) / grid, (i + 1) / grid
        res = minimize_scalar(
            lambda t: sign * disp(t), bounds=(lo, hi), method="bounded", options={"xatol": REFINE_XATOL}
        )
        t, val = float(res.x), sign * float(res.fun)
        if sign * val <= sign * d[i]:
            return t, val
        return xs[i], float(d[i])

    imin, imax = int(np.argmin(d)), int(np.argmax(d))
    tmin, vmin = refine(imin, 1.0)
    tmax, vmax = refine(imax, -1.0)
    return DisplacementProfile(vmin, vmax, tmin % 1.0, tmax % 1.0)


def length(alpha: Lift, grid: int = DEFAULT_SAMPLES) -> float:
    """``sup_t |alpha(t) - t|`` over one period."""
    p = displacement_profile(alpha, grid)
    return max(abs(p.min_disp), abs(p.max_disp))


def length_sharp(alpha: Lift, eps_int: float = EPS_INT, grid: int = DEFAULT_SAMPLES) -> RSharp:
    return RSharp.from_value(length(alpha, grid), eps_int)


def fixed_point(alpha: Lift, tol_fix: float = TOL_FIX, grid: int = DEFAULT_SAMPLES) -> float | None:
    """A point ``x*`` in ``[0, 1)`` with ``|alpha(x*) - x*| <= tol_fix``, or ``None``."""
    xs = np.arange(grid + 1) / grid
    d = alpha(xs) - xs
    zero = np.flatnonzero(np.abs(d) <= tol_fix)
    if zero.size:
        i = zero[np.argmin(np.abs(d[zero]))]
        return float(xs[i] % 1.0)
    change = np.flatnonzero(np.sign(d[:-1]) != np.sign(d[1:]))
    if change.size:
        i = change[0]
        x = brentq(lambda t: alpha(t) - t, xs[i], xs[i + 1], xtol=1e-15)
        return float(x % 1.0)
    # tangential contact: the displacement touches zero without changing sign
    p = displacement_profile(alpha, grid)
    if abs(p.max_disp) <= tol_fix:
        return p.argmax
    if abs(p.min_disp) <= tol_fix:
        return p.argmin
    return None


def classify_profile(p: DisplacementProfile, eps_zero: float = EPS_ZERO) -> DirectionType:
    lo, hi = p.min_disp, p.max_disp
    if abs(lo) <= eps_zero and abs(hi) <= eps_zero:
        return DirectionType.IDENTITY
    if lo > eps_zero:
        return DirectionType.FORWARD
    if hi < -eps_zero:
        return DirectionType.BACKWARD
    if abs(lo) <= eps_zero:
        return DirectionType.SEMI_FORWARD
    if abs(hi) <= eps_zero:
        return DirectionType.SEMI_BACKWARD
    return DirectionType.ALTERNATING


def direction_type(alpha: Lift, eps_zero: float = EPS_ZERO, grid: int = DEFAULT_SAMPLES) -> DirectionType:
    """Direction type read off the sign pattern of the displacement."""
    return classify_profile(displacement_profile(alpha, grid), eps_zero)
