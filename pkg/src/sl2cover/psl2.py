"""PSL2(R): arithmetic, Iwasawa factorisation, conjugacy normal forms and the circle action.

A point ``x`` of ``R/Z`` is identified with the line through ``(cos pi x, sin pi x)``.
Rotation by ``theta`` therefore acts as ``x -> x + theta/pi``.
"""
from __future__ import annotations

import cmath
import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from . import circle
from .circle import CircleMap, InvalidLift, Lift, SampledLift

EPS_PARAB = 1e-9
IDENTITY_TOL = 1e-12
_ZERO_ENTRY = 1e-14


@dataclass(frozen=True)
class ProjMat:
    """An element of PSL2(R), stored as the det-1 representative whose first
    non-negligible entry (in the order a, b, c, d) is positive."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = [float(v) for v in (self.a, self.b, self.c, self.d)]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("matrix entries must be finite")
        det = vals[0] * vals[3] - vals[1] * vals[2]
        if not det > 0:
            raise ValueError(f"determinant must be positive to lie in PSL2(R), got {det!r}")
        s = math.sqrt(det)
        vals = [v / s for v in vals]
        thresh = _ZERO_ENTRY * max(abs(v) for v in vals)
        for v in vals:
            if abs(v) > thresh:
                if v < 0:
                    vals = [-w for w in vals]
                break
        for name, v in zip("abcd", vals):
            object.__setattr__(self, name, v)

    @classmethod
    def from_array(cls, arr) -> ProjMat:
        arr = np.asarray(arr, dtype=float).reshape(2, 2)
        return cls(arr[0, 0], arr[0, 1], arr[1, 0], arr[1, 1])

    def array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def entries(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: ProjMat) -> ProjMat:
        a, b, c, d = self.entries()
        p, q, r, s = other.entries()
        return ProjMat(a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)

    def inverse(self) -> ProjMat:
        return ProjMat(self.d, -self.b, -self.c, self.a)

    @property
    def trace_bar(self) -> float:
        return abs(self.a + self.d)

    def sl2(self) -> tuple[float, float, float, float]:
        """The SL2 representative with non-negative trace (``c > 0`` breaks a zero-trace tie)."""
        t = self.a + self.d
        if abs(t) <= _ZERO_ENTRY:
            flip = self.c < 0
        else:
            flip = t < 0
        if flip:
            return (-self.a, -self.b, -self.c, -self.d)
        return self.entries()

    def distance(self, other: ProjMat) -> float:
        """Entrywise max-distance between the closest sign representatives."""
        x, y = self.array(), other.array()
        return float(min(np.max(np.abs(x - y)), np.max(np.abs(x + y))))

    def isclose(self, other: ProjMat, tol: float = 1e-9) -> bool:
        return self.distance(other) <= tol

    def is_identity(self, tol: float = IDENTITY_TOL) -> bool:
        return self.distance(IDENTITY) <= tol

    def moebius(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def __str__(self):
        return f"[[{self.a:.12g}, {self.b:.12g}], [{self.c:.12g}, {self.d:.12g}]]"


IDENTITY = ProjMat(1.0, 0.0, 0.0, 1.0)


def mul(m: ProjMat, n: ProjMat) -> ProjMat:
    return m @ n


def inv(m: ProjMat) -> ProjMat:
    return m.inverse()


def trace_bar(m: ProjMat) -> float:
    return m.trace_bar


def rotation(theta: float) -> ProjMat:
    c, s = math.cos(theta), math.sin(theta)
    return ProjMat(c, -s, s, c)


def dilation(lam: float) -> ProjMat:
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return ProjMat(lam, 0.0, 0.0, 1.0 / lam)


def unipotent(x: float) -> ProjMat:
    return ProjMat(1.0, x, 0.0, 1.0)


rho, a_, u_ = rotation, dilation, unipotent


# -- Iwasawa ------------------------------------------------------------------

@dataclass(frozen=True)
class IwasawaTriple:
    theta: float
    lam: float
    x: float

    def compose(self) -> ProjMat:
        return rotation(self.theta) @ dilation(self.lam) @ unipotent(self.x)


def iwasawa(m: ProjMat) -> IwasawaTriple:
    """Factor ``m = rho_theta a_lambda u_x`` with ``theta`` in ``[0, pi)``.

    ``m^-1 = u_-x a_(1/lambda) rho_-theta`` sends ``i`` to ``-x + i / lambda^2``,
    which fixes ``lambda`` and ``x``; what is left over stabilises ``i``,
    hence is a rotation.
    """
    z = m.inverse().moebius(1j)
    lam = 1.0 / math.sqrt(z.imag)
    x = -z.real
    an = dilation(lam) @ unipotent(x)
    k = m @ an.inverse()
    theta = math.atan2(k.c, k.a) % math.pi
    if theta >= math.pi:
        theta = 0.0
    return IwasawaTriple(theta, lam, x)


# -- conjugacy normal forms ---------------------------------------------------

class ClassKind(enum.Enum):
    IDENTITY = "Identity"
    HYPERBOLIC = "Hyperbolic"
    PARABOLIC_PLUS = "ParabolicPlus"
    PARABOLIC_MINUS = "ParabolicMinus"
    ELLIPTIC = "Elliptic"


@dataclass(frozen=True)
class Psl2ClassRep:
    """``conjugator @ representative @ conjugator^-1 == source``."""

    kind: ClassKind
    parameter: float | None
    representative: ProjMat
    conjugator: ProjMat

    def residual(self, source: ProjMat) -> float:
        return (self.conjugator @ self.representative @ self.conjugator.inverse()).distance(source)


def _kernel_vector(p, q, r, s):
    """A unit vector annihilated by the (near-)singular matrix ``[[p, q], [r, s]]``."""
    if math.hypot(p, q) >= math.hypot(r, s):
        v = (q, -p)
    else:
        v = (-s, r)
    n = math.hypot(*v)
    return (v[0] / n, v[1] / n)


def _basis(v, w) -> ProjMat:
    det = v[0] * w[1] - v[1] * w[0]
    if det < 0:
        w = (-w[0], -w[1])
    return ProjMat(v[0], w[0], v[1], w[1])


def class_of(m: ProjMat, eps_parab: float = EPS_PARAB, identity_tol: float = IDENTITY_TOL) -> Psl2ClassRep:
    """Conjugacy normal form of ``m``: one of Id, a_lambda (lambda > 1), u_1, u_-1, rho_theta (0 < theta < pi)."""
    p, q, r, s = m.sl2()
    t = p + s
    if m.is_identity(identity_tol):
        return Psl2ClassRep(ClassKind.IDENTITY, None, IDENTITY, IDENTITY)

    if abs(t - 2.0) <= eps_parab:
        v = _kernel_vector(p - 1.0, q, r, s - 1.0)
        w = (-v[1], v[0])
        basis = ProjMat(v[0], w[0], v[1], w[1])
        reduced = basis.inverse().array() @ np.array([[p, q], [r, s]]) @ basis.array()
        x = float(reduced[0, 1])
        # a genuine shear dominates the trace defect; otherwise the window only hides a tiny rotation or dilation
        if x != 0.0 and abs(x) > math.sqrt(abs(t - 2.0)):
            kind = ClassKind.PARABOLIC_PLUS if x > 0 else ClassKind.PARABOLIC_MINUS
            rep = unipotent(1.0 if x > 0 else -1.0)
            return Psl2ClassRep(kind, None, rep, basis @ dilation(math.sqrt(abs(x))))

    if t > 2.0:
        disc = math.sqrt(t * t - 4.0)
        lam = 0.5 * (t + disc)
        v1 = _kernel_vector(p - lam, q, r, s - lam)
        v2 = _kernel_vector(p - 1.0 / lam, q, r, s - 1.0 / lam)
        return Psl2ClassRep(ClassKind.HYPERBOLIC, lam, dilation(lam), _basis(v1, v2))

    # complex pair e^{+-i theta0}, theta0 in (0, pi/2] because t >= 0
    theta0 = math.acos(max(-1.0, min(1.0, t / 2.0)))
    mu = cmath.exp(1j * theta0)
    if abs(q) >= abs(r):
        u = (complex(q), mu - p)
    else:
        u = (mu - s, complex(r))
    re = (u[0].real, u[1].real)
    im = (u[0].imag, u[1].imag)
    det = re[0] * im[1] - re[1] * im[0]
    # in the basis (Re u, Im u) the matrix acts as rho_{-theta0}
    if det > 0:
        theta = math.pi - theta0
        conj = ProjMat(re[0], im[0], re[1], im[1])
    else:
        theta = theta0
        conj = ProjMat(re[0], -im[0], re[1], -im[1])
    return Psl2ClassRep(ClassKind.ELLIPTIC, theta, rotation(theta), conj)


# -- circle action and liftings -----------------------------------------------

@functools.lru_cache(maxsize=8192)
def _canonical_parts(m: ProjMat):
    p, q, r, s = m.sl2()
    f0 = math.atan2(r, p) / math.pi
    offset = -math.floor(f0)
    if f0 + offset >= 1.0:
        offset -= 1
    return p, q, r, s, float(offset)


def _lift_functions(m: ProjMat, shift: int):
    p, q, r, s, offset = _canonical_parts(m)
    off = offset + shift
    pi = math.pi
    cos, sin, atan2 = math.cos, math.sin, math.atan2

    def scalar(x):
        t = pi * x
        c = cos(t)
        sn = sin(t)
        wx = p * c + q * sn
        wy = r * c + s * sn
        return x + atan2(c * wy - sn * wx, c * wx + sn * wy) / pi + off

    def func(x):
        t = np.pi * x
        c = np.cos(t)
        sn = np.sin(t)
        wx = p * c + q * sn
        wy = r * c + s * sn
        return x + np.arctan2(c * wy - sn * wx, c * wx + sn * wy) / np.pi + off

    return func, scalar


def canonical_value(m: ProjMat, x: float) -> float:
    """Canonical lift of ``m`` evaluated at one point."""
    return _lift_functions(m, 0)[1](x)


def lift_of(m: ProjMat, shift: int = 0) -> Lift:
    """``T_shift`` composed with the canonical lift of ``m`` (closed form)."""
    func, scalar = _lift_functions(m, shift)

    def inverse():
        mi = m.inverse()
        back = canonical_value(m, canonical_value(mi, 0.0))
        return lift_of(mi, -shift - round(back))

    return Lift(func, scalar, inverse=inverse, name=f"T{shift}~{m}" if shift else f"~{m}")


def circle_map(m: ProjMat) -> CircleMap:
    return CircleMap(lift_of(m))


def canonical_lift_generic(phi, samples: int = circle.DEFAULT_SAMPLES) -> SampledLift:
    """Canonical lift of a circle map given by a vectorised ``phi: [0,1) -> R`` (read mod 1).

    Increments between consecutive samples are unwrapped into ``[0, 1)``; the
    total increase over a period must then be exactly 1.
    """
    grid = np.arange(samples + 1) / samples
    vals = np.mod(np.asarray(phi(grid), dtype=float), 1.0)
    steps = np.mod(np.diff(vals), 1.0)
    total = float(steps.sum())
    if abs(total - 1.0) > 1e-6 or np.any(steps <= 0):
        raise InvalidLift(f"map does not unwrap to a degree-one increasing lift (total increase {total:.6g})")
    table = vals[0] + np.concatenate(([0.0], np.cumsum(steps[:-1])))
    return SampledLift(table, name="canonical")


def fixed_line(m: ProjMat) -> float | None:
    """Point of ``R/Z`` fixed by ``m`` (a positive-eigenvalue eigenline), if any."""
    p, q, r, s = m.sl2()
    t = p + s
    if t < 2.0 - EPS_PARAB:
        return None
    if m.is_identity():
        return 0.0
    mu = 0.5 * (t + math.sqrt(max(t * t - 4.0, 0.0)))
    v = _kernel_vector(p - mu, q, r, s - mu)
    return (math.atan2(v[1], v[0]) / math.pi) % 1.0


def zhang_lift(m: ProjMat) -> Lift:
    """The alternative section of the covering: lifts with a fixed point where possible.

    With a real eigenline the unique lifting with a fixed point is returned;
    otherwise ``m = m1 u_x`` with ``x = b - (a-1)(d-1)/c`` and both factors
    have fixed lines.
    """
    x_star = fixed_line(m)
    if x_star is not None:
        j = round(x_star - canonical_value(m, x_star))
        return lift_of(m, j)
    a, b, c, d = m.sl2()
    x = b - (a - 1.0) * (d - 1.0) / c
    ux = unipotent(x)
    return circle.compose(zhang_lift(m @ ux.inverse()), zhang_lift(ux))


def zhang_parameter(m: ProjMat) -> float:
    a, b, c, d = m.sl2()
    return b - (a - 1.0) * (d - 1.0) / c
