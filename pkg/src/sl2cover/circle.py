"""Lifts of orientation-preserving circle homeomorphisms.

A lift is a strictly increasing map ``alpha`` of the real line with
``alpha(x + 1) == alpha(x) + 1``.  Lifts come in two flavours:

* closed form -- a vectorised callable plus an optional fast scalar path;
* sampled -- ``M`` values of ``alpha`` on the uniform grid of ``[0, 1)``,
  extended by piecewise-linear interpolation and equivariance.

All lifts are immutable; every operation returns a new lift.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq, elementwise, minimize_scalar

from .errors import ConvergenceFailure, InvalidLift

DEFAULT_SAMPLES = 4096
TOL_EQ = 1e-9
TOL_INV = 1e-10

# bracket padding used when inverting closed-form lifts
_BRACKET_GRID = 257


class Lift:
    """Closed-form lift.

    ``func`` evaluates float arrays; ``scalar`` evaluates a single Python float
    (defaults to routing through ``func``).  ``inverse`` is an optional
    zero-argument factory used by :func:`invert` when an exact inverse is known.
    ``shift`` is set only for pure translations ``x -> x + shift``.
    """

    sampled = False

    def __init__(self, func, scalar=None, *, inverse=None, orbit=None, shift=None, name=None):
        self._func = func
        if scalar is None:
            scalar = lambda x: float(func(np.array([x]))[0])  # noqa: E731
        self._scalar = scalar
        self._inverse = inverse
        self._orbit = orbit
        self.shift = shift
        self.name = name or "lift"

    def __call__(self, x):
        if np.ndim(x) == 0:
            return self._scalar(float(x))
        return self._func(np.asarray(x, dtype=float))

    @property
    def scalar(self):
        return self._scalar

    def orbit(self, x: float, n: int) -> float:
        """Return the ``n``-th iterate of ``x``."""
        if self._orbit is not None:
            return self._orbit(float(x), n)
        f = self._scalar
        x = float(x)
        for _ in range(n):
            x = f(x)
        return x

    def sample(self, m: int = DEFAULT_SAMPLES) -> SampledLift:
        return SampledLift(self(np.arange(m) / m), name=self.name)

    def __matmul__(self, other):
        return compose(self, other)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class SampledLift(Lift):
    """Lift stored as samples ``alpha(i / M)`` for ``i = 0..M-1``.

    Non-finite tables are rejected here; monotonicity is *not* enforced at
    construction so that :func:`validate` can report on broken tables.
    """

    sampled = True

    def __init__(self, values, name=None):
        v = np.array(values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise InvalidLift("sample table must be a non-empty 1-d array")
        if not np.all(np.isfinite(v)):
            raise InvalidLift("sample table contains non-finite values")
        v.setflags(write=False)
        self.values = v
        m = v.size
        ext = np.append(v, v[0] + 1.0)
        ext_list = ext.tolist()

        def func(x):
            n = np.floor(x)
            t = (x - n) * m
            i = np.minimum(t.astype(np.int64), m - 1)
            w = t - i
            return n + ext[i] + w * (ext[i + 1] - ext[i])

        def scalar(x):
            n = math.floor(x)
            t = (x - n) * m
            i = min(int(t), m - 1)
            lo = ext_list[i]
            return n + lo + (t - i) * (ext_list[i + 1] - lo)

        super().__init__(func, scalar, name=name or f"sampled[{m}]")

    @property
    def sample_count(self) -> int:
        return self.values.size

    def to_bytes(self) -> bytes:
        """Little-endian u64 count followed by the samples as f64."""
        return struct.pack("<Q", self.values.size) + self.values.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> SampledLift:
        if len(data) < 8:
            raise InvalidLift("truncated lift dump")
        (m,) = struct.unpack_from("<Q", data)
        if len(data) != 8 + 8 * m:
            raise InvalidLift(f"expected {8 + 8 * m} bytes for {m} samples, got {len(data)}")
        return cls(np.frombuffer(data, dtype="<f8", offset=8, count=m))


def write_lift(path, alpha: Lift, m: int = DEFAULT_SAMPLES) -> None:
    table = alpha if isinstance(alpha, SampledLift) else alpha.sample(m)
    Path(path).write_bytes(table.to_bytes())


def read_lift(path) -> SampledLift:
    return SampledLift.from_bytes(Path(path).read_bytes())


@dataclass(frozen=True)
class CircleMap:
    """The circle map induced by a lift, on ``S^1 = R/Z``."""

    lift: Lift

    def __post_init__(self):
        v0 = self.lift(0.0)
        # a value a hair below 0 is rounding noise of a lift that fixes 0
        if not -1e-12 <= v0 < 1.0:
            raise InvalidLift(f"canonical lift must send 0 into [0, 1), got {v0!r}")

    def __call__(self, x):
        return np.mod(self.lift(x), 1.0)


# -- constructors -----------------------------------------------------------

def translation(u: float) -> Lift:
    u = float(u)
    if not math.isfinite(u):
        raise InvalidLift("translation amount must be finite")
    return Lift(
        lambda x: x + u,
        lambda x: x + u,
        inverse=lambda: translation(-u),
        orbit=lambda x, n: x + n * u,
        shift=u,
        name=f"T({u:g})",
    )


def identity() -> Lift:
    return translation(0.0)


def sine_lift(q: int = 1, c: float = 0.0) -> Lift:
    """``x -> x + sin(2 pi q x) / (2 pi q) + c``; strictly increasing for every q >= 1."""
    if int(q) != q or q < 1:
        raise ValueError("q must be a positive integer")
    c = float(c)
    if not math.isfinite(c):
        raise InvalidLift("offset must be finite")
    k = 2.0 * math.pi * q
    sin = math.sin
    return Lift(
        lambda x: x + np.sin(k * x) / k + c,
        lambda x: x + sin(k * x) / k + c,
        name=f"sine(q={q}, c={c:g})",
    )


def evaluate(alpha: Lift, x):
    return alpha(x)


# -- group operations -------------------------------------------------------

def compose(alpha: Lift, beta: Lift, *, samples: int | None = None) -> Lift:
    """Return the lift of ``alpha o beta``.

    Closed-form operands compose lazily.  If either operand is sampled the
    result is re-sampled on the finer of the two grids and must stay monotone.
    """
    if alpha.sampled or beta.sampled:
        sizes = [a.sample_count for a in (alpha, beta) if a.sampled]
        m = samples or max(sizes)
        out = SampledLift(alpha(beta(np.arange(m) / m)), name=f"{alpha.name}*{beta.name}")
        if validate(out).monotone_violations:
            raise InvalidLift("composed sample table is not strictly increasing")
        return out
    if alpha.shift is not None and beta.shift is not None:
        return translation(alpha.shift + beta.shift)
    fa, fb = alpha._func, beta._func
    sa, sb = alpha._scalar, beta._scalar
    return Lift(
        lambda x: fa(fb(x)),
        lambda x: sa(sb(x)),
        inverse=lambda: compose(invert(beta), invert(alpha)),
        name=f"{alpha.name}*{beta.name}",
    )


def compose_all(*lifts: Lift) -> Lift:
    out = lifts[-1]
    for a in reversed(lifts[:-1]):
        out = compose(a, out)
    return out


def power(alpha: Lift, n: int) -> Lift:
    """``alpha^n`` for ``n >= 0`` evaluated by iteration, never by nesting closures."""
    if n < 0:
        return power(invert(alpha), -n)
    if alpha.shift is not None:
        return translation(n * alpha.shift)
    f = alpha._func

    def func(x):
        for _ in range(n):
            x = f(x)
        return x

    return Lift(
        func,
        lambda x: alpha.orbit(x, n),
        inverse=lambda: power(invert(alpha), n),
        orbit=lambda x, k: alpha.orbit(x, n * k),
        name=f"({alpha.name})^{n}",
    )


def conjugate(beta: Lift, alpha: Lift) -> Lift:
    """``beta alpha beta^-1``; orbits run through ``alpha`` directly."""
    binv = invert(beta)
    base = compose(beta, compose(alpha, binv))
    if base.sampled:
        return base
    return Lift(
        base._func,
        base._scalar,
        inverse=lambda: conjugate(beta, invert(alpha)),
        orbit=lambda x, n: beta(alpha.orbit(binv(x), n)),
        name=f"conj({beta.name}, {alpha.name})",
    )


def commutator(alpha: Lift, beta: Lift) -> Lift:
    """``alpha beta alpha^-1 beta^-1``."""
    return compose_all(alpha, beta, invert(alpha), invert(beta))


def invert(alpha: Lift, *, tol: float = TOL_INV) -> Lift:
    """Inverse lift.

    Exact when the lift knows its inverse or is piecewise linear; otherwise
    each evaluation solves ``alpha(x) = y`` on a guaranteed bracket.
    """
    if alpha._inverse is not None:
        return alpha._inverse()
    if alpha.sampled:
        return _invert_table(alpha)
    return _invert_by_root(alpha, tol)


def _invert_table(alpha: SampledLift) -> SampledLift:
    v = alpha.values
    m = v.size
    grid = np.arange(m) / m
    base = math.floor(v[0])
    ks = np.arange(-base - 2, -base + 3, dtype=float)
    xs = (grid[None, :] + ks[:, None]).ravel()
    ys = (v[None, :] + ks[:, None]).ravel()
    if np.any(np.diff(ys) <= 0):
        raise InvalidLift("cannot invert a non-monotone sample table")
    return SampledLift(np.interp(grid, ys, xs), name=f"inv({alpha.name})")


def _invert_by_root(alpha: Lift, tol: float) -> Lift:
    g = np.linspace(0.0, 1.0, _BRACKET_GRID)
    d = alpha(g) - g
    # alpha(x) - x lies in [dmin, dmax] up to grid error, so x is in [y - dmax, y - dmin]
    lo_pad = float(d.max()) + 1.0
    hi_pad = 1.0 - float(d.min())
    f, fs = alpha._func, alpha._scalar
    xatol = min(tol, 1e-12) * 1e-2

    def func(y):
        y = np.asarray(y, dtype=float)
        res = elementwise.find_root(
            lambda x, yy: f(x) - yy,
            (y - lo_pad, y + hi_pad),
            args=(y,),
            tolerances=dict(xatol=xatol),
        )
        if not np.all(res.success):
            raise ConvergenceFailure(f"could not invert {alpha.name} on {np.count_nonzero(~res.success)} points")
        return res.x

    def scalar(y):
        try:
            return brentq(lambda x: fs(x) - y, y - lo_pad, y + hi_pad, xtol=xatol)
        except ValueError as exc:
            raise ConvergenceFailure(f"could not bracket {alpha.name}^-1({y})") from exc

    return Lift(func, scalar, inverse=lambda: alpha, name=f"inv({alpha.name})")


# -- metrics and diagnostics -----------------------------------------------

def dist_sup(alpha: Lift, beta: Lift, grid: int = DEFAULT_SAMPLES) -> float:
    """``sup_x |alpha(x) - beta(x)|``; the difference is 1-periodic so ``[0, 1]`` suffices."""
    xs = np.linspace(0.0, 1.0, grid + 1)
    diff = np.abs(alpha(xs) - beta(xs))
    i = int(np.argmax(diff))
    best = float(diff[i])
    if best == 0.0:
        return 0.0
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, grid)]
    res = minimize_scalar(
        lambda t: -abs(alpha(t) - beta(t)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
    )
    return max(best, -float(res.fun))


@dataclass(frozen=True)
class LiftDiagnostics:
    finite: bool
    monotone_violations: int
    equivariance_residual: float
    passed: bool


def validate(alpha: Lift, grid: int = DEFAULT_SAMPLES, tol_eq: float = TOL_EQ) -> LiftDiagnostics:
    """Check strict monotonicity on a grid and the equivariance residual."""
    if alpha.sampled:
        v = alpha.values
        steps = np.diff(np.append(v, v[0] + 1.0))
        xs = np.arange(v.size) / v.size
    else:
        xs = np.linspace(0.0, 1.0, grid + 1)
        v = alpha(xs)
        steps = np.diff(v)
    finite = bool(np.all(np.isfinite(v)))
    violations = int(np.count_nonzero(~(steps > 0)))
    residual = float(np.max(np.abs(alpha(xs + 1.0) - alpha(xs) - 1.0))) if finite else math.inf
    return LiftDiagnostics(
        finite=finite,
        monotone_violations=violations,
        equivariance_residual=residual,
        passed=finite and violations == 0 and residual <= tol_eq,
    )
