"""The universal cover of PSL2(R) as pairs (matrix, deck shift).

``CoverElement(m, k)`` stands for ``T_k`` composed with the canonical lift of
``m``.  Multiplication carries an integer cocycle obtained by evaluating both
sides at 0 and rounding.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

from . import circle, invariants, psl2, quasimorphism
from .circle import Lift
from .errors import CocycleNotIntegral, PreconditionViolated
from .invariants import DirectionType, RSharp
from .psl2 import ClassKind, ProjMat
from .quasimorphism import TauEstimate

COCYCLE_TOL = 1e-6
EPS_PARAM = 1e-9
COMMUTE_TOL = 1e-9
_SNAP_REL = 1e-12


@dataclass(frozen=True)
class CoverElement:
    m: ProjMat
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "k", int(self.k))

    def realize(self) -> Lift:
        return realize(self)

    def __mul__(self, other: CoverElement) -> CoverElement:
        return mul(self, other)

    def inverse(self) -> CoverElement:
        return inv(self)


ONE = CoverElement(psl2.IDENTITY, 0)


def central(k: int) -> CoverElement:
    return CoverElement(psl2.IDENTITY, k)


def _round_cocycle(value: float, tol: float) -> int:
    r = round(value)
    if abs(value - r) > tol:
        raise CocycleNotIntegral(value, tol)
    return int(r)


def realize(e: CoverElement) -> Lift:
    return psl2.lift_of(e.m, e.k)


def _norm(m: ProjMat) -> float:
    return max(abs(v) for v in m.entries())


def mul(e1: CoverElement, e2: CoverElement, tol: float = COCYCLE_TOL) -> CoverElement:
    m = e1.m @ e2.m
    # products that should be the identity are snapped so they classify cleanly
    if m.is_identity(_SNAP_REL * max(1.0, _norm(e1.m) * _norm(e2.m))):
        m = psl2.IDENTITY
    v = psl2.canonical_value
    c = v(e1.m, v(e2.m, 0.0)) - v(m, 0.0)
    return CoverElement(m, e1.k + e2.k + _round_cocycle(c, tol))


def inv(e: CoverElement, tol: float = COCYCLE_TOL) -> CoverElement:
    mi = e.m.inverse()
    c = psl2.canonical_value(e.m, psl2.canonical_value(mi, 0.0))
    return CoverElement(mi, -e.k - _round_cocycle(c, tol))


def conjugate(e: CoverElement, g: CoverElement) -> CoverElement:
    """``g e g^-1``."""
    return mul(mul(g, e), inv(g))


def commutator(e1: CoverElement, e2: CoverElement) -> CoverElement:
    return mul(mul(mul(e1, e2), inv(e1)), inv(e2))


def power(e: CoverElement, n: int) -> CoverElement:
    if n < 0:
        return power(inv(e), -n)
    out = ONE
    for _ in range(n):
        out = mul(out, e)
    return out


# -- classification -------------------------------------------------------------

class LabelKind(enum.Enum):
    IDENTITY = "Identity"
    CENTRAL = "Central"
    ELLIPTIC = "Elliptic"
    PARABOLIC_PLUS = "ParabolicPlus"
    PARABOLIC_MINUS = "ParabolicMinus"
    HYPERBOLIC = "Hyperbolic"


_FROM_PSL2 = {
    ClassKind.ELLIPTIC: LabelKind.ELLIPTIC,
    ClassKind.PARABOLIC_PLUS: LabelKind.PARABOLIC_PLUS,
    ClassKind.PARABOLIC_MINUS: LabelKind.PARABOLIC_MINUS,
    ClassKind.HYPERBOLIC: LabelKind.HYPERBOLIC,
}


class TraceCategory(enum.Enum):
    LT2 = "lt2"
    EQ2 = "eq2"
    GT2 = "gt2"
    CENTRAL = "central"


@dataclass(frozen=True)
class ConjClassLabel:
    """Conjugacy class in the cover: a normal form kind, its parameter and a deck shift.

    ``parameter`` is ``theta`` for elliptic classes, ``lambda`` for hyperbolic
    ones and ``None`` otherwise.
    """

    kind: LabelKind
    shift: int
    parameter: float | None = None

    def __post_init__(self):
        if self.kind is LabelKind.IDENTITY and self.shift != 0:
            raise ValueError("the identity class has shift 0; use Central")
        if self.kind is LabelKind.CENTRAL and self.shift == 0:
            raise ValueError("Central(0) is the identity class")
        if self.kind is LabelKind.ELLIPTIC and not 0 < self.parameter < math.pi:
            raise ValueError("elliptic parameter must lie in (0, pi)")
        if self.kind is LabelKind.HYPERBOLIC and not self.parameter > 1:
            raise ValueError("hyperbolic parameter must exceed 1")

    @classmethod
    def central(cls, k: int) -> ConjClassLabel:
        return cls(LabelKind.CENTRAL if k else LabelKind.IDENTITY, int(k))

    @property
    def is_central(self) -> bool:
        return self.kind in (LabelKind.IDENTITY, LabelKind.CENTRAL)

    def equals(self, other: ConjClassLabel, eps_param: float = EPS_PARAM) -> bool:
        if self.kind is not other.kind or self.shift != other.shift:
            return False
        if self.parameter is None or other.parameter is None:
            return self.parameter is other.parameter
        return abs(self.parameter - other.parameter) <= eps_param

    def shifted(self, j: int) -> ConjClassLabel:
        if self.is_central:
            return ConjClassLabel.central(self.shift + j)
        return ConjClassLabel(self.kind, self.shift + j, self.parameter)

    def normal_form(self) -> CoverElement:
        """The table representative ``T_shift`` times the lifted normal form."""
        if self.is_central:
            return central(self.shift)
        rep = {
            LabelKind.ELLIPTIC: lambda: psl2.rotation(self.parameter),
            LabelKind.HYPERBOLIC: lambda: psl2.dilation(self.parameter),
            LabelKind.PARABOLIC_PLUS: lambda: psl2.unipotent(1.0),
            LabelKind.PARABOLIC_MINUS: lambda: psl2.unipotent(-1.0),
        }[self.kind]()
        return CoverElement(rep, self.shift)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is LabelKind.ELLIPTIC:
            d["theta"] = self.parameter
        elif self.kind is LabelKind.HYPERBOLIC:
            d["lambda"] = self.parameter
        d["shift"] = self.shift
        return d

    def __str__(self):
        if self.kind is LabelKind.ELLIPTIC:
            return f"Elliptic(theta={self.parameter:.12g}, k={self.shift})"
        if self.kind is LabelKind.HYPERBOLIC:
            return f"Hyperbolic(lambda={self.parameter:.12g}, k={self.shift})"
        if self.kind is LabelKind.IDENTITY:
            return "Identity"
        if self.kind is LabelKind.CENTRAL:
            return f"Central({self.shift})"
        return f"{self.kind.value}({self.shift})"


def classify(e: CoverElement, tol: float = COCYCLE_TOL) -> ConjClassLabel:
    """Exact conjugacy label.

    The normal form ``r`` of ``e.m`` is conjugated back by the conjugator
    found in PSL2; the resulting cover element differs from ``e`` by a
    central ``T_j``, read off at the single point 0.
    """
    r = psl2.class_of(e.m)
    here = psl2.lift_of(e.m, e.k).scalar(0.0)
    if r.kind is ClassKind.IDENTITY:
        return ConjClassLabel.central(_round_cocycle(here, tol))
    g = CoverElement(r.conjugator, 0)
    base = conjugate(CoverElement(r.representative, 0), g)
    j = _round_cocycle(here - realize(base).scalar(0.0), tol)
    return ConjClassLabel(_FROM_PSL2[r.kind], j, r.parameter)


def are_conjugate(e1: CoverElement, e2: CoverElement, eps_param: float = EPS_PARAM) -> bool:
    return classify(e1).equals(classify(e2), eps_param)


@dataclass(frozen=True)
class TableRow:
    trace_category: TraceCategory
    direction: DirectionType
    ell_sharp: RSharp
    tau: float


def table_invariants(label: ConjClassLabel) -> TableRow:
    """Invariants of a class read from the classification table, without numerics."""
    k = label.shift
    n = abs(k)
    D = DirectionType
    if label.is_central:
        d = D.FORWARD if k > 0 else D.BACKWARD if k < 0 else D.IDENTITY
        return TableRow(TraceCategory.CENTRAL, d, RSharp.point(n), float(k))
    if label.kind is LabelKind.ELLIPTIC:
        tau = label.parameter / math.pi + k
        if k >= 0:
            return TableRow(TraceCategory.LT2, D.FORWARD, RSharp.open_interval(k), tau)
        return TableRow(TraceCategory.LT2, D.BACKWARD, RSharp.open_interval(n - 1), tau)
    if label.kind is LabelKind.HYPERBOLIC:
        if k == 0:
            return TableRow(TraceCategory.GT2, D.ALTERNATING, RSharp.open_interval(0), 0.0)
        d = D.FORWARD if k > 0 else D.BACKWARD
        return TableRow(TraceCategory.GT2, d, RSharp.open_interval(n), float(k))
    # u_1 moves points backwards, u_-1 forwards
    plus = label.kind is LabelKind.PARABOLIC_PLUS
    if k == 0:
        d = D.SEMI_BACKWARD if plus else D.SEMI_FORWARD
        return TableRow(TraceCategory.EQ2, d, RSharp.open_interval(0), 0.0)
    if k > 0:
        ell = RSharp.point(k) if plus else RSharp.open_interval(k)
        return TableRow(TraceCategory.EQ2, D.FORWARD, ell, float(k))
    ell = RSharp.open_interval(n) if plus else RSharp.point(n)
    return TableRow(TraceCategory.EQ2, D.BACKWARD, ell, float(k))


def trace_category_of(m: ProjMat, eps_parab: float = psl2.EPS_PARAB) -> TraceCategory:
    if m.is_identity():
        return TraceCategory.CENTRAL
    t = m.trace_bar
    if t > 2.0 + eps_parab:
        return TraceCategory.GT2
    if t < 2.0 - eps_parab:
        return TraceCategory.LT2
    return TraceCategory.EQ2


@dataclass(frozen=True)
class InvariantReport:
    element: CoverElement
    label: ConjClassLabel
    trace_bar: float
    trace_category: TraceCategory
    direction: DirectionType
    ell_sharp: RSharp
    tau_exact: float
    tau_numeric: TauEstimate
    numeric_direction: DirectionType
    numeric_ell_sharp: RSharp
    numeric_length: float

    @property
    def consistent(self) -> bool:
        return (
            self.direction is self.numeric_direction
            and self.ell_sharp == self.numeric_ell_sharp
            and self.tau_numeric.contains(self.tau_exact)
        )

    def mismatches(self) -> list[str]:
        out = []
        if self.direction is not self.numeric_direction:
            out.append(f"direction {self.direction} vs numeric {self.numeric_direction}")
        if self.ell_sharp != self.numeric_ell_sharp:
            out.append(f"ell_sharp {self.ell_sharp} vs numeric {self.numeric_ell_sharp}")
        if not self.tau_numeric.contains(self.tau_exact):
            out.append(f"tau {self.tau_exact} vs numeric {self.tau_numeric.value}")
        return out

    def to_dict(self) -> dict:
        m = self.element.m
        return {
            "matrix": [m.a, m.b, m.c, m.d],
            "k": self.element.k,
            "class": self.label.to_dict(),
            "trace_bar": self.trace_bar,
            "trace_category": self.trace_category.value,
            "direction": self.direction.value,
            "ell_sharp": str(self.ell_sharp),
            "tau_exact": self.tau_exact,
            "tau_numeric": {"value": self.tau_numeric.value, "error_bound": self.tau_numeric.error_bound},
            "numeric": {
                "direction": self.numeric_direction.value,
                "ell_sharp": str(self.numeric_ell_sharp),
                "length": self.numeric_length,
                "consistent": self.consistent,
            },
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def invariant_report(
    e: CoverElement,
    tau_iters: int = quasimorphism.DEFAULT_TAU_ITERS,
    grid: int = circle.DEFAULT_SAMPLES,
    eps_int: float = invariants.EPS_INT,
    eps_zero: float = invariants.EPS_ZERO,
) -> InvariantReport:
    """Exact table invariants of ``e`` together with an independent numeric reading."""
    label = classify(e)
    row = table_invariants(label)
    alpha = realize(e)
    profile = invariants.displacement_profile(alpha, grid)
    ell = max(abs(profile.min_disp), abs(profile.max_disp))
    return InvariantReport(
        element=e,
        label=label,
        trace_bar=e.m.trace_bar,
        trace_category=row.trace_category,
        direction=row.direction,
        ell_sharp=row.ell_sharp,
        tau_exact=row.tau,
        tau_numeric=quasimorphism.translation_number(alpha, tau_iters),
        numeric_direction=invariants.classify_profile(profile, eps_zero),
        numeric_ell_sharp=RSharp.from_value(ell, eps_int),
        numeric_length=ell,
    )


def cp_commutator_check(e1: CoverElement, e2: CoverElement, tol: float = COMMUTE_TOL, grid: int = 1024) -> float:
    """Distance from the identity of the lifted commutator of a commuting pair."""
    m1, m2 = e1.m, e2.m
    if not (m1 @ m2).isclose(m2 @ m1, tol * max(1.0, _norm(m1) * _norm(m2))):
        raise PreconditionViolated("projective images do not commute")
    return circle.dist_sup(realize(commutator(e1, e2)), circle.identity(), grid)
