"""Real-valued quasi-morphisms on lifts: evaluation maps, defects, homogenization.

The translation number is the homogenization of the evaluation map at 0.
Estimates carry a certified error bound of the form ``C / n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable

from . import circle
from .circle import Lift

DEFAULT_TAU_ITERS = 10_000
TAU_ERROR_CONSTANT = 2.0


@dataclass(frozen=True)
class TauEstimate:
    value: float
    error_bound: float
    iterations: int

    def contains(self, x: float) -> bool:
        return abs(self.value - x) <= self.error_bound


@dataclass(frozen=True)
class QuasiMorphism:
    evaluate: Callable[[Any], float]
    name: str

    def __call__(self, g) -> float:
        return self.evaluate(g)


def e_x(x: float) -> QuasiMorphism:
    """The evaluation map ``alpha -> alpha(x) - x``."""
    x = float(x)
    return QuasiMorphism(lambda alpha: alpha(x) - x, f"E_{x:g}")


def defect_sample(phi: QuasiMorphism, pairs: Iterable, mul: Callable = circle.compose) -> float:
    """Largest observed ``|phi(gh) - phi(g) - phi(h)|``: a lower bound on the defect."""
    worst = None
    for g, h in pairs:
        d = abs(phi(mul(g, h)) - phi(g) - phi(h))
        worst = d if worst is None else max(worst, d)
    if worst is None:
        raise ValueError("pairs must be non-empty")
    return worst


def translation_number(alpha: Lift, n: int = DEFAULT_TAU_ITERS) -> TauEstimate:
    """Estimate ``tau(alpha)`` from the orbit of 0.

    ``|value - tau| <= 2/n``: the evaluation map at 0 has defect below 1, and
    the extra 1/n absorbs interpolation error of sampled lifts.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if alpha.shift is not None:
        return TauEstimate(float(alpha.shift), TAU_ERROR_CONSTANT / n, n)
    return TauEstimate(alpha.orbit(0.0, n) / n, TAU_ERROR_CONSTANT / n, n)


def homogenize(phi: QuasiMorphism, g, n: int, defect: float = 1.0, mul: Callable | None = None) -> TauEstimate:
    """``phi(g^n) / n`` with error bound ``defect / n``.

    Lifts are powered by iteration; other elements need ``mul``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if mul is None:
        gn = circle.power(g, n)
    else:
        gn = g
        for _ in range(n - 1):
            gn = mul(gn, g)
    return TauEstimate(phi(gn) / n, defect / n, n)


def tau_conjugation_residual(alpha: Lift, beta: Lift, n: int = DEFAULT_TAU_ITERS) -> float:
    """``|tau_n(beta alpha beta^-1) - tau_n(alpha)|``, at most ``4/n``."""
    conj = circle.conjugate(beta, alpha)
    return abs(translation_number(conj, n).value - translation_number(alpha, n).value)
