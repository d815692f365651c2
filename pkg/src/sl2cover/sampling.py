"""Seeded random elements for property sweeps."""
from __future__ import annotations

import math
import os

import numpy as np

from . import circle, cover, psl2
from .circle import Lift
from .cover import CoverElement
from .psl2 import ProjMat

DEFAULT_SEED = 20240229
SEED_ENV = "SL2COVER_SEED"


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    raw = os.environ.get(SEED_ENV)
    return int(raw, 0) if raw else default


def make_rng(seed: int | None = None) -> np.random.Generator:
    return np.random.default_rng(seed_from_env() if seed is None else seed)


def gaussian_matrix(rng: np.random.Generator) -> ProjMat:
    """Entries N(0, 1), orientation fixed by negating the first row, renormalised."""
    while True:
        a, b, c, d = rng.standard_normal(4)
        det = a * d - b * c
        if abs(det) > 1e-3:
            break
    if det < 0:
        a, b = -a, -b
    return ProjMat(a, b, c, d)


def tame_matrix(rng: np.random.Generator) -> ProjMat:
    """``rho_phi a_mu u_t`` with bounded ``mu`` and ``t``: a well-conditioned element."""
    return (
        psl2.rotation(rng.uniform(0, math.pi))
        @ psl2.dilation(math.exp(rng.uniform(-0.7, 0.7)))
        @ psl2.unipotent(rng.uniform(-1.0, 1.0))
    )


def normal_form(rng: np.random.Generator) -> ProjMat:
    kind = rng.integers(5)
    if kind == 0:
        return psl2.rotation(rng.uniform(0.05, math.pi - 0.05))
    if kind == 1:
        return psl2.dilation(rng.uniform(1.1, 4.0))
    if kind == 2:
        return psl2.unipotent(1.0)
    if kind == 3:
        return psl2.unipotent(-1.0)
    return tame_matrix(rng)


def cover_element(rng: np.random.Generator, kmax: int = 3, conjugated: bool = True) -> CoverElement:
    """A normal form (or generic matrix), conjugated by a tame matrix, with a random deck shift."""
    m = normal_form(rng)
    if conjugated:
        p = tame_matrix(rng)
        m = p @ m @ p.inverse()
    return CoverElement(m, int(rng.integers(-kmax, kmax + 1)))


def matrix_lift(rng: np.random.Generator, kmax: int = 2) -> Lift:
    return cover.realize(cover_element(rng, kmax))


def sine_family(rng: np.random.Generator) -> Lift:
    return circle.sine_lift(int(rng.integers(1, 4)), float(rng.uniform(-2.0, 2.0)))


def mixed_lift(rng: np.random.Generator) -> Lift:
    """Rotations, dilations, unipotents, sine perturbations and translations, possibly composed."""
    kind = rng.integers(4)
    if kind == 0:
        return matrix_lift(rng)
    if kind == 1:
        return sine_family(rng)
    if kind == 2:
        return circle.translation(rng.uniform(-2.0, 2.0))
    return circle.compose(sine_family(rng), matrix_lift(rng))


COMMUTING_FAMILIES = ("K", "A", "N", "power")


def commuting_pair(rng: np.random.Generator, family: str, kmax: int = 3) -> tuple[CoverElement, CoverElement]:
    """Two cover elements whose images in PSL2 commute."""
    k1, k2 = (int(x) for x in rng.integers(-kmax, kmax + 1, size=2))
    p = tame_matrix(rng)
    if family == "K":
        ms = [psl2.rotation(t) for t in rng.uniform(0, math.pi, size=2)]
    elif family == "A":
        ms = [psl2.dilation(x) for x in np.exp(rng.uniform(-1.5, 1.5, size=2))]
    elif family == "N":
        ms = [psl2.unipotent(x) for x in rng.uniform(-5.0, 5.0, size=2)]
    elif family == "power":
        e = CoverElement(normal_form(rng), k1)
        e = cover.conjugate(e, CoverElement(p, 0))
        q = int(rng.choice([-2, -1, 2, 3]))
        return e, cover.mul(cover.power(e, q), cover.central(k2))
    else:
        raise ValueError(f"unknown family {family!r}")
    pi = p.inverse()
    return CoverElement(p @ ms[0] @ pi, k1), CoverElement(p @ ms[1] @ pi, k2)
