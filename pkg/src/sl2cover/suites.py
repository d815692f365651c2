"""Seeded property sweeps behind ``sl2cover verify``.

Each check returns a :class:`Check` carrying the number of cases, the worst
observed statistic and whether the property held on every case.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import circle, cover, finite_cp, invariants, psl2, quasimorphism, sampling
from .cover import CoverElement
from .invariants import DirectionType


@dataclass
class Check:
    name: str
    passed: bool
    cases: int
    worst: float | None = None
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = "" if self.worst is None else f" worst={self.worst:.3g}"
        extra = f" {self.detail}" if self.detail else ""
        return f"{status} {self.name}: {self.cases} cases{worst}{extra}"


@dataclass
class Settings:
    grid: int = 1024
    tau_iters: int = quasimorphism.DEFAULT_TAU_ITERS
    scale: float = 1.0  # multiplies every sample count

    def n(self, base: int) -> int:
        return max(1, int(round(base * self.scale)))


# -- quasi-morphisms ---------------------------------------------------------------

def check_defect(rng, pairs: int) -> Check:
    e0 = quasimorphism.e_x(0.0)
    worst = 0.0
    for _ in range(pairs):
        a, b = sampling.mixed_lift(rng), sampling.mixed_lift(rng)
        worst = max(worst, quasimorphism.defect_sample(e0, [(a, b)]))
    return Check("E_0 defect < 1", worst < 1.0, pairs, worst)


def check_x_independence(rng, cases: int) -> Check:
    worst = 0.0
    for _ in range(cases):
        a = sampling.mixed_lift(rng)
        x, y = rng.uniform(-3, 3, size=2)
        worst = max(worst, abs(quasimorphism.e_x(x)(a) - quasimorphism.e_x(y)(a)))
    return Check("|E_x - E_y| <= 1", worst <= 1.0, cases, worst)


def check_tau_certified(rng, cases: int, n: int) -> Check:
    worst, bad = 0.0, 0
    for _ in range(cases):
        kind = rng.integers(3)
        k = int(rng.integers(-3, 4))
        if kind == 0:
            theta = rng.uniform(0.01, math.pi - 0.01)
            alpha, tau = cover.realize(CoverElement(psl2.rotation(theta), k)), theta / math.pi + k
        elif kind == 1:
            alpha, tau = circle.compose(circle.translation(k), circle.sine_lift(int(rng.integers(1, 4)))), float(k)
        else:
            u = rng.uniform(-3, 3)
            alpha, tau = circle.translation(u), u
        est = quasimorphism.translation_number(alpha, n)
        err = abs(est.value - tau)
        worst = max(worst, err)
        bad += err > est.error_bound
    return Check("tau within 2/n of closed form", bad == 0, cases, worst)


def check_homogeneity(rng, cases: int, n: int) -> Check:
    worst, bad = 0.0, 0
    for _ in range(cases):
        alpha = sampling.matrix_lift(rng)
        for k in (2, 3):
            lhs = quasimorphism.translation_number(circle.power(alpha, k), n).value
            rhs = k * quasimorphism.translation_number(alpha, k * n).value
            err = abs(lhs - rhs)
            worst = max(worst, err)
            bad += err > 2.0 / n + 2.0 * k / (k * n)
    return Check("tau(a^k) = k tau(a)", bad == 0, cases, worst)


def check_fixed_point_tau(rng, cases: int, n: int, grid: int) -> Check:
    bad = 0
    for _ in range(cases):
        e = sampling.cover_element(rng, kmax=1)
        alpha = cover.realize(e)
        est = quasimorphism.translation_number(alpha, n)
        has_fix = invariants.fixed_point(alpha, grid=grid) is not None
        bad += has_fix != (abs(est.value) <= est.error_bound)
    return Check("fixed point <=> tau = 0", bad == 0, cases)


def quasi_suite(rng, s: Settings) -> list[Check]:
    return [
        check_defect(rng, s.n(2000)),
        check_x_independence(rng, s.n(500)),
        check_tau_certified(rng, s.n(60), s.tau_iters),
        check_homogeneity(rng, s.n(20), 2000),
        check_fixed_point_tau(rng, s.n(100), s.tau_iters, s.grid),
    ]


# -- invariants ---------------------------------------------------------------------

def _conjugation_case(rng):
    """``(alpha, conj, label_pair)``; the label pair is set for matrix-family alpha."""
    g = sampling.cover_element(rng, kmax=2)
    if rng.random() < 0.7:
        e = sampling.cover_element(rng, kmax=3)
        c = cover.conjugate(e, g)
        return cover.realize(e), cover.realize(c), (e, c)
    alpha = sampling.sine_family(rng)
    return alpha, circle.conjugate(cover.realize(g), alpha), None


def check_conjugation_invariance(rng, pairs: int, n: int, grid: int) -> list[Check]:
    tau_worst, tau_bad, dir_bad, ell_bad = 0.0, 0, 0, 0
    for _ in range(pairs):
        alpha, conj, labels = _conjugation_case(rng)
        r = abs(quasimorphism.translation_number(conj, n).value - quasimorphism.translation_number(alpha, n).value)
        tau_worst = max(tau_worst, r)
        tau_bad += r > 4.0 / n
        dir_bad += invariants.direction_type(alpha, grid=grid) is not invariants.direction_type(conj, grid=grid)
        if labels is not None:
            ea, ec = (cover.table_invariants(cover.classify(x)).ell_sharp for x in labels)
            ell_bad += ea != ec
        ell_bad += invariants.length_sharp(alpha, grid=grid) != invariants.length_sharp(conj, grid=grid)
    return [
        Check("tau conjugation residual <= 4/n", tau_bad == 0, pairs, tau_worst),
        Check("direction type conjugation invariant", dir_bad == 0, pairs, detail=f"violations={dir_bad}"),
        Check("length-sharp conjugation invariant", ell_bad == 0, pairs, detail=f"violations={ell_bad}"),
    ]


def check_length_bounds(rng, pairs: int, n: int, grid: int) -> list[Check]:
    tau_bad = sub_bad = fix_bad = comm_bad = 0
    comm_worst = 0.0
    for _ in range(pairs):
        a, b = sampling.mixed_lift(rng), sampling.mixed_lift(rng)
        la, lb = invariants.length(a, grid), invariants.length(b, grid)
        tau_bad += abs(quasimorphism.translation_number(a, n).value) > la + 2e-4
        sub_bad += invariants.length(circle.compose(a, b), grid) > la + lb + 1e-6
        if invariants.fixed_point(a, grid=grid) is not None:
            fix_bad += la >= 1.0
        lc = invariants.length(circle.commutator(a, b), grid)
        comm_worst = max(comm_worst, lc)
        comm_bad += lc >= 2.0
    return [
        Check("|tau| <= length", tau_bad == 0, pairs, detail=f"violations={tau_bad}"),
        Check("length subadditive", sub_bad == 0, pairs, detail=f"violations={sub_bad}"),
        Check("fixed point => length < 1", fix_bad == 0, pairs, detail=f"violations={fix_bad}"),
        Check("length of commutator < 2", comm_bad == 0, pairs, comm_worst),
    ]


def check_inverse_mirror(rng, cases: int, grid: int) -> Check:
    bad = 0
    for _ in range(cases):
        e = sampling.cover_element(rng)
        d = invariants.direction_type(cover.realize(e), grid=grid)
        di = invariants.direction_type(cover.realize(cover.inv(e)), grid=grid)
        bad += di is not d.mirror
    return Check("direction of inverse is mirrored", bad == 0, cases, detail=f"violations={bad}")


def invariants_suite(rng, s: Settings) -> list[Check]:
    return [
        *check_conjugation_invariance(rng, s.n(100), s.tau_iters, s.grid),
        *check_length_bounds(rng, s.n(100), s.tau_iters, s.grid),
        check_inverse_mirror(rng, s.n(200), s.grid),
    ]


# -- PSL2 -------------------------------------------------------------------------

def check_iwasawa(rng, cases: int) -> Check:
    worst, bad = 0.0, 0
    for _ in range(cases):
        m = sampling.gaussian_matrix(rng)
        t = psl2.iwasawa(m)
        err = t.compose().distance(m)
        worst = max(worst, err)
        bad += err > 1e-10 or not (0 <= t.theta < math.pi) or not t.lam > 0
    return Check("Iwasawa roundtrip", bad == 0, cases, worst)


def check_class_of(rng, cases: int) -> list[Check]:
    worst, bad, trich = 0.0, 0, 0
    for _ in range(cases):
        m = sampling.gaussian_matrix(rng)
        r = psl2.class_of(m)
        err = r.residual(m)
        worst = max(worst, err)
        bad += err > 1e-9
        t = m.trace_bar
        expect = (
            psl2.ClassKind.HYPERBOLIC if t > 2 + psl2.EPS_PARAB
            else psl2.ClassKind.ELLIPTIC if t < 2 - psl2.EPS_PARAB
            else None
        )
        trich += expect is not None and r.kind is not expect
    return [
        Check("conjugator reproduces the matrix", bad == 0, cases, worst),
        Check("classification follows the trace", trich == 0, cases, detail=f"violations={trich}"),
    ]


def check_action_homomorphism(rng, cases: int, grid: int) -> Check:
    worst = 0.0
    for _ in range(cases):
        m, n = sampling.gaussian_matrix(rng), sampling.gaussian_matrix(rng)
        lhs = psl2.lift_of(m @ n)
        rhs = circle.compose(psl2.lift_of(m), psl2.lift_of(n))
        xs = np.linspace(0, 1, 65)
        d = rhs(xs) - lhs(xs)
        c = round(float(d[0]))
        worst = max(worst, float(np.max(np.abs(d - c))))
    return Check("lift of MN is lift(M) lift(N) up to T_c", worst <= 1e-6, cases, worst)


def check_faithful(rng, cases: int, grid: int) -> Check:
    bad = 0
    for _ in range(cases):
        m = sampling.gaussian_matrix(rng)
        bad += circle.dist_sup(psl2.circle_map(m).lift, circle.identity(), grid) <= 0
    return Check("non-identity matrices move the circle", bad == 0, cases)


def check_trivial_center() -> Check:
    # u_x and a_lambda are not central: each fails to commute with a witness
    ok = True
    for x in (0.5, 1.0, -3.0):
        ok &= not (psl2.dilation(2.0) @ psl2.unipotent(x)).isclose(psl2.unipotent(x) @ psl2.dilation(2.0))
    for lam in (1.5, 3.0):
        ok &= not (psl2.unipotent(1.0) @ psl2.dilation(lam)).isclose(psl2.dilation(lam) @ psl2.unipotent(1.0))
    return Check("PSL2 center is trivial on probes", bool(ok), 5)


def check_convention(grid: int) -> Check:
    worst = 0.0
    for theta in (0.1, 1.0, 3.0):
        worst = max(worst, circle.dist_sup(psl2.lift_of(psl2.rotation(theta)), circle.translation(theta / math.pi), grid))
    plus = invariants.direction_type(psl2.lift_of(psl2.unipotent(1.0)), grid=grid)
    minus = invariants.direction_type(psl2.lift_of(psl2.unipotent(-1.0)), grid=grid)
    ok = worst <= 1e-9 and plus is DirectionType.SEMI_BACKWARD and minus is DirectionType.SEMI_FORWARD
    return Check("orientation convention", ok, 5, worst, detail=f"u1={plus} u-1={minus}")


def psl2_suite(rng, s: Settings) -> list[Check]:
    return [
        check_convention(s.grid),
        check_iwasawa(rng, s.n(2000)),
        *check_class_of(rng, s.n(2000)),
        check_action_homomorphism(rng, s.n(500), s.grid),
        check_faithful(rng, s.n(100), s.grid),
        check_trivial_center(),
    ]


# -- the cover ---------------------------------------------------------------------

def table_grid(kmax: int = 3) -> list[CoverElement]:
    thetas = (math.pi / 6, math.pi / 2, 3 * math.pi / 4)
    lams = (1.5, 2.0, 5.0)
    out = []
    for k in range(-kmax, kmax + 1):
        out += [CoverElement(psl2.rotation(t), k) for t in thetas]
        out += [CoverElement(psl2.dilation(lam), k) for lam in lams]
        out += [CoverElement(psl2.unipotent(1.0), k), CoverElement(psl2.unipotent(-1.0), k)]
        out.append(cover.central(k))
    return out


def _same(x: CoverElement, y: CoverElement, tol: float = 1e-12) -> bool:
    return x.k == y.k and x.m.isclose(y.m, tol)


def check_group_axioms(rng, cases: int) -> list[Check]:
    assoc = ident = inverse = 0
    for _ in range(cases):
        a, b, c = (sampling.cover_element(rng) for _ in range(3))
        l, r = cover.mul(cover.mul(a, b), c), cover.mul(a, cover.mul(b, c))
        assoc += l.k != r.k or not l.m.isclose(r.m, 1e-8)
        ident += not (_same(cover.mul(cover.ONE, a), a) and _same(cover.mul(a, cover.ONE), a))
        for x in (cover.mul(a, cover.inv(a)), cover.mul(cover.inv(a), a)):
            inverse += not _same(x, cover.ONE)
    return [
        Check("multiplication associative", assoc == 0, cases, detail=f"violations={assoc}"),
        Check("(Id, 0) is neutral", ident == 0, cases, detail=f"violations={ident}"),
        Check("inverse is two-sided", inverse == 0, cases, detail=f"violations={inverse}"),
    ]


def _commutes(a: CoverElement, b: CoverElement) -> bool:
    x, y = cover.mul(a, b), cover.mul(b, a)
    return x.k == y.k and x.m.isclose(y.m, 1e-9)


def check_center(rng, probes: int) -> Check:
    probe = [sampling.cover_element(rng) for _ in range(probes)]
    non_central = [p for p in probe if not p.m.is_identity()]
    central_ok = all(_commutes(cover.central(k), p) for k in range(-3, 4) for p in probe)
    spurious = sum(all(_commutes(x, p) for p in probe) for x in non_central)
    return Check("center is exactly the central shifts", central_ok and spurious == 0, len(probe),
                 detail=f"non-central commuting with all probes={spurious}")


def check_torsor(elements, js=range(-3, 4)) -> list[Check]:
    shift_bad = orbit_bad = 0
    for e in elements:
        base = cover.classify(e)
        labels = []
        for j in js:
            lab = cover.classify(cover.mul(cover.central(j), e))
            shift_bad += not lab.equals(base.shifted(j))
            labels.append(lab)
        orbit_bad += sum(labels[i].equals(labels[j]) for i in range(len(labels)) for j in range(i))
    return [
        Check("T_j shifts the label by j", shift_bad == 0, len(elements), detail=f"violations={shift_bad}"),
        Check("central action is free on labels", orbit_bad == 0, len(elements), detail=f"collisions={orbit_bad}"),
    ]


def check_cp_lifting(rng, pairs: int, grid: int) -> Check:
    worst = 0.0
    fams = sampling.COMMUTING_FAMILIES
    for i in range(pairs):
        e1, e2 = sampling.commuting_pair(rng, fams[i % len(fams)])
        worst = max(worst, cover.cp_commutator_check(e1, e2, grid=grid))
    return Check("lifted commutators of commuting pairs vanish", worst <= 1e-6, pairs, worst)


def check_table(elements, tau_iters: int, grid: int) -> Check:
    bad = []
    for e in elements:
        rep = cover.invariant_report(e, tau_iters=tau_iters, grid=grid)
        if not rep.consistent:
            bad.append(f"{rep.label}: {'; '.join(rep.mismatches())}")
    return Check("numeric invariants match the table", not bad, len(elements), detail="; ".join(bad[:3]))


def check_conjugate_classify(rng, cases: int) -> Check:
    bad = 0
    for _ in range(cases):
        e, g = sampling.cover_element(rng), sampling.cover_element(rng, kmax=2)
        bad += not cover.are_conjugate(e, cover.conjugate(e, g))
    return Check("conjugation preserves the label", bad == 0, cases, detail=f"violations={bad}")


def cover_suite(rng, s: Settings) -> list[Check]:
    grid = table_grid()
    return [
        *check_group_axioms(rng, s.n(300)),
        check_center(rng, s.n(100)),
        *check_torsor(grid),
        check_cp_lifting(rng, s.n(200), s.grid),
        check_conjugate_classify(rng, s.n(300)),
        check_table(grid, s.tau_iters, s.grid),
    ]


# -- finite groups --------------------------------------------------------------------

def standard_extensions() -> list[tuple[str, finite_cp.CentralExtension]]:
    z4, v4 = finite_cp.cyclic(4), finite_cp.klein()
    return [
        ("Z/4 over {0,2}", finite_cp.CentralExtension(z4, [0, 2])),
        ("Z/2xZ/2 over <a>", finite_cp.CentralExtension(v4, [0, 1])),
        ("Z/2xZ/2 over <b>", finite_cp.CentralExtension(v4, [0, 2])),
        ("Z/2xZ/2 over <ab>", finite_cp.CentralExtension(v4, [0, 3])),
        ("Q8 over center", finite_cp.center_extension(finite_cp.quaternion())),
        ("D4 over center", finite_cp.center_extension(finite_cp.dihedral4())),
        ("Heis(Z/3) over center", finite_cp.center_extension(finite_cp.heisenberg(3))),
        ("S3 over trivial", finite_cp.CentralExtension(finite_cp.symmetric3(), [0])),
    ]


def check_approp(e: finite_cp.CentralExtension) -> bool:
    """``k ~_g j`` iff ``kg`` and ``jg`` are conjugate, for all g, k, j."""
    G = e.g
    cidx = finite_cp.class_index(G)
    for g in range(G.order):
        part = finite_cp.twisted_classes(e, g)
        block = {k: i for i, b in enumerate(part.blocks) for k in b}
        for k in e.n_subgroup:
            for j in e.n_subgroup:
                if (block[k] == block[j]) != (cidx[G.mul(k, g)] == cidx[G.mul(j, g)]):
                    return False
    return True


def check_actfib(e: finite_cp.CentralExtension) -> bool:
    G = e.g
    for g in range(G.order):
        s = finite_cp.s_subgroup(e, g)
        if any(finite_cp.s_subgroup(e, G.mul(k, g)) != s for k in e.n_subgroup):
            return False
        if any(finite_cp.s_subgroup(e, G.conj(p, g)) != s for p in range(G.order)):
            return False
    return True


def finite_suite(rng=None, s: Settings | None = None) -> list[Check]:
    checks = []
    for name, e in standard_extensions():
        r = finite_cp.verify_ntors(e)
        count_ok = (not r.is_cp) or r.class_count == len(e.n_subgroup) * r.quotient_class_count
        fibres = finite_cp.fiber_decomposition(e)
        fibre_ok = sum(len(f.classes) for f in fibres) == r.class_count and all(
            len(f.classes) == f.n_over_s for f in fibres
        )
        witness = ""
        if r.witness:
            a, b, c = r.witness
            witness = f" witness [{e.g.names[a]},{e.g.names[b]}]={e.g.names[c]}"
        checks.append(
            Check(
                f"{name}: characterisations agree",
                r.agreed and count_ok and fibre_ok and check_approp(e) and check_actfib(e),
                1,
                detail=f"cp={r.is_cp} |Cl(G)|={r.class_count} |Cl(Q)|={r.quotient_class_count}{witness}",
            )
        )
    q8 = finite_cp.center_extension(finite_cp.quaternion())
    w = finite_cp.is_cp(q8).witness
    g = q8.g
    checks.append(
        Check("Q8 not CP with witness [i,j] = -1",
              w is not None and g.commutator(g.index("i"), g.index("j")) == g.index("-1") and g.names[w[2]] == "-1", 1)
    )
    checks.append(_zpbsc_examples())
    return checks


def _zpbsc_examples() -> Check:
    z4, z2 = finite_cp.cyclic(4), finite_cp.cyclic(2)
    q8 = finite_cp.center_extension(finite_cp.quaternion())
    phi = finite_cp.Homomorphism(z4, z2, tuple(x % 2 for x in range(4)))
    reports = [
        finite_cp.check_zpbsc(finite_cp.identity_hom(z4), finite_cp.identity_hom(z4)),
        finite_cp.check_zpbsc(phi, finite_cp.trivial_hom(z2)),
        finite_cp.check_zpbsc(finite_cp.projection(q8), finite_cp.trivial_hom(q8.quotient)),
    ]
    expected = [(True, True, True), (True, True, True), (False, True, False)]
    ok = all(r.holds for r in reports) and [(r.phi_cp, r.psi_cp, r.composite_cp) for r in reports] == expected
    return Check("composites of CP maps", ok, len(reports))


SUITES = {
    "quasi": quasi_suite,
    "invariants": invariants_suite,
    "psl2": psl2_suite,
    "cover": cover_suite,
    "finite": finite_suite,
}


def run(name: str, seed: int, settings: Settings | None = None) -> list[Check]:
    settings = settings or Settings()
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise ValueError(f"unknown suite {name!r}")
    out = []
    for n in names:
        out += SUITES[n](sampling.make_rng(seed), settings)
    return out

