import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sl2cover import finite_cp as F
from sl2cover.errors import EquivalenceViolation, NotCentral, PreconditionViolated

LIB = F.library()
Q8, S3, D4, Z4, V4 = LIB["Q8"], LIB["S3"], LIB["D4"], LIB["Z4"], LIB["V4"]
H3 = LIB["Heis3"]


def names(g, xs):
    return {g.names[x] for x in xs}


def test_group_axioms_and_validation():
    for g in LIB.values():
        assert g.identity == 0
        for a in range(g.order):
            assert g.mul(a, g.inv(a)) == g.identity
    with pytest.raises(ValueError):
        F.FiniteGroup([[0, 1], [0, 1]])  # not a Latin square
    # a Latin square that is not associative
    bad = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(ValueError):
        F.FiniteGroup(bad)


def test_center_commutant_classes():
    assert names(Q8, F.center(Q8)) == {"1", "-1"}
    assert [len(c) for c in F.conj_classes(Z4)] == [1, 1, 1, 1]
    assert names(S3, F.commutant(S3, [S3.index("(12)")])) == {"e", "(12)"}
    assert len(F.conj_classes(S3)) == 3 and len(F.conj_classes(Q8)) == 5 and len(F.conj_classes(D4)) == 5
    assert len(F.center(H3)) == 3
    # classes are ordered by smallest element and partition G
    for g in LIB.values():
        cls = F.conj_classes(g)
        assert [c[0] for c in cls] == sorted(c[0] for c in cls)
        assert sorted(itertools.chain(*cls)) == list(range(g.order))


def test_twisted_classes_examples():
    for g in (Z4, V4):
        e = F.CentralExtension(g, range(g.order))
        assert all(F.twisted_classes(e, x).trivial for x in range(g.order))
    q = F.center_extension(Q8)
    assert F.twisted_classes(q, Q8.index("i")).blocks == ((0, 1),)
    assert F.twisted_classes(q, Q8.index("-1")).trivial
    z = F.CentralExtension(Z4, [0, 2])
    assert all(F.twisted_classes(z, x).trivial for x in range(4))


def test_twisted_matches_conjugacy():
    # k ~_g j iff kg and jg are conjugate in G, for central N
    for g in (Q8, D4, H3):
        e = F.center_extension(g)
        cidx = F.class_index(g)
        for x in range(g.order):
            part = F.twisted_classes(e, x)
            block = {k: b for b in part.blocks for k in b}
            for k, j in itertools.product(e.n_subgroup, repeat=2):
                assert (block[k] == block[j]) == (cidx[g.mul(k, x)] == cidx[g.mul(j, x)])


def test_s_subgroup_examples():
    assert F.s_subgroup(F.CentralExtension(Z4, [0, 2]), 1) == [0]
    assert names(Q8, F.s_subgroup(F.center_extension(Q8), Q8.index("i"))) == {"1", "-1"}
    h = F.center_extension(H3)
    gen = next(x for x in range(H3.order) if x not in h.n_subgroup)
    assert F.s_subgroup(h, gen) == h.n_subgroup
    with pytest.raises(NotCentral):
        F.s_subgroup(F.CentralExtension(S3, [0, 3, 4]), 2)


def test_s_subgroup_invariance():
    for g in (Q8, D4, H3):
        e = F.center_extension(g)
        for x in range(g.order):
            s = F.s_subgroup(e, x)
            for k in e.n_subgroup:
                assert F.s_subgroup(e, g.mul(k, x)) == s
            for p in range(g.order):
                assert F.s_subgroup(e, g.conj(p, x)) == s


def test_is_cp_examples():
    assert F.is_cp(F.CentralExtension(Z4, [0, 2])).is_cp
    r = F.is_cp(F.center_extension(Q8))
    assert not r.is_cp and Q8.names[r.witness[2]] == "-1"
    a, b, c = r.witness
    assert Q8.commutator(a, b) == c
    assert Q8.commutator(Q8.index("i"), Q8.index("j")) == Q8.index("-1")
    r = F.is_cp(F.center_extension(H3))
    assert not r.is_cp and r.witness[2] in F.center(H3)


def test_verify_ntors_examples():
    r = F.verify_ntors(F.CentralExtension(Z4, [0, 2]))
    assert r.commutators and r.twisted and r.torsor and r.commuting_lifts
    assert r.class_count == 4 == 2 * r.quotient_class_count
    r = F.verify_ntors(F.center_extension(Q8))
    assert not any((r.commutators, r.twisted, r.torsor, r.commuting_lifts))
    assert r.class_count == 5 and r.quotient_class_count == 4
    r = F.verify_ntors(F.center_extension(D4))
    assert not r.is_cp and D4.names[r.witness[2]] == "r2"


def test_ntors_agreement_all_extensions():
    for g in [*LIB.values(), F.direct_product(Q8, F.cyclic(2)), F.direct_product(S3, F.cyclic(3))]:
        for n in ([0], F.center(g)):
            e = F.CentralExtension(g, n)
            r = F.verify_ntors(e)
            assert r.agreed
            if r.is_cp:
                assert r.class_count == len(e.n_subgroup) * r.quotient_class_count


def test_disagreement_is_reported(monkeypatch):
    monkeypatch.setattr(F, "_torsor", lambda e: True)
    with pytest.raises(EquivalenceViolation):
        F.verify_ntors(F.center_extension(Q8))


def test_fiber_decomposition_examples():
    fib = F.fiber_decomposition(F.CentralExtension(Z4, [0, 2]))
    assert len(fib) == 2 and all(len(f.classes) == 2 for f in fib)
    q = F.center_extension(Q8)
    fib = F.fiber_decomposition(q)
    i_fibre = next(f for f in fib if any(Q8.index("i") in c for c in f.classes))
    assert len(i_fibre.classes) == 1 and i_fibre.n_over_s == 1
    for g in LIB.values():
        fib = F.fiber_decomposition(F.CentralExtension(g, [0]))
        assert all(len(f.classes) == 1 for f in fib)
        e = F.center_extension(g)
        fib = F.fiber_decomposition(e)
        assert sum(len(f.classes) for f in fib) == len(F.conj_classes(g))
        assert all(len(f.classes) == f.n_over_s for f in fib)


def test_central_extension_structure():
    e = F.center_extension(Q8)
    assert e.check_exact() and e.is_central and e.quotient.is_abelian
    with pytest.raises(PreconditionViolated):
        F.CentralExtension(S3, [0, 2])
    assert not F.CentralExtension(S3, [0, 3, 4]).is_central


def test_zpbsc_examples():
    rep = F.check_zpbsc(F.identity_hom(Q8), F.identity_hom(Q8))
    assert rep.phi_cp and rep.psi_cp and rep.composite_cp and rep.holds
    z = F.CentralExtension(Z4, [0, 2])
    rep = F.check_zpbsc(F.projection(z), F.trivial_hom(z.quotient))
    assert rep.composite_cp and rep.holds
    q = F.center_extension(Q8)
    rep = F.check_zpbsc(F.projection(q), F.trivial_hom(q.quotient))
    assert not rep.phi_cp and not rep.composite_cp and rep.holds


def test_zpbsc_over_library():
    for g in LIB.values():
        for n in ([0], F.center(g)):
            e = F.CentralExtension(g, n)
            p = F.projection(e)
            for psi in (F.identity_hom(e.quotient), F.trivial_hom(e.quotient)):
                assert F.check_zpbsc(p, psi).holds


def test_homomorphism_validation():
    with pytest.raises(ValueError):
        F.Homomorphism(Z4, F.cyclic(2), (0, 0, 1, 1))


def test_table_roundtrip(tmp_path):
    path = tmp_path / "q8.txt"
    F.write_table(path, Q8)
    g = F.read_table(path)
    assert np.array_equal(g.table, Q8.table)
    lines = path.read_text().splitlines()
    assert lines[0] == "8" and len(lines) == 9
    (tmp_path / "bad.txt").write_text("3\n0 1 2\n1 2 0\n")
    with pytest.raises(ValueError):
        F.read_table(tmp_path / "bad.txt")


@given(n=st.integers(1, 12))
def test_cyclic_always_cp(n):
    g = F.cyclic(n)
    for d in range(1, n + 1):
        if n % d == 0:
            sub = sorted({(i * d) % n for i in range(n)})
            r = F.verify_ntors(F.CentralExtension(g, sub))
            assert r.is_cp and r.class_count == len(sub) * r.quotient_class_count
