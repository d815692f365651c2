"""Central extensions of finite groups, checked by exhaustion.

Groups are multiplication tables over the indices ``0..n-1``.  Everything is
computed by brute force: the point is to have an oracle that is obviously
correct, not a fast one.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import EquivalenceViolation, NotCentral, PreconditionViolated

MAX_ORDER = 128


class FiniteGroup:
    def __init__(self, table, names: Sequence[str] | None = None, name: str = "G"):
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise ValueError("multiplication table must be a non-empty square array")
        n = t.shape[0]
        if n > MAX_ORDER:
            raise ValueError(f"order {n} exceeds the supported maximum {MAX_ORDER}")
        if t.min() < 0 or t.max() >= n:
            raise ValueError("table entries must be element indices")
        full = np.arange(n)
        if not all(np.array_equal(np.sort(row), full) for row in t) or not all(
            np.array_equal(np.sort(col), full) for col in t.T
        ):
            raise ValueError("table is not a Latin square")
        ids = [e for e in range(n) if np.array_equal(t[e], full)]
        if not ids or not np.array_equal(t[:, ids[0]], full):
            raise ValueError("table has no two-sided identity")
        # (ab)c == a(bc) for every triple
        if not np.array_equal(t[t], t[full[:, None, None], t[None, :, :]]):
            raise ValueError("table is not associative")
        t.setflags(write=False)
        self.table = t
        self.order = n
        self.identity = ids[0]
        inv = np.empty(n, dtype=np.int64)
        for a in range(n):
            inv[a] = int(np.flatnonzero(t[a] == self.identity)[0])
        inv.setflags(write=False)
        self.inverses = inv
        self.names = list(names) if names is not None else [str(i) for i in range(n)]
        if len(self.names) != n:
            raise ValueError("one name per element is required")
        self.name = name

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"<FiniteGroup {self.name} of order {self.order}>"

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def commutator(self, a: int, b: int) -> int:
        t, i = self.table, self.inverses
        return int(t[t[t[a, b], i[a]], i[b]])

    def conj(self, a: int, g: int) -> int:
        """``a g a^-1``."""
        return int(self.table[self.table[a, g], self.inverses[a]])

    def index(self, name: str) -> int:
        return self.names.index(name)

    def commutator_table(self) -> np.ndarray:
        t, i = self.table, self.inverses
        return t[t[t, i[:, None]], i[None, :]]

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))


def from_elements(elements: Sequence, op: Callable, names: Sequence[str] | None = None, name: str = "G") -> FiniteGroup:
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    table = [[index[op(elements[i], elements[j])] for j in range(n)] for i in range(n)]
    return FiniteGroup(table, names or [str(e) for e in elements], name)


# -- library ----------------------------------------------------------------------

def cyclic(n: int) -> FiniteGroup:
    return from_elements(list(range(n)), lambda a, b: (a + b) % n, name=f"Z/{n}")


def klein() -> FiniteGroup:
    els = [(0, 0), (1, 0), (0, 1), (1, 1)]
    return from_elements(
        els, lambda a, b: ((a[0] + b[0]) % 2, (a[1] + b[1]) % 2), ["e", "a", "b", "ab"], name="Z/2xZ/2"
    )


def _perm_name(p: tuple[int, ...]) -> str:
    seen, cycles = set(), []
    for s in range(len(p)):
        if s in seen or p[s] == s:
            continue
        cyc, x = [], s
        while x not in seen:
            seen.add(x)
            cyc.append(x + 1)
            x = p[x]
        cycles.append("(" + "".join(map(str, cyc)) + ")")
    return "".join(cycles) or "e"


def _perm_mul(p, q):
    """``p q`` acting on the left: ``(pq)(x) = p(q(x))``."""
    return tuple(p[q[x]] for x in range(len(q)))


def symmetric3() -> FiniteGroup:
    els = sorted(itertools.permutations(range(3)))
    return from_elements(els, _perm_mul, [_perm_name(p) for p in els], name="S3")


def dihedral4() -> FiniteGroup:
    """Symmetries of a square, as permutations of its vertices."""
    r = (1, 2, 3, 0)
    s = (0, 3, 2, 1)
    els, frontier = {(0, 1, 2, 3)}, [(0, 1, 2, 3)]
    while frontier:
        p = frontier.pop()
        for g in (r, s):
            q = _perm_mul(g, p)
            if q not in els:
                els.add(q)
                frontier.append(q)
    els = sorted(els)
    rot = {(0, 1, 2, 3): "e", r: "r", _perm_mul(r, r): "r2", _perm_mul(r, _perm_mul(r, r)): "r3"}
    names = []
    for p in els:
        if p in rot:
            names.append(rot[p])
        else:
            k = next(k for k in range(4) if _perm_mul(_power(r, k), s) == p)
            names.append("s" if k == 0 else f"r{k}s".replace("r1s", "rs"))
    return from_elements(els, _perm_mul, names, name="D4")


def _power(p, k):
    out = tuple(range(len(p)))
    for _ in range(k):
        out = _perm_mul(p, out)
    return out


_QUAT = {
    ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
    ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
    ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
    ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
}


def quaternion() -> FiniteGroup:
    els = [(s, u) for u in "1ijk" for s in (1, -1)]

    def op(x, y):
        s, u = _QUAT[(x[1], y[1])]
        return (x[0] * y[0] * s, u)

    names = [("" if s > 0 else "-") + u for s, u in els]
    return from_elements(els, op, names, name="Q8")


def heisenberg(p: int = 3) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over Z/p, as triples ``(a, b, c)``."""
    els = [(a, b, c) for a in range(p) for b in range(p) for c in range(p)]

    def op(x, y):
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p, (x[2] + y[2] + x[0] * y[1]) % p)

    return from_elements(els, op, name=f"Heis(Z/{p})")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    n, m = g.order, h.order
    table = np.empty((n * m, n * m), dtype=np.int64)
    for a, b in itertools.product(range(n * m), repeat=2):
        table[a, b] = g.table[a // m, b // m] * m + h.table[a % m, b % m]
    names = [f"({x},{y})" for x in g.names for y in h.names]
    return FiniteGroup(table, names, name=f"{g.name}x{h.name}")


def library() -> dict[str, FiniteGroup]:
    return {
        "Z4": cyclic(4),
        "Z2": cyclic(2),
        "V4": klein(),
        "S3": symmetric3(),
        "D4": dihedral4(),
        "Q8": quaternion(),
        "Heis3": heisenberg(3),
    }


def read_table(path) -> FiniteGroup:
    """Table file: the order on the first line, then one row of indices per line."""
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty table file")
    n = int(lines[0][0])
    rows = [[int(x) for x in ln] for ln in lines[1:]]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected {n} rows of {n} entries")
    return FiniteGroup(rows, name=Path(path).stem)


def write_table(path, g: FiniteGroup) -> None:
    rows = [" ".join(map(str, r)) for r in g.table.tolist()]
    Path(path).write_text("\n".join([str(g.order), *rows]) + "\n")


# -- basic structure ----------------------------------------------------------------

def commutant(g: FiniteGroup, s: Sequence[int]) -> list[int]:
    t = g.table
    s = list(s)
    return [a for a in range(g.order) if all(t[a, x] == t[x, a] for x in s)]


def center(g: FiniteGroup) -> list[int]:
    return commutant(g, range(g.order))


def conj_classes(g: FiniteGroup) -> list[list[int]]:
    """Classes sorted internally, ordered by their smallest element."""
    seen = np.zeros(g.order, dtype=bool)
    out = []
    for x in range(g.order):
        if seen[x]:
            continue
        cls = sorted({g.conj(a, x) for a in range(g.order)})
        seen[cls] = True
        out.append(cls)
    return out


def class_index(g: FiniteGroup) -> np.ndarray:
    idx = np.empty(g.order, dtype=np.int64)
    for i, cls in enumerate(conj_classes(g)):
        idx[cls] = i
    return idx


def is_subgroup(g: FiniteGroup, s: Sequence[int]) -> bool:
    s = set(s)
    return g.identity in s and all(g.mul(a, g.inv(b)) in s for a in s for b in s)


def is_normal(g: FiniteGroup, s: Sequence[int]) -> bool:
    s = set(s)
    return is_subgroup(g, s) and all(g.conj(a, x) in s for a in range(g.order) for x in s)


@dataclass
class CentralExtension:
    """``1 -> N -> G -> G/N -> 1`` for a normal subgroup ``N``.

    Quotient elements are the cosets ``gN`` numbered by their smallest member.
    """

    g: FiniteGroup
    n_subgroup: list[int]
    quotient: FiniteGroup = field(init=False)
    proj: np.ndarray = field(init=False)

    def __post_init__(self):
        self.n_subgroup = sorted(set(int(x) for x in self.n_subgroup))
        if not is_normal(self.g, self.n_subgroup):
            raise PreconditionViolated("N must be a normal subgroup")
        g = self.g
        proj = np.full(g.order, -1, dtype=np.int64)
        reps = []
        for x in range(g.order):
            if proj[x] >= 0:
                continue
            coset = [g.mul(x, k) for k in self.n_subgroup]
            proj[coset] = len(reps)
            reps.append(x)
        q = np.empty((len(reps), len(reps)), dtype=np.int64)
        for i, a in enumerate(reps):
            for j, b in enumerate(reps):
                q[i, j] = proj[g.mul(a, b)]
        proj.setflags(write=False)
        self.proj = proj
        self.lifts = reps
        self.quotient = FiniteGroup(q, [g.names[r] + "N" for r in reps], name=f"{g.name}/N")

    @property
    def is_central(self) -> bool:
        z = set(center(self.g))
        return all(k in z for k in self.n_subgroup)

    def check_exact(self) -> bool:
        """Projection is a surjective homomorphism with kernel ``N``."""
        g, q, p = self.g, self.quotient, self.proj
        hom = all(p[g.mul(a, b)] == q.mul(p[a], p[b]) for a in range(g.order) for b in range(g.order))
        kernel = sorted(int(x) for x in np.flatnonzero(p == q.identity))
        return hom and kernel == self.n_subgroup and len(set(p.tolist())) == q.order


def center_extension(g: FiniteGroup) -> CentralExtension:
    return CentralExtension(g, center(g))


# -- twisted conjugation -----------------------------------------------------------

@dataclass(frozen=True)
class TwistedPartition:
    g_elem: int
    blocks: tuple[tuple[int, ...], ...]

    @property
    def trivial(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)


def twisted_classes(e: CentralExtension, g: int) -> TwistedPartition:
    """Classes of ``k ~ j  iff  k = a j (g a g^-1)^-1`` for some ``a`` in G, over all of N."""
    G = e.g
    members = set(e.n_subgroup)
    parent = {k: k for k in e.n_subgroup}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(G.order):
        tail = G.inv(G.conj(g, a))
        for j in e.n_subgroup:
            k = G.mul(G.mul(a, j), tail)
            if k in members:
                ra, rb = find(k), find(j)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    blocks = {}
    for k in e.n_subgroup:
        blocks.setdefault(find(k), []).append(k)
    return TwistedPartition(g, tuple(tuple(sorted(b)) for b in sorted(blocks.values())))


def s_subgroup(e: CentralExtension, g: int) -> list[int]:
    """``{[a, g] : a in G}`` intersected with N; a subgroup when N is central."""
    if not e.is_central:
        raise NotCentral("N is not contained in the center")
    members = set(e.n_subgroup)
    out = sorted({e.g.commutator(a, g) for a in range(e.g.order)} & members)
    if not is_subgroup(e.g, out):
        raise EquivalenceViolation(f"S_g for g={g} is not a subgroup")
    return out


@dataclass(frozen=True)
class CPResult:
    is_cp: bool
    witness: tuple[int, int, int] | None  # (a, b, [a, b]) with [a, b] in N \ {e}
    central: bool


def is_cp(e: CentralExtension) -> CPResult:
    """No non-trivial commutator of G lies in N."""
    G = e.g
    members = set(e.n_subgroup)
    ct = G.commutator_table()
    for a in range(G.order):
        for b in range(G.order):
            c = int(ct[a, b])
            if c != G.identity and c in members:
                return CPResult(False, (a, b, c), e.is_central)
    return CPResult(True, None, e.is_central)


# -- the four characterisations ---------------------------------------------------

@dataclass(frozen=True)
class NtorsReport:
    commutators: bool  # no non-trivial commutator in N
    twisted: bool  # every twisted partition is discrete
    torsor: bool  # N acts freely and transitively on each fibre of Cl(G) -> Cl(Q)
    commuting_lifts: bool  # lifts of commuting elements commute
    witness: tuple[int, int, int] | None
    class_count: int
    quotient_class_count: int

    @property
    def agreed(self) -> bool:
        return len({self.commutators, self.twisted, self.torsor, self.commuting_lifts}) == 1

    @property
    def is_cp(self) -> bool:
        return self.commutators


def _torsor(e: CentralExtension) -> bool:
    G, Q = e.g, e.quotient
    if not e.is_central:
        # left multiplication by N is not even well defined on classes
        return False
    cidx = class_index(G)
    qidx = class_index(Q)
    n_g = int(cidx.max()) + 1
    fibres: dict[int, set[int]] = {}
    for x in range(G.order):
        fibres.setdefault(int(qidx[e.proj[x]]), set()).add(int(cidx[x]))
    reps = [cls[0] for cls in conj_classes(G)]
    for c in range(n_g):
        g = reps[c]
        orbit = [int(cidx[G.mul(k, g)]) for k in e.n_subgroup]
        if len(set(orbit)) != len(orbit):
            return False  # not free
        if set(orbit) != fibres[int(qidx[e.proj[g]])]:
            return False  # not transitive on the fibre
    return True


def _commuting_lifts(e: CentralExtension) -> bool:
    G, Q, p = e.g, e.quotient, e.proj
    for a in range(G.order):
        for b in range(G.order):
            pa, pb = int(p[a]), int(p[b])
            if Q.mul(pa, pb) == Q.mul(pb, pa) and G.mul(a, b) != G.mul(b, a):
                return False
    return True


def verify_ntors(e: CentralExtension) -> NtorsReport:
    """Evaluate the four characterisations independently; they must agree."""
    cp = is_cp(e)
    twisted = all(twisted_classes(e, g).trivial for g in range(e.g.order))
    report = NtorsReport(
        commutators=cp.is_cp,
        twisted=twisted,
        torsor=_torsor(e),
        commuting_lifts=_commuting_lifts(e),
        witness=cp.witness,
        class_count=len(conj_classes(e.g)),
        quotient_class_count=len(conj_classes(e.quotient)),
    )
    if not report.agreed:
        raise EquivalenceViolation(f"characterisations disagree: {report}")
    return report


@dataclass(frozen=True)
class Fibre:
    base_class: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    s_subgroup: tuple[int, ...] | None
    n_over_s: int | None


def fiber_decomposition(e: CentralExtension) -> list[Fibre]:
    """Conjugacy classes of G grouped by their image class in Q."""
    G, Q = e.g, e.quotient
    qclasses = conj_classes(Q)
    qidx = class_index(Q)
    grouped: list[list[tuple[int, ...]]] = [[] for _ in qclasses]
    for cls in conj_classes(G):
        grouped[int(qidx[e.proj[cls[0]]])].append(tuple(cls))
    central = e.is_central
    out = []
    for qc, classes in zip(qclasses, grouped):
        s = n_over_s = None
        if central:
            s = tuple(s_subgroup(e, e.lifts[qc[0]]))
            n_over_s = len(e.n_subgroup) // len(s)
        out.append(Fibre(tuple(qc), tuple(classes), s, n_over_s))
    return out


# -- homomorphisms -------------------------------------------------------------------

@dataclass(frozen=True)
class Homomorphism:
    source: FiniteGroup
    target: FiniteGroup
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != self.source.order:
            raise ValueError("one image per source element is required")
        s, t = self.source, self.target
        for a in range(s.order):
            for b in range(s.order):
                if self.images[s.mul(a, b)] != t.mul(self.images[a], self.images[b]):
                    raise ValueError("map is not a homomorphism")

    def __call__(self, a: int) -> int:
        return self.images[a]

    def then(self, other: Homomorphism) -> Homomorphism:
        return Homomorphism(self.source, other.target, tuple(other.images[x] for x in self.images))

    @property
    def surjective(self) -> bool:
        return set(self.images) == set(range(self.target.order))

    def is_cp(self) -> bool:
        s, t = self.source, self.target
        f = self.images
        for a in range(s.order):
            for b in range(s.order):
                if t.mul(f[a], f[b]) == t.mul(f[b], f[a]) and s.mul(a, b) != s.mul(b, a):
                    return False
        return True


def identity_hom(g: FiniteGroup) -> Homomorphism:
    return Homomorphism(g, g, tuple(range(g.order)))


def trivial_hom(g: FiniteGroup) -> Homomorphism:
    triv = cyclic(1)
    return Homomorphism(g, triv, (0,) * g.order)


def projection(e: CentralExtension) -> Homomorphism:
    return Homomorphism(e.g, e.quotient, tuple(int(x) for x in e.proj))


@dataclass(frozen=True)
class ZpbscReport:
    phi_cp: bool
    psi_cp: bool
    composite_cp: bool
    part_i: bool  # both CP => composite CP
    part_ii: bool  # composite CP => phi CP, and psi CP when phi is onto

    @property
    def holds(self) -> bool:
        return self.part_i and self.part_ii


def check_zpbsc(phi: Homomorphism, psi: Homomorphism) -> ZpbscReport:
    if phi.target is not psi.source and phi.target.order != psi.source.order:
        raise PreconditionViolated("maps are not composable")
    comp = phi.then(psi)
    a, b, c = phi.is_cp(), psi.is_cp(), comp.is_cp()
    part_i = (not (a and b)) or c
    part_ii = (not c) or (a and (b or not phi.surjective))
    return ZpbscReport(a, b, c, part_i, part_ii)
