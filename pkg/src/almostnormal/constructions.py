"""Quotient factors, free finite-to-one extensions, and the checks that go with them.

Every construction here is on finite G-sets.  ``build_factor`` collapses each
point with its images under the conjugate of H attached to its block;
``build_extension`` takes the orbit of a point of ``Y x G/Gamma`` for a
normal finite-index Gamma meeting H trivially.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from .groups import (DirectProduct, FinitePerm, FiniteSubgroup, GroupFamily, IndexCapExceeded,
                     ProductSubgroup, SubgroupSpec, WholeGroup, is_normal_spec, normal_core,
                     quotient_by_subgroup)
from .gsets import (FiniteGSet, combined_acting, equivariant_isomorphism, from_coset_action,
                    restrict)
from .odometer import GroupChain
from .perm import PermGroup, Permutation, Subgroup, is_regular
from .stabilizers import FamilyConjugates, conjugation_table, subgroup_in_gset


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # keep the smaller index as root so class order is deterministic
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx

    def classes(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            groups.setdefault(self.find(x), []).append(x)
        return sorted(groups.values(), key=lambda c: c[0])


@dataclass
class EquivariantMap:
    source: FiniteGSet
    target: FiniteGSet
    mapping: list[int]

    def is_surjective(self) -> bool:
        return set(self.mapping) == set(range(self.target.size))

    def commutes(self) -> bool:
        f = self.mapping
        return all(f[p(x)] == self.target.gens[lab](f[x])
                   for lab, p in self.source.gens.items() for x in range(self.source.size))

    def fibers(self) -> list[list[int]]:
        out = [[] for _ in range(self.target.size)]
        for x, y in enumerate(self.mapping):
            out[y].append(x)
        return out

    def fiber_sizes(self) -> list[int]:
        return [len(f) for f in self.fibers()]

    def pushforward(self, measure: Sequence[Fraction]) -> list[Fraction]:
        out = [Fraction(0)] * self.target.size
        for x, y in enumerate(self.mapping):
            out[y] += measure[x]
        return out


def is_invariant(X: FiniteGSet, measure: Sequence[Fraction]) -> bool:
    return all(measure[p(x)] == measure[x] for p in X.generators for x in range(X.size))


# -- quotient factor ------------------------------------------------------------------

class RelationAuditFailure(RuntimeError):
    pass


@dataclass
class FiberAudit:
    point: int
    block: int
    size: int
    formula_sizes: list[int]
    product_matches: bool

    @property
    def formula_ok(self) -> bool:
        return all(s == self.size for s in self.formula_sizes)


@dataclass
class FactorResult:
    X: FiniteGSet
    Y: FiniteGSet
    pi: EquivariantMap
    phi: list[int]
    phi_tilde: list[int]
    conjugates: list[Subgroup]
    audits: list[FiberAudit]

    @property
    def h_order(self) -> int:
        return self.conjugates[0].order()

    @property
    def fiber_sizes(self) -> list[int]:
        return [a.size for a in self.audits]

    @property
    def fiber_formula_ok(self) -> bool:
        return all(a.formula_ok and a.size <= self.h_order for a in self.audits)

    @property
    def stabilizer_product_ok(self) -> bool:
        return all(a.product_matches for a in self.audits)

    @property
    def phi_factors(self) -> bool:
        return all(self.phi_tilde[y] == self.phi[x] for x, y in enumerate(self.pi.mapping))

    def to_json(self) -> dict:
        return {
            "source_size": self.X.size,
            "factor_size": self.Y.size,
            "h_order": self.h_order,
            "fiber_sizes": sorted(set(self.fiber_sizes)),
            "fiber_formula": self.fiber_formula_ok,
            "stabilizer_product": self.stabilizer_product_ok,
            "phi_factors": self.phi_factors,
            "pi": self.pi.mapping,
            "phi_tilde": self.phi_tilde,
            "factor": self.Y.to_json(),
        }


def build_factor(X: FiniteGSet, phi: Sequence[int], conjugates: Sequence[Subgroup]) -> FactorResult:
    """Collapse ``x`` with ``k x`` for every k in the conjugate of H attached to x's block.

    ``conjugates[i]`` must be ``g_i H g_i^-1`` inside ``X.acting`` and ``phi[x]``
    the block index of x; phi has to commute with the actions.
    """
    conjugates = list(conjugates)
    phi = list(phi)
    table = conjugation_table(X, conjugates)
    for lab, p in X.gens.items():
        for x in range(X.size):
            if phi[p(x)] != table[lab][phi[x]]:
                raise ValueError(f"block map is not equivariant at point {x}, generator {lab}")

    uf = UnionFind(X.size)
    for x in range(X.size):
        for k in conjugates[phi[x]].elements:
            uf.union(x, X.act(k, x))
    classes = uf.classes()

    # audits: each class is exactly one conjugate-orbit inside one block, and classes are permuted
    for cls in classes:
        x = cls[0]
        orbit = sorted({X.act(k, x) for k in conjugates[phi[x]].elements})
        if orbit != cls or any(phi[z] != phi[x] for z in cls):
            raise RelationAuditFailure(f"class of point {x} is not a single conjugate orbit")
    pi = [0] * X.size
    for j, cls in enumerate(classes):
        for x in cls:
            pi[x] = j
    perms = []
    for lab, p in X.gens.items():
        img = [pi[p(cls[0])] for cls in classes]
        for j, cls in enumerate(classes):
            if any(pi[p(x)] != img[j] for x in cls):
                raise RelationAuditFailure(f"relation is not invariant under {lab}")
        perms.append(Permutation(img))
    measure = None
    if X.measure is not None:
        measure = [sum((X.measure[x] for x in cls), Fraction(0)) for cls in classes]
    Y = FiniteGSet(X.labels, perms, measure, X.acting)
    phi_tilde = [phi[cls[0]] for cls in classes]
    pimap = EquivariantMap(X, Y, pi)

    h = conjugates[0].order()
    audits = []
    for y, cls in enumerate(classes):
        K = conjugates[phi_tilde[y]]
        Gy = Y.stabilizer(y)
        sizes = []
        product_ok = True
        for x in cls:
            Gx = X.stabilizer(x)
            sizes.append(h // len(K.intersection(Gx)))
            product_ok &= K.set_product(Gx) == Gy.members
        audits.append(FiberAudit(y, phi_tilde[y], len(cls), sizes, product_ok))
    return FactorResult(X, Y, pimap, phi, phi_tilde, conjugates, audits)


def block_gset(X: FiniteGSet, conjugates: Sequence[Subgroup]) -> FiniteGSet:
    """G/N_G(H) realized as G acting by conjugation on the conjugates of H."""
    table = conjugation_table(X, conjugates)
    return FiniteGSet(X.labels, [Permutation(table[lab]) for lab in X.labels],
                      [Fraction(1, len(conjugates))] * len(conjugates), X.acting)


@dataclass
class UniversalResult:
    psi: list[int] | None
    witness: tuple[int, int] | None
    condition_i: bool
    condition_ii: bool
    psi_equivariant: bool

    def to_json(self) -> dict:
        return {"psi": self.psi, "witness": list(self.witness) if self.witness else None,
                "condition_i": self.condition_i, "condition_ii": self.condition_ii,
                "psi_equivariant": self.psi_equivariant}


def verify_universal_property(f: FactorResult, Yp: FiniteGSet, pi_p: Sequence[int],
                              phi_p: Sequence[int]) -> UniversalResult:
    """Find psi: Y -> Y' with psi . pi = pi', or a pair identified in Y but separated by pi'."""
    cond_i = all(phi_p[pi_p[x]] == f.phi[x] for x in range(f.X.size))
    cond_ii = all(f.conjugates[phi_p[y]] <= Yp.stabilizer(y) for y in range(Yp.size))
    psi: list[int | None] = [None] * f.Y.size
    origin: list[int | None] = [None] * f.Y.size
    for x, y in enumerate(f.pi.mapping):
        if psi[y] is None:
            psi[y], origin[y] = pi_p[x], x
        elif psi[y] != pi_p[x]:
            return UniversalResult(None, (origin[y], x), cond_i, cond_ii, False)
    equivariant = all(psi[p(y)] == Yp.gens[lab](psi[y])
                      for lab, p in f.Y.gens.items() for y in range(f.Y.size))
    return UniversalResult(list(psi), None, cond_i, cond_ii, equivariant)


# -- free complements and extensions --------------------------------------------------

@dataclass
class Complement:
    name: str
    spec: SubgroupSpec
    normal: bool
    index: int | None
    meets_trivially: bool

    @property
    def valid(self) -> bool:
        return self.normal and self.index is not None and self.meets_trivially

    def to_json(self) -> dict:
        return {"name": self.name, "subgroup": self.spec.to_json(), "normal": self.normal,
                "index": self.index, "meets_H_trivially": self.meets_trivially}


@dataclass
class ComplementSearch:
    found: Complement | None
    searched: list[Complement]

    def to_json(self) -> dict:
        return {"found": self.found.to_json() if self.found else None,
                "searched": [c.to_json() for c in self.searched]}


def auto_candidates(family: GroupFamily, chain: GroupChain | None = None) -> list[tuple[str, SubgroupSpec]]:
    """Normal finite-index subgroups we know how to write down for this family."""
    out: list[tuple[str, SubgroupSpec]] = [("whole", WholeGroup(family))]
    if isinstance(family, DirectProduct):
        if isinstance(family.right, FinitePerm):
            out.append(("kernel of projection to right factor",
                        ProductSubgroup(family, WholeGroup(family.left), FiniteSubgroup(family.right, []))))
        if isinstance(family.left, FinitePerm):
            out.append(("kernel of projection to left factor",
                        ProductSubgroup(family, FiniteSubgroup(family.left, []), WholeGroup(family.right))))
    if chain is not None:
        for i, spec in enumerate(chain.specs[1:], start=1):
            core = normal_core(spec)
            if core is not None:
                out.append((f"core of chain level {i}", core))
    return out


def find_free_complement(family: GroupFamily, H: Sequence, candidates: Sequence[tuple[str, SubgroupSpec]],
                         index_cap: int = 100_000) -> ComplementSearch:
    """The smallest-index normal candidate that meets H only in the identity."""
    e = family.identity
    searched = []
    for name, spec in candidates:
        normal = is_normal_spec(spec)
        try:
            index = quotient_by_subgroup(family, spec, index_cap).index
        except IndexCapExceeded:
            index = None
        meets = not any(spec.contains(h) for h in H if h != e)
        searched.append(Complement(name, spec, normal, index, meets))
    valid = [c for c in searched if c.valid]
    best = min(valid, key=lambda c: c.index) if valid else None
    return ComplementSearch(best, searched)


@dataclass
class ExtensionResult:
    X: FiniteGSet
    pi: EquivariantMap
    points: list[tuple[int, int]]
    gamma_index: int
    yh: list[int]
    free_over_yh: bool
    max_fiber: int
    measure_invariant: bool
    product_measure_invariant: bool

    def free_points(self) -> list[int]:
        return [x for x in range(self.X.size) if self.X.stabilizer(x).is_trivial()]

    def preimage_of_yh(self) -> list[int]:
        yh = set(self.yh)
        return [x for x, y in enumerate(self.pi.mapping) if y in yh]

    def to_json(self) -> dict:
        return {"size": self.X.size, "gamma_index": self.gamma_index, "yh_size": len(self.yh),
                "free_over_yh": self.free_over_yh, "max_fiber": self.max_fiber,
                "measure_invariant": self.measure_invariant,
                "product_measure_invariant": self.product_measure_invariant,
                "pi": self.pi.mapping, "points": [list(p) for p in self.points],
                "extension": self.X.to_json()}


def build_extension(Y: FiniteGSet, y0: int, family: GroupFamily, H: Sequence, gamma: SubgroupSpec,
                    index_cap: int = 100_000) -> ExtensionResult:
    """The orbit of ``(y0, Gamma)`` in ``Y x G/Gamma`` with its projection to Y.

    ``H`` lists the family elements of H; y0 must have stabilizer conjugate to H.
    """
    e = family.identity
    if any(gamma.contains(h) for h in H if h != e):
        raise ValueError("Gamma meets H nontrivially")
    if not is_normal_spec(gamma):
        raise ValueError("Gamma is not normal")
    Himg = subgroup_in_gset(Y, family, H)
    conj = set()
    for t in Y.acting.elements:
        conj.add(Himg.conjugate(t))
    stabs = Y.stabilizers()
    yh = [y for y in range(Y.size) if stabs[y] in conj]
    if not yh:
        raise ValueError("Y_H is empty")
    if y0 not in yh:
        raise ValueError(f"point {y0} is not in Y_H")
    Q = quotient_by_subgroup(family, gamma, index_cap)
    m = Q.index
    tables = [Q.tables[lab] for lab in Y.labels]
    start = (y0, 0)
    index = {start: 0}
    points = [start]
    queue = deque([start])
    while queue:
        y, c = queue.popleft()
        for p, t in zip(Y.generators, tables):
            z = (p(y), t(c))
            if z not in index:
                index[z] = len(points)
                points.append(z)
                queue.append(z)
    perms = [Permutation([index[(p(y), t(c))] for y, c in points]) for p, t in zip(Y.generators, tables)]
    measure = None
    product_ok = False
    if Y.measure is not None:
        raw = [Y.measure[y] / m for y, _ in points]
        total = sum(raw)
        measure = [w / total for w in raw]
        product_ok = all(Y.measure[p(y)] == Y.measure[y] for p in Y.generators for y in range(Y.size))
    acting = combined_acting(Y.acting, tables)
    X = FiniteGSet(Y.labels, perms, measure, acting)
    pi = EquivariantMap(X, Y, [y for y, _ in points])
    yhs = set(yh)
    free = all(X.stabilizer(x).is_trivial() for x, (y, _) in enumerate(points) if y in yhs)
    max_fiber = max(pi.fiber_sizes())
    return ExtensionResult(X, pi, points, m, yh, free, max_fiber,
                           measure is not None and is_invariant(X, measure), product_ok)


@dataclass
class RoundTrip:
    refactor: FactorResult
    isomorphism: list[int] | None
    preimage_equals_free: bool


def round_trip(ext: ExtensionResult, base: FactorResult, family: GroupFamily,
               conjugates: FamilyConjugates) -> RoundTrip:
    """Re-factor the extension by H and compare with the Y it was built over."""
    X = ext.X
    conjs = [subgroup_in_gset(X, family, C) for C in conjugates.conjugates]
    phi = [base.phi_tilde[y] for y in ext.pi.mapping]
    f = build_factor(X, phi, conjs)
    iso = equivariant_isomorphism(f.Y, base.Y)
    equal = sorted(ext.preimage_of_yh()) == ext.free_points()
    return RoundTrip(f, iso, equal)


def sufficient_condition_shadow(ext: ExtensionResult, base: FactorResult) -> bool:
    """For y in the identity block, stabilizers of the fiber points sit inside G_y and miss H."""
    Y = ext.pi.target
    H = base.conjugates[0]
    deg = Y.acting.degree
    fibers = ext.pi.fibers()
    for y in range(Y.size):
        if base.phi_tilde[y] != 0:
            continue
        Gy = Y.stabilizer(y)
        for x in fibers[y]:
            proj = {restrict(a, deg) for a in ext.X.stabilizer(x).elements}
            if not proj <= Gy.members or len(proj & H.members) != 1:
                return False
    return True


# -- stabilizer index along fibers ---------------------------------------------------

@dataclass
class FiberLemmaResult:
    m: int
    indices: list[int]
    bound_holds: bool
    free_point: bool
    injective: bool | None
    regular: bool | None


def coset_projection(G: PermGroup, K: Subgroup, L: Subgroup) -> EquivariantMap:
    """The map G/K -> G/L, gK -> gL, for K inside L."""
    if not K <= L:
        raise ValueError("K must be a subgroup of L")
    X, xreps = from_coset_action(G, K)
    Y, yreps = from_coset_action(G, L)
    yinv = [t.inverse() for t in yreps]
    mapping = [next(j for j, ti in enumerate(yinv) if ti * r in L) for r in xreps]
    return EquivariantMap(X, Y, mapping)


def fiber_lemma_check(pi: EquivariantMap, y: int) -> FiberLemmaResult:
    """[G_y : G_x] <= m! on the fiber over y, and the fiber action of G_y when a fiber point is free."""
    X = pi.source
    fiber = pi.fibers()[y]
    m = len(fiber)
    # G_y read inside the source's acting group: elements carrying a fiber point into the fiber
    Gy = Subgroup(X.acting, (a for a in X.acting.elements if pi.mapping[X.act(a, fiber[0])] == y),
                  check=False)
    indices = []
    for x in fiber:
        Gx = X.stabilizer(x)
        if not Gx <= Gy:
            raise ValueError("map is not equivariant")
        indices.append(Gy.order() // Gx.order())
    bound = all(i <= factorial(m) for i in indices)
    free = any(X.stabilizer(x).is_trivial() for x in fiber)
    injective = regular = None
    if free:
        pos = {x: i for i, x in enumerate(fiber)}
        images = [Permutation([pos[X.act(a, x)] for x in fiber]) for a in Gy.elements]
        injective = len(set(images)) == len(images)
        regular = is_regular(images)
    return FiberLemmaResult(m, indices, bound, free, injective, regular)
