"""Finite G-sets: points permuted by labelled generators, with an acting group.

A :class:`FiniteGSet` stores one permutation of its points per generator
label.  Stabilizers are subgroups of an *acting group*: a permutation group
whose generators are aligned with the labels.  By default that is the group
the generator permutations themselves generate (the faithful image), but a
larger group may be supplied, for instance the image of G on a deeper level of
an odometer, so that stabilizers of different G-sets can be compared inside
one common finite quotient.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Iterable, Sequence

from .perm import PermGroup, Permutation, Subgroup

INVERSE_SUFFIX = "^-1"


class ActionMismatch(ValueError):
    pass


class FiniteGSet:
    def __init__(self, labels: Sequence[str], generators: Sequence[Permutation],
                 measure: Sequence[Fraction] | None = None, acting: PermGroup | None = None,
                 validate: bool = True):
        if len(labels) != len(generators):
            raise ValueError("one permutation per generator label")
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate generator labels")
        if not generators:
            raise ValueError("a G-set needs at least one generator label")
        size = generators[0].degree
        if any(p.degree != size for p in generators):
            raise ValueError("generator permutations must share a degree")
        self.labels = list(labels)
        self.generators = list(generators)
        self.size = size
        self.gens = dict(zip(self.labels, self.generators))
        if acting is None:
            acting = PermGroup(self.generators, degree=size)
        elif len(acting.generators) != len(self.labels):
            raise ActionMismatch("acting group generators must align with the labels")
        self.acting = acting
        # when the acting group is generated by our own permutations, each element acts as itself
        self.faithful = acting.generators == tuple(self.generators)
        self.measure = None if measure is None else [Fraction(m) for m in measure]
        if self.measure is not None:
            if len(self.measure) != size:
                raise ValueError("one measure value per point")
            if sum(self.measure) != 1 or any(m < 0 for m in self.measure):
                raise ValueError("measure must be a probability vector")
        self._rho: dict[Permutation, Permutation] | None = None
        self._stabs: list[Subgroup] | None = None
        if validate:
            self.check_acting()

    def __repr__(self) -> str:
        return f"FiniteGSet(size={self.size}, labels={self.labels})"

    # -- the acting group -----------------------------------------------------

    def check_acting(self) -> None:
        """Build the action of every acting-group element; raise if it is not well defined."""
        if self._rho is not None or self.faithful:
            return
        A = self.acting
        e = A.identity
        rho = {e: Permutation.identity(self.size)}
        queue = deque([e])
        while queue:
            x = queue.popleft()
            rx = rho[x]
            for s, ps in zip(A.generators, self.generators):
                y = x * s
                ry = rx * ps
                seen = rho.get(y)
                if seen is None:
                    rho[y] = ry
                    queue.append(y)
                elif seen != ry:
                    raise ActionMismatch("generator permutations do not factor through the acting group")
        self._rho = rho

    def rho(self, a: Permutation) -> Permutation:
        """The permutation of the points induced by an acting-group element."""
        if self.faithful:
            return a
        self.check_acting()
        return self._rho[a]

    def act(self, a: Permutation, point: int) -> int:
        if self.faithful:
            return a.images[point]
        return self.rho(a).images[point]

    def word_to_acting(self, word: Iterable[str]) -> Permutation:
        gens = dict(zip(self.labels, self.acting.generators))
        x = self.acting.identity
        for letter in word:
            if letter.endswith(INVERSE_SUFFIX):
                x = x * gens[letter[: -len(INVERSE_SUFFIX)]].inverse()
            else:
                x = x * gens[letter]
        return x

    def to_acting(self, family, g) -> Permutation:
        """Image of a family element in the acting group."""
        return self.word_to_acting(family.word(g))

    def word_action(self, word: Iterable[str]) -> Permutation:
        p = Permutation.identity(self.size)
        for letter in word:
            if letter.endswith(INVERSE_SUFFIX):
                p = p * self.gens[letter[: -len(INVERSE_SUFFIX)]].inverse()
            else:
                p = p * self.gens[letter]
        return p

    def satisfies_relations(self, family) -> bool:
        return all(self.word_action(r).is_identity() for r in family.relators())

    # -- orbits and stabilizers -----------------------------------------------

    def orbits(self) -> list[list[int]]:
        seen = [False] * self.size
        out = []
        for start in range(self.size):
            if seen[start]:
                continue
            seen[start] = True
            orb = [start]
            k = 0
            while k < len(orb):
                p = orb[k]
                for g in self.generators:
                    q = g(p)
                    if not seen[q]:
                        seen[q] = True
                        orb.append(q)
                k += 1
            out.append(orb)
        return out

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1

    def transversal(self, base: int) -> dict[int, Permutation]:
        """For each point p in the orbit of ``base``, an acting element t with t(base) = p."""
        A = self.acting
        t = {base: A.identity}
        queue = deque([base])
        while queue:
            p = queue.popleft()
            for s, ps in zip(A.generators, self.generators):
                q = ps(p)
                if q not in t:
                    t[q] = s * t[p]
                    queue.append(q)
        return t

    def stabilizer_by_filter(self, point: int) -> Subgroup:
        A = self.acting
        return Subgroup(A, (a for a in A.elements if self.act(a, point) == point), check=False)

    def stabilizers(self) -> list[Subgroup]:
        """Point stabilizers in the acting group, one per point."""
        if self._stabs is None:
            stabs: list[Subgroup | None] = [None] * self.size
            for orb in self.orbits():
                base = orb[0]
                S = self.stabilizer_by_filter(base)
                for p, t in self.transversal(base).items():
                    stabs[p] = S if p == base else S.conjugate(t)
            self._stabs = stabs
        return self._stabs

    def stabilizer(self, point: int) -> Subgroup:
        return self.stabilizers()[point]

    def fixed_points(self, a: Permutation) -> list[int]:
        return self.rho(a).fixed_points()

    # -- measure --------------------------------------------------------------

    def measure_is_invariant(self) -> bool:
        if self.measure is None:
            return False
        m = self.measure
        return all(m[g(p)] == m[p] for g in self.generators for p in range(self.size))

    def with_uniform_measure(self) -> FiniteGSet:
        out = FiniteGSet(self.labels, self.generators, [Fraction(1, self.size)] * self.size,
                         self.acting, validate=False)
        out._rho = self._rho
        out._stabs = self._stabs
        return out

    def to_json(self) -> dict:
        out = {"size": self.size,
               "generators": {lab: p.to_json() for lab, p in self.gens.items()}}
        if self.measure is not None:
            out["measure"] = [format_rational(m) for m in self.measure]
        return out


def format_rational(x) -> str | int:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def from_coset_action(G: PermGroup, K: Subgroup, labels: Sequence[str] | None = None,
                      uniform: bool = True) -> tuple[FiniteGSet, list[Permutation]]:
    """G acting on the left cosets G/K.  Returns the G-set and coset representatives.

    Point 0 is the coset K itself; the rest follow in BFS order.
    """
    labels = list(labels) if labels else [f"s{i}" for i in range(len(G.generators))]
    key = {}
    reps = []

    def coset(g):
        return frozenset(g * k for k in K.elements)

    c0 = coset(G.identity)
    key[c0] = 0
    reps.append(G.identity)
    rows = [[] for _ in G.generators]
    i = 0
    while i < len(reps):
        r = reps[i]
        for j, s in enumerate(G.generators):
            y = s * r
            c = coset(y)
            if c not in key:
                key[c] = len(reps)
                reps.append(y)
            rows[j].append(key[c])
        i += 1
    perms = [Permutation(r) for r in rows]
    n = len(reps)
    measure = [Fraction(1, n)] * n if uniform else None
    return FiniteGSet(labels, perms, measure, acting=G), reps


def disjoint_union(X: FiniteGSet, Y: FiniteGSet) -> FiniteGSet:
    if X.labels != Y.labels:
        raise ValueError("disjoint union needs matching generator labels")
    n = X.size
    perms = [Permutation(list(p.images) + [n + q for q in Y.gens[lab].images])
             for lab, p in X.gens.items()]
    measure = None
    if X.measure is not None and Y.measure is not None:
        measure = [m / 2 for m in X.measure] + [m / 2 for m in Y.measure]
    acting = X.acting if X.acting is Y.acting else None
    return FiniteGSet(X.labels, perms, measure, acting)


def combined_acting(A: PermGroup, perms: Sequence[Permutation]) -> PermGroup:
    """The group generated by ``(a_k, p_k)`` acting on the disjoint union of both degrees.

    It surjects onto A by restriction to the first ``A.degree`` points.
    """
    d = A.degree
    gens = [Permutation(list(a.images) + [d + q for q in p.images])
            for a, p in zip(A.generators, perms)]
    return PermGroup(gens, degree=d + (perms[0].degree if perms else 0))


def restrict(a: Permutation, degree: int) -> Permutation:
    return Permutation(a.images[:degree], check=False)


def equivariant_isomorphism(X: FiniteGSet, Y: FiniteGSet, x0: int = 0) -> list[int] | None:
    """A bijection X -> Y commuting with every generator and sending x0 somewhere, or None.

    Both sets must be transitive with the same labels.
    """
    if X.labels != Y.labels or X.size != Y.size or not X.is_transitive():
        return None
    for y0 in range(Y.size):
        f = {x0: y0}
        queue = deque([x0])
        ok = True
        while queue and ok:
            x = queue.popleft()
            for lab in X.labels:
                xs, ys = X.gens[lab](x), Y.gens[lab](f[x])
                if xs in f:
                    if f[xs] != ys:
                        ok = False
                        break
                else:
                    f[xs] = ys
                    queue.append(xs)
        if ok and len(set(f.values())) == X.size:
            return [f[x] for x in range(X.size)]
    return None
