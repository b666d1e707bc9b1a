"""Finite permutation groups by brute-force enumeration.

Permutations compose right to left: ``(p * q)(x) == p(q(x))``.  Groups are
enumerated by a shortlex breadth-first closure over their generators, and
subgroups are stored as their full sorted element lists, so equality,
containment and hashing are exact.  This is meant for groups of a few
thousand elements at most.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

DEFAULT_CAP = 10**6


class EnumerationCapExceeded(RuntimeError):
    def __init__(self, cap: int, partial: int):
        super().__init__(f"group closure exceeded cap {cap} (at least {partial} elements)")
        self.cap = cap
        self.partial = partial


class Permutation:
    """A bijection of ``{0, ..., n-1}`` stored as its image tuple."""

    __slots__ = ("images", "_hash")

    def __init__(self, images: Iterable[int], check: bool = True):
        images = tuple(images)
        if check and sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images!r}")
        self.images = images
        self._hash = None

    @classmethod
    def identity(cls, degree: int) -> Permutation:
        return cls(range(degree), check=False)

    @classmethod
    def from_cycles(cls, degree: int, *cycles: Sequence[int]) -> Permutation:
        images = list(range(degree))
        seen = set()
        for cycle in cycles:
            for i, x in enumerate(cycle):
                if x in seen or not 0 <= x < degree:
                    raise ValueError(f"bad cycle {cycle!r} for degree {degree}")
                seen.add(x)
                images[x] = cycle[(i + 1) % len(cycle)]
        return cls(images, check=False)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: Permutation) -> Permutation:
        if not isinstance(other, Permutation):
            return NotImplemented
        if len(other.images) != len(self.images):
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        return Permutation(map(self.images.__getitem__, other.images), check=False)

    def inverse(self) -> Permutation:
        n = len(self.images)
        inv = [0] * n
        for i, j in zip(range(n), self.images):
            inv[j] = i
        return Permutation(inv, check=False)

    def __pow__(self, n: int) -> Permutation:
        base = self if n >= 0 else self.inverse()
        result = Permutation.identity(self.degree)
        for _ in range(abs(n)):
            result = result * base
        return result

    def conjugate(self, g: Permutation) -> Permutation:
        """Return ``g * self * g^-1``."""
        return g * self * g.inverse()

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def fixed_points(self) -> list[int]:
        return [i for i, x in enumerate(self.images) if i == x]

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(len(self.images)):
            if start in seen or self.images[start] == start:
                continue
            cycle = [start]
            seen.add(start)
            x = self.images[start]
            while x != start:
                cycle.append(x)
                seen.add(x)
                x = self.images[x]
            out.append(tuple(cycle))
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other: Permutation) -> bool:
        return self.images < other.images

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.images)
        return self._hash

    def __repr__(self) -> str:
        cyc = "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles())
        return f"Permutation<{self.degree}>{cyc or '()'}"

    def to_json(self) -> list[int]:
        return list(self.images)


def compose_apply(p: Permutation, q: Permutation) -> Permutation:
    """``p`` after ``q``; raises ``ValueError`` on a degree mismatch."""
    return p * q


class PermGroup:
    """A permutation group given by generators, enumerated on demand.

    ``elements`` is the canonical (sorted) element list.  ``word(g)`` returns
    the shortlex-first generator word (a tuple of generator indices, read
    left to right as a product) reaching ``g``.
    """

    def __init__(self, generators: Sequence[Permutation], degree: int | None = None,
                 cap: int = DEFAULT_CAP):
        generators = list(generators)
        if degree is None:
            if not generators:
                raise ValueError("degree required for a group with no generators")
            degree = generators[0].degree
        for g in generators:
            if g.degree != degree:
                raise ValueError(f"generator degree {g.degree} != {degree}")
        self.degree = degree
        self.generators = tuple(generators)
        self.enumeration_cap = cap
        self._elements: tuple[Permutation, ...] | None = None
        self._words: dict[Permutation, tuple[int, ...]] | None = None
        self._members: frozenset[Permutation] | None = None

    @property
    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def _enumerate(self) -> None:
        if self._elements is not None:
            return
        e = self.identity
        words = {e: ()}
        queue = deque([e])
        while queue:
            x = queue.popleft()
            wx = words[x]
            for k, s in enumerate(self.generators):
                y = x * s
                if y not in words:
                    words[y] = wx + (k,)
                    if len(words) > self.enumeration_cap:
                        raise EnumerationCapExceeded(self.enumeration_cap, len(words))
                    queue.append(y)
        self._words = words
        self._elements = tuple(sorted(words))
        self._members = frozenset(words)

    @property
    def elements(self) -> tuple[Permutation, ...]:
        self._enumerate()
        return self._elements

    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return self.order()

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, p: Permutation) -> bool:
        self._enumerate()
        return p in self._members

    def word(self, g: Permutation) -> tuple[int, ...]:
        self._enumerate()
        return self._words[g]

    def whole(self) -> Subgroup:
        return Subgroup(self, self.elements, check=False)

    def trivial(self) -> Subgroup:
        return Subgroup(self, [self.identity], check=False)

    def subgroup(self, generators: Iterable[Permutation]) -> Subgroup:
        """The subgroup generated by ``generators`` (which must lie in this group)."""
        gens = list(generators)
        for g in gens:
            if g not in self:
                raise ValueError(f"{g!r} is not an element of the parent group")
        return Subgroup(self, closure(gens, self.degree), check=False)

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(a * b == b * a for a, b in combinations(gens, 2))

    def __repr__(self) -> str:
        n = len(self._elements) if self._elements is not None else "?"
        return f"PermGroup(degree={self.degree}, gens={len(self.generators)}, order={n})"


def closure(generators: Iterable[Permutation], degree: int, cap: int = DEFAULT_CAP) -> set[Permutation]:
    e = Permutation.identity(degree)
    gens = [g for g in generators if g != e]
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = x * s
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > cap:
            raise EnumerationCapExceeded(cap, len(seen))
        frontier = nxt
    return seen


class Subgroup:
    """A subgroup of a :class:`PermGroup`, held as its sorted element list."""

    __slots__ = ("parent", "elements", "members", "_gens", "_hash")

    def __init__(self, parent: PermGroup, elements: Iterable[Permutation], check: bool = True):
        members = frozenset(elements)
        if check:
            if Permutation.identity(parent.degree) not in members:
                raise ValueError("subgroup must contain the identity")
            for x in members:
                if x not in parent:
                    raise ValueError(f"{x!r} is not in the parent group")
            gens = _small_generating_set(members, parent.degree)
            if any(x * g not in members for x in members for g in gens):
                raise ValueError("element set is not closed under composition")
        self.parent = parent
        self.members = members
        self.elements = tuple(sorted(members))
        self._gens = None
        self._hash = hash(self.members)

    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, p: Permutation) -> bool:
        return p in self.members

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self.members == other.members

    def __hash__(self) -> int:
        return self._hash

    def __le__(self, other: Subgroup) -> bool:
        return self.members <= other.members

    def __lt__(self, other: Subgroup) -> bool:
        return self.members < other.members

    def __repr__(self) -> str:
        return f"Subgroup(order={len(self.elements)})"

    @property
    def generators(self) -> tuple[Permutation, ...]:
        if self._gens is None:
            self._gens = tuple(_small_generating_set(self.members, self.parent.degree))
        return self._gens

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def conjugate(self, g: Permutation) -> Subgroup:
        """``g H g^-1``."""
        gi = g.inverse()
        return Subgroup(self.parent, (g * h * gi for h in self.elements), check=False)

    def intersection(self, other: Subgroup) -> Subgroup:
        return Subgroup(self.parent, self.members & other.members, check=False)

    def set_product(self, other: Subgroup) -> frozenset[Permutation]:
        return frozenset(a * b for a in self.elements for b in other.elements)

    def index_in(self, other: Subgroup | PermGroup) -> int:
        n = other.order()
        if n % self.order():
            raise ValueError("order does not divide")
        return n // self.order()

    def to_json(self) -> list[list[int]]:
        return [p.to_json() for p in self.elements]


def _small_generating_set(members: frozenset[Permutation], degree: int) -> list[Permutation]:
    """Greedy generating set: add the smallest element not yet generated."""
    gens: list[Permutation] = []
    reached = {Permutation.identity(degree)}
    for x in sorted(members):
        if x not in reached:
            gens.append(x)
            reached = closure(gens, degree)
    return gens


def _require_subgroup(G: PermGroup, H: Subgroup) -> None:
    if H.parent is not G and not all(h in G for h in H.generators):
        raise ValueError("H is not a subgroup of G")


def enumerate_elements(G: PermGroup) -> tuple[Permutation, ...]:
    return G.elements


def orbit(G: PermGroup, point: int) -> list[int]:
    """Orbit of ``point`` in breadth-first discovery order."""
    if not 0 <= point < G.degree:
        raise ValueError(f"point {point} out of range for degree {G.degree}")
    seen = {point: None}
    queue = deque([point])
    while queue:
        x = queue.popleft()
        for s in G.generators:
            y = s.images[x]
            if y not in seen:
                seen[y] = None
                queue.append(y)
    return list(seen)


def orbit_and_stabilizer(G: PermGroup, point: int) -> tuple[frozenset[int], Subgroup]:
    orb = orbit(G, point)
    stab = Subgroup(G, (g for g in G.elements if g.images[point] == point), check=False)
    assert len(orb) * stab.order() == G.order()
    return frozenset(orb), stab


def normalizer(G: PermGroup, H: Subgroup) -> Subgroup:
    _require_subgroup(G, H)
    gens = H.generators
    members = H.members
    out = []
    for g in G.elements:
        gi = g.inverse()
        if all(g * h * gi in members for h in gens):
            out.append(g)
    return Subgroup(G, out, check=False)


def centralizer_center(G: PermGroup, H: Subgroup) -> tuple[Subgroup, Subgroup]:
    """Return ``(Z_H, C_H)``: the centralizer of H in G and the center of H."""
    _require_subgroup(G, H)
    gens = H.generators
    Z = Subgroup(G, (g for g in G.elements if all(g * h == h * g for h in gens)), check=False)
    return Z, Z.intersection(H)


def conjugate_orbit(G: PermGroup, H: Subgroup) -> tuple[tuple[Subgroup, ...], Subgroup]:
    """Conjugates of H (BFS order under the generators, H first) and their intersection.

    The intersection of all conjugates is the core of H, a normal subgroup of G.
    """
    conjs, _ = conjugate_orbit_with_reps(G, H)
    core = conjs[0].members
    for K in conjs[1:]:
        core &= K.members
    return conjs, Subgroup(G, core, check=False)


def conjugate_orbit_with_reps(G: PermGroup, H: Subgroup) -> tuple[tuple[Subgroup, ...], tuple[Permutation, ...]]:
    """Conjugates of H with representatives ``g_i`` such that ``conjs[i] == g_i H g_i^-1``.

    Representatives are shortlex in the generators with the identity first;
    they index the cosets of the normalizer of H.
    """
    _require_subgroup(G, H)
    e = G.identity
    index = {H: 0}
    conjs = [H]
    reps = [e]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for s in G.generators:
            K = conjs[i].conjugate(s)
            if K not in index:
                index[K] = len(conjs)
                conjs.append(K)
                reps.append(s * reps[i])
                queue.append(index[K])
    return tuple(conjs), tuple(reps)


def is_regular(H: Subgroup | Iterable[Permutation]) -> bool:
    """True iff every non-identity element moves every point."""
    return all(not p.fixed_points() for p in H if not p.is_identity())


def regularity_and_embedding(H: Subgroup | Iterable[Permutation]) -> dict:
    return {"regular": is_regular(H)}


@dataclass(frozen=True)
class ConjugationAction:
    conjugates: tuple[Subgroup, ...]
    generator_images: tuple[Permutation, ...]
    image: PermGroup
    kernel: Subgroup
    hypothesis_holds: bool


def conjugation_action_hom(G: PermGroup, H: Subgroup) -> ConjugationAction:
    """The action of G on the conjugates of H, as a homomorphism into S_p.

    ``hypothesis_holds`` reports whether the union of the conjugates of H
    escapes the kernel, the intersection of all normalizers of conjugates.
    """
    conjs, _ = conjugate_orbit_with_reps(G, H)
    index = {K: i for i, K in enumerate(conjs)}
    p = len(conjs)

    def image_of(g: Permutation) -> Permutation:
        return Permutation([index[K.conjugate(g)] for K in conjs], check=False)

    gen_images = tuple(image_of(s) for s in G.generators)
    image = PermGroup(gen_images, degree=p)
    ident = Permutation.identity(p)
    kernel = Subgroup(G, (g for g in G.elements if image_of(g) == ident), check=False)
    union = set().union(*(K.members for K in conjs))
    return ConjugationAction(conjs, gen_images, image, kernel, not union <= kernel.members)


def cyclic_subgroups(G: PermGroup) -> list[Subgroup]:
    seen = {}
    for g in G.elements:
        C = Subgroup(G, closure([g], G.degree), check=False)
        seen.setdefault(C, None)
    return list(seen)


def all_subgroups(G: PermGroup) -> list[Subgroup]:
    """Every subgroup of G, by repeatedly joining subgroups with cyclic subgroups.

    Sorted by order, then by element list.
    """
    cyclic = cyclic_subgroups(G)
    found = set(cyclic)
    frontier = list(cyclic)
    while frontier:
        nxt = []
        for K in frontier:
            for C in cyclic:
                if C.members <= K.members:
                    continue
                J = Subgroup(G, closure(list(K.generators) + list(C.generators), G.degree), check=False)
                if J not in found:
                    found.add(J)
                    nxt.append(J)
        frontier = nxt
    return sorted(found, key=lambda S: (S.order(), S.elements))


def subgroup_classes(G: PermGroup, subgroups: list[Subgroup] | None = None) -> list[list[Subgroup]]:
    """Partition subgroups into conjugacy classes, in order of first appearance."""
    if subgroups is None:
        subgroups = all_subgroups(G)
    placed = set()
    classes = []
    for S in subgroups:
        if S in placed:
            continue
        conjs, _ = conjugate_orbit(G, S)
        placed.update(conjs)
        classes.append(list(conjs))
    return classes


def is_normal(G: PermGroup, H: Subgroup) -> bool:
    return all(H.conjugate(s) == H for s in G.generators)


# -- named groups -------------------------------------------------------------

def symmetric_group(n: int) -> PermGroup:
    if n < 2:
        return PermGroup([], degree=max(n, 1))
    gens = [Permutation.from_cycles(n, (0, 1))]
    if n > 2:
        gens.append(Permutation.from_cycles(n, tuple(range(n))))
    return PermGroup(gens)


def alternating_group(n: int) -> PermGroup:
    if n < 3:
        return PermGroup([], degree=max(n, 1))
    gens = [Permutation.from_cycles(n, (0, 1, 2))]
    if n > 3:
        gens.append(Permutation.from_cycles(n, tuple(range(n))) if n % 2
                    else Permutation.from_cycles(n, tuple(range(1, n))))
    return PermGroup(gens)


def cyclic_group(n: int) -> PermGroup:
    return PermGroup([Permutation.from_cycles(n, tuple(range(n)))] if n > 1 else [], degree=n)


def dihedral_group(n: int) -> PermGroup:
    """Symmetries of the n-gon (order 2n): rotation ``a`` and reflection ``b: j -> -j``."""
    a = Permutation([(j + 1) % n for j in range(n)])
    b = Permutation([(-j) % n for j in range(n)])
    return PermGroup([a, b])


def quaternion_group() -> PermGroup:
    """Q8 in its regular representation on 8 points."""
    # elements +-1, +-i, +-j, +-k indexed 0..7 as (sign, unit) pairs
    units = ["1", "i", "j", "k"]
    table = {
        ("1", u): (1, u) for u in units
    }
    table.update({(u, "1"): (1, u) for u in units})
    table.update({("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
                  ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
                  ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})
    elems = [(s, u) for s in (1, -1) for u in units]
    idx = {e: n for n, e in enumerate(elems)}

    def left(x):
        sx, ux = x
        images = []
        for sy, uy in elems:
            s, u = table[(ux, uy)]
            images.append(idx[(sx * sy * s, u)])
        return Permutation(images)

    return PermGroup([left((1, "i")), left((1, "j"))])


def named_groups() -> dict[str, PermGroup]:
    """Small built-in groups used by the exhaustive checks."""
    return {
        "C4": cyclic_group(4),
        "C6": cyclic_group(6),
        "S3": symmetric_group(3),
        "D4": dihedral_group(4),
        "Q8": quaternion_group(),
        "D6": dihedral_group(6),
        "A4": alternating_group(4),
        "S4": symmetric_group(4),
        "A5": alternating_group(5),
    }
