"""Normal-form arithmetic for the built-in group families.

Four families are supported: the infinite dihedral group, free abelian groups
Z^d, finite permutation groups, and direct products of these.  Elements are
plain hashable values in a family-specific normal form:

* dihedral: ``(k, e)`` meaning ``a^k b^e`` with ``e`` in {0, 1}
* free abelian: a tuple of ``d`` integers
* finite permutation: a :class:`~almostnormal.perm.Permutation`
* direct product: a pair ``(left, right)``

Subgroups are described by :class:`SubgroupSpec` objects.  Specs with an
exact membership oracle also produce canonical left-coset keys, which is what
:func:`quotient_by_subgroup` uses to build coset tables.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Iterable, Sequence

from .perm import PermGroup, Permutation

INVERSE_SUFFIX = "^-1"


class FamilyMismatch(ValueError):
    pass


class IndexCapExceeded(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"coset enumeration exceeded index cap {cap}")
        self.cap = cap


class MissingOracle(ValueError):
    pass


class GroupFamily:
    """Base class; subclasses implement the arithmetic."""

    kind: str = ""

    # positive generators as (label, element)
    @property
    def generators(self) -> list[tuple[str, Any]]:
        raise NotImplementedError

    @cached_property
    def symmetric_generators(self) -> list[tuple[str, Any]]:
        """Generators followed immediately by their inverses (when distinct)."""
        out = []
        seen = set()
        for label, g in self.generators:
            for lab, x in ((label, g), (label + INVERSE_SUFFIX, self.inv(g))):
                if x not in seen and x != self.identity:
                    seen.add(x)
                    out.append((lab, x))
        return out

    @cached_property
    def letters(self) -> dict[str, Any]:
        d = {}
        for label, g in self.generators:
            d[label] = g
            d[label + INVERSE_SUFFIX] = self.inv(g)
        return d

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.generators]

    identity: Any = None

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def is_element(self, x) -> bool:
        raise NotImplementedError

    def word(self, x) -> list[str]:
        """A word in generator letters (labels, with ``^-1`` for inverses) evaluating to x."""
        raise NotImplementedError

    def relators(self) -> list[list[str]]:
        """Words that evaluate to the identity and present the group."""
        raise NotImplementedError

    def format(self, x) -> str:
        return repr(x)

    def to_json(self) -> dict:
        raise NotImplementedError

    def element_to_json(self, x):
        raise NotImplementedError

    def element_from_json(self, data):
        raise NotImplementedError

    # -- derived operations ---------------------------------------------------

    def check(self, *xs) -> None:
        for x in xs:
            if not self.is_element(x):
                raise FamilyMismatch(f"{x!r} is not an element of {self.kind}")

    def evaluate(self, word: Iterable[str]):
        x = self.identity
        letters = self.letters
        for letter in word:
            try:
                x = self.mul(x, letters[letter])
            except KeyError:
                raise ValueError(f"unknown generator letter {letter!r}") from None
        return x

    def conj(self, g, h):
        """``g h g^-1``."""
        return self.mul(self.mul(g, h), self.inv(g))

    def power(self, x, n: int):
        base = x if n >= 0 else self.inv(x)
        out = self.identity
        for _ in range(abs(n)):
            out = self.mul(out, base)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupFamily) and self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash(repr(self.to_json()))


class DihedralInfinite(GroupFamily):
    """``<a, b | b a b = a^-1, b^2 = 1>`` with normal form ``(k, e) = a^k b^e``."""

    kind = "dihedral_infinite"
    identity = (0, 0)

    @property
    def generators(self):
        return [("a", (1, 0)), ("b", (0, 1))]

    def mul(self, x, y):
        k1, e1 = x
        k2, e2 = y
        return (k1 - k2 if e1 else k1 + k2, e1 ^ e2)

    def inv(self, x):
        k, e = x
        return (k, 1) if e else (-k, 0)

    def is_element(self, x) -> bool:
        return (isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], int)
                and x[1] in (0, 1))

    def word(self, x):
        k, e = x
        return (["a"] * k if k >= 0 else ["a" + INVERSE_SUFFIX] * -k) + ["b"] * e

    def relators(self):
        return [["b", "b"], ["b", "a", "b", "a"]]

    def format(self, x) -> str:
        k, e = x
        parts = []
        if k == 1:
            parts.append("a")
        elif k:
            parts.append(f"a^{k}")
        if e:
            parts.append("b")
        return " ".join(parts) or "1"

    def to_json(self):
        return {"type": self.kind}

    def element_to_json(self, x):
        return list(x)

    def element_from_json(self, data):
        x = (int(data[0]), int(data[1]))
        self.check(x)
        return x


class FreeAbelian(GroupFamily):
    kind = "free_abelian"

    def __init__(self, rank: int, labels: Sequence[str] | None = None):
        if rank < 0:
            raise ValueError("rank must be non-negative")
        self.rank = rank
        self._labels = list(labels) if labels else [f"x{i}" for i in range(rank)]
        if len(self._labels) != rank:
            raise ValueError("one label per coordinate")
        self.identity = (0,) * rank

    @property
    def generators(self):
        return [(lab, tuple(int(i == j) for j in range(self.rank)))
                for i, lab in enumerate(self._labels)]

    def mul(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def inv(self, x):
        return tuple(-a for a in x)

    def is_element(self, x) -> bool:
        return (isinstance(x, tuple) and len(x) == self.rank
                and all(isinstance(a, int) for a in x))

    def word(self, x):
        out = []
        for lab, a in zip(self._labels, x):
            out += [lab] * a if a >= 0 else [lab + INVERSE_SUFFIX] * -a
        return out

    def relators(self):
        labs = self._labels
        inv = INVERSE_SUFFIX
        return [[labs[i], labs[j], labs[i] + inv, labs[j] + inv]
                for i in range(self.rank) for j in range(i + 1, self.rank)]

    def format(self, x) -> str:
        return "(" + ",".join(map(str, x)) + ")"

    def to_json(self):
        return {"type": self.kind, "rank": self.rank, "labels": self._labels}

    def element_to_json(self, x):
        return list(x)

    def element_from_json(self, data):
        x = tuple(int(a) for a in data)
        self.check(x)
        return x


class FinitePerm(GroupFamily):
    """A finite permutation group as an abstract group with labelled generators."""

    kind = "finite_perm"

    def __init__(self, generators: Sequence[Permutation], labels: Sequence[str] | None = None,
                 degree: int | None = None):
        self.group = PermGroup(generators, degree=degree)
        self.degree = self.group.degree
        self._labels = list(labels) if labels else [f"s{i}" for i in range(len(generators))]
        if len(self._labels) != len(self.group.generators):
            raise ValueError("one label per generator")
        self.identity = self.group.identity

    @property
    def generators(self):
        return list(zip(self._labels, self.group.generators))

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        return x.inverse()

    def is_element(self, x) -> bool:
        return isinstance(x, Permutation) and x.degree == self.degree and x in self.group

    def word(self, x):
        return [self._labels[k] for k in self.group.word(x)]

    def relators(self):
        # Schreier relators of the BFS spanning tree: w_x s w_{xs}^-1
        out = []
        for x in self.group.elements:
            wx = self.word(x)
            for lab, s in self.generators:
                wy = self.word(x * s)
                rel = wx + [lab] + [l + INVERSE_SUFFIX for l in reversed(wy)]
                out.append(rel)
        return out

    def format(self, x) -> str:
        return "".join("(" + " ".join(map(str, c)) + ")" for c in x.cycles()) or "()"

    def to_json(self):
        return {"type": self.kind, "degree": self.degree, "labels": self._labels,
                "generators": [g.to_json() for g in self.group.generators]}

    def element_to_json(self, x):
        return x.to_json()

    def element_from_json(self, data):
        x = Permutation(data)
        self.check(x)
        return x


class DirectProduct(GroupFamily):
    kind = "direct_product"

    def __init__(self, left: GroupFamily, right: GroupFamily):
        labels = left.labels + right.labels
        if len(set(labels)) != len(labels):
            raise ValueError(f"generator labels collide in direct product: {labels}")
        self.left = left
        self.right = right
        self.identity = (left.identity, right.identity)

    @property
    def generators(self):
        L, R = self.left, self.right
        return ([(lab, (g, R.identity)) for lab, g in L.generators]
                + [(lab, (L.identity, g)) for lab, g in R.generators])

    def mul(self, x, y):
        return (self.left.mul(x[0], y[0]), self.right.mul(x[1], y[1]))

    def inv(self, x):
        return (self.left.inv(x[0]), self.right.inv(x[1]))

    def is_element(self, x) -> bool:
        return (isinstance(x, tuple) and len(x) == 2 and self.left.is_element(x[0])
                and self.right.is_element(x[1]))

    def word(self, x):
        return self.left.word(x[0]) + self.right.word(x[1])

    def relators(self):
        inv = INVERSE_SUFFIX
        comm = [[a, b, a + inv, b + inv] for a in self.left.labels for b in self.right.labels]
        return self.left.relators() + self.right.relators() + comm

    def format(self, x) -> str:
        return f"({self.left.format(x[0])}, {self.right.format(x[1])})"

    def to_json(self):
        return {"type": self.kind, "left": self.left.to_json(), "right": self.right.to_json()}

    def element_to_json(self, x):
        return [self.left.element_to_json(x[0]), self.right.element_to_json(x[1])]

    def element_from_json(self, data):
        return (self.left.element_from_json(data[0]), self.right.element_from_json(data[1]))


def family_from_json(data: dict) -> GroupFamily:
    kind = data.get("type")
    if kind == "dihedral_infinite":
        return DihedralInfinite()
    if kind == "free_abelian":
        return FreeAbelian(int(data["rank"]), data.get("labels"))
    if kind == "finite_perm":
        gens = [Permutation(g) for g in data.get("generators", [])]
        return FinitePerm(gens, data.get("labels"), degree=data.get("degree"))
    if kind == "direct_product":
        return DirectProduct(family_from_json(data["left"]), family_from_json(data["right"]))
    raise ValueError(f"unknown group family {kind!r}")


# -- element operations -------------------------------------------------------

def multiply(family: GroupFamily, x, y):
    family.check(x, y)
    return family.mul(x, y)


def invert(family: GroupFamily, x):
    family.check(x)
    return family.inv(x)


def ball(family: GroupFamily, radius: int) -> list:
    """Distinct elements of word length <= radius over the symmetric generators, shortlex order."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    e = family.identity
    seen = {e: None}
    frontier = [e]
    gens = [g for _, g in family.symmetric_generators]
    for _ in range(radius):
        nxt = []
        for x in frontier:
            for s in gens:
                y = family.mul(x, s)
                if y not in seen:
                    seen[y] = None
                    nxt.append(y)
        frontier = nxt
    return list(seen)


def balls(family: GroupFamily, radius: int) -> list[list]:
    """``balls(f, r)[i]`` is the ball of radius i, for i <= r."""
    return [ball(family, i) for i in range(radius + 1)]


# -- subgroups ----------------------------------------------------------------

class Membership(enum.Enum):
    YES = "yes"
    NO = "no"
    NO_WITHIN_BALL = "no-within-ball"
    UNKNOWN = "unknown"


class SubgroupSpec:
    """A subgroup of a family.  ``has_oracle`` specs implement ``contains`` and ``coset_key``."""

    has_oracle = True

    def __init__(self, family: GroupFamily):
        self.family = family

    def contains(self, g) -> bool:
        raise NotImplementedError

    def coset_key(self, g) -> Hashable:
        """Canonical key of the left coset ``g K``."""
        raise NotImplementedError

    def coset_rep(self, g):
        """A canonical representative of ``g K``."""
        return g

    @property
    def generators(self) -> list:
        raise NotImplementedError

    def elements(self) -> list | None:
        """The element list when the subgroup is finite and enumerable, else None."""
        return None

    def to_json(self):
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_json()})"


class WholeGroup(SubgroupSpec):
    def contains(self, g):
        return True

    def coset_key(self, g):
        return ()

    def coset_rep(self, g):
        return self.family.identity

    @property
    def generators(self):
        return [g for _, g in self.family.generators]

    def to_json(self):
        return {"whole": True}


class DihedralSubgroup(SubgroupSpec):
    """``<a^step, a^reflection b>``; ``step = 0`` drops the rotation, ``reflection=None`` drops b.

    Every subgroup of the infinite dihedral group has this form.
    """

    def __init__(self, family: DihedralInfinite, step: int, reflection: int | None = None):
        super().__init__(family)
        if step < 0:
            raise ValueError("step must be non-negative")
        if reflection is not None and step:
            reflection %= step
        self.step = step
        self.reflection = reflection

    def contains(self, g):
        k, e = g
        m = self.step
        if e == 0:
            return k == 0 if m == 0 else k % m == 0
        if self.reflection is None:
            return False
        d = k - self.reflection
        return d == 0 if m == 0 else d % m == 0

    def _normalize(self, g):
        k, e = g
        if e and self.reflection is not None:
            k, e = k - self.reflection, 0
        if self.step:
            k %= self.step
        return (k, e)

    def coset_key(self, g):
        return self._normalize(g)

    def coset_rep(self, g):
        return self._normalize(g)

    @property
    def generators(self):
        gens = []
        if self.step:
            gens.append((self.step, 0))
        if self.reflection is not None:
            gens.append((self.reflection, 1))
        return gens

    def elements(self):
        if self.step:
            return None
        return [(0, 0)] + ([(self.reflection, 1)] if self.reflection is not None else [])

    def to_json(self):
        if self.reflection == 0 and self.step and self.step & (self.step - 1) == 0:
            return {"dihedral_power": self.step.bit_length() - 1}
        return {"dihedral": {"step": self.step, "reflection": self.reflection}}


def dihedral_power(family: DihedralInfinite, i: int) -> DihedralSubgroup:
    """``<a^(2^i), b>``."""
    return DihedralSubgroup(family, 2**i, 0)


def hermite_normal_form(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Row-style Hermite normal form over the integers (nonzero rows only).

    Pivots are positive and entries above each pivot are reduced into ``[0, pivot)``.
    """
    A = [list(r) for r in rows if any(r)]
    out: list[list[int]] = []
    col = 0
    while A and col < ncols:
        A = [r for r in A if any(r)]
        nz = [r for r in A if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len([r for r in A if r[col] != 0]) > 1:
            nz = sorted((r for r in A if r[col] != 0), key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for j in range(ncols):
                    r[j] -= q * piv[j]
            A = [r for r in A if any(r)]
        piv = next(r for r in A if r[col] != 0)
        if piv[col] < 0:
            piv[:] = [-v for v in piv]
        A.remove(piv)
        for r in out:
            q = r[col] // piv[col]
            if q:
                for j in range(ncols):
                    r[j] -= q * piv[j]
        out.append(piv)
        col += 1
    return out


class Lattice(SubgroupSpec):
    """A subgroup of Z^d spanned by integer basis rows; membership by exact elimination."""

    def __init__(self, family: FreeAbelian, basis: Sequence[Sequence[int]]):
        super().__init__(family)
        d = family.rank
        self.basis = [tuple(int(v) for v in row) for row in basis]
        if any(len(row) != d for row in self.basis):
            raise ValueError(f"lattice rows must have length {d}")
        self.hnf = hermite_normal_form(self.basis, d)
        self._pivots = [next(j for j, v in enumerate(r) if v) for r in self.hnf]

    def reduce(self, v) -> tuple[int, ...]:
        v = list(v)
        for row, p in zip(self.hnf, self._pivots):
            q = v[p] // row[p]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)

    def contains(self, g):
        return not any(self.reduce(g))

    def coset_key(self, g):
        return self.reduce(g)

    def coset_rep(self, g):
        return self.reduce(g)

    @property
    def generators(self):
        return [tuple(r) for r in self.hnf]

    def elements(self):
        return None if self.hnf else [self.family.identity]

    def to_json(self):
        return {"lattice": [list(r) for r in self.basis]}


class FiniteSubgroup(SubgroupSpec):
    """A finite subgroup given by its generators; elements are enumerated by closure."""

    def __init__(self, family: GroupFamily, generators: Sequence, cap: int = 100_000):
        super().__init__(family)
        family.check(*generators)
        self._gens = list(generators)
        e = family.identity
        seen = {e: None}
        frontier = [e]
        while frontier:
            nxt = []
            for x in frontier:
                for s in self._gens:
                    y = family.mul(x, s)
                    if y not in seen:
                        seen[y] = None
                        nxt.append(y)
                        if len(seen) > cap:
                            raise ValueError(f"subgroup closure exceeds cap {cap}; not finite?")
            frontier = nxt
        self._elements = list(seen)
        self._members = frozenset(seen)

    def contains(self, g):
        return g in self._members

    def coset_key(self, g):
        return min((self.family.mul(g, h) for h in self._elements), key=_sort_key)

    def coset_rep(self, g):
        return self.coset_key(g)

    @property
    def generators(self):
        return list(self._gens)

    def elements(self):
        return list(self._elements)

    def to_json(self):
        return {"finite_generators": [self.family.element_to_json(g) for g in self._gens]}


def _sort_key(x):
    if isinstance(x, Permutation):
        return (0, x.images)
    if isinstance(x, tuple):
        return (1, tuple(_sort_key(v) for v in x))
    return (2, x)


class ProductSubgroup(SubgroupSpec):
    def __init__(self, family: DirectProduct, left: SubgroupSpec, right: SubgroupSpec):
        super().__init__(family)
        self.left = left
        self.right = right
        self.has_oracle = left.has_oracle and right.has_oracle

    def contains(self, g):
        return self.left.contains(g[0]) and self.right.contains(g[1])

    def coset_key(self, g):
        return (self.left.coset_key(g[0]), self.right.coset_key(g[1]))

    def coset_rep(self, g):
        return (self.left.coset_rep(g[0]), self.right.coset_rep(g[1]))

    @property
    def generators(self):
        L, R = self.family.left, self.family.right
        return ([(g, R.identity) for g in self.left.generators]
                + [(L.identity, g) for g in self.right.generators])

    def elements(self):
        le, re_ = self.left.elements(), self.right.elements()
        if le is None or re_ is None:
            return None
        return [(x, y) for x in le for y in re_]

    def to_json(self):
        return {"product": [self.left.to_json(), self.right.to_json()]}


class GeneratedSubgroup(SubgroupSpec):
    """A subgroup given only by generator words; membership by bounded closure."""

    has_oracle = False

    def __init__(self, family: GroupFamily, words: Sequence[Sequence[str]],
                 radius: int = 8, cap: int = 100_000):
        super().__init__(family)
        self.words = [list(w) for w in words]
        self._gens = [family.evaluate(w) for w in self.words]
        self.radius = radius
        self.cap = cap

    @property
    def generators(self):
        return list(self._gens)

    def _closure(self):
        """(elements found, status) where status is 'complete', 'radius' or 'cap'."""
        fam = self.family
        gens = []
        for g in self._gens:
            for x in (g, fam.inv(g)):
                if x not in gens and x != fam.identity:
                    gens.append(x)
        seen = {fam.identity}
        frontier = [fam.identity]
        for _ in range(self.radius):
            nxt = []
            for x in frontier:
                for s in gens:
                    y = fam.mul(x, s)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
                        if len(seen) > self.cap:
                            return seen, "cap"
            frontier = nxt
            if not frontier:
                return seen, "complete"
        return seen, ("complete" if not frontier else "radius")

    def membership(self, g) -> Membership:
        seen, status = self._closure()
        if g in seen:
            return Membership.YES
        if status == "complete":
            return Membership.NO
        if status == "radius":
            return Membership.NO_WITHIN_BALL
        return Membership.UNKNOWN

    def contains(self, g):
        raise MissingOracle("generated subgroup has no exact membership oracle")

    def coset_key(self, g):
        raise MissingOracle("generated subgroup has no exact membership oracle")

    def elements(self):
        seen, status = self._closure()
        return sorted(seen, key=_sort_key) if status == "complete" else None

    def to_json(self):
        return {"generated": self.words}


def subgroup_membership(spec: SubgroupSpec, g) -> Membership:
    spec.family.check(g)
    if isinstance(spec, GeneratedSubgroup):
        return spec.membership(g)
    return Membership.YES if spec.contains(g) else Membership.NO


def subgroup_from_json(family: GroupFamily, data: dict) -> SubgroupSpec:
    if not isinstance(data, dict) or len(data) != 1:
        raise ValueError(f"subgroup spec must be a single-key object, got {data!r}")
    (key, val), = data.items()
    if key == "whole":
        return WholeGroup(family)
    if key == "trivial":
        return FiniteSubgroup(family, [])
    if key == "dihedral_power":
        _expect(family, DihedralInfinite, key)
        return dihedral_power(family, int(val))
    if key == "dihedral":
        _expect(family, DihedralInfinite, key)
        r = val.get("reflection")
        return DihedralSubgroup(family, int(val["step"]), None if r is None else int(r))
    if key == "lattice":
        _expect(family, FreeAbelian, key)
        return Lattice(family, val)
    if key == "finite_generators":
        return FiniteSubgroup(family, [family.element_from_json(x) for x in val])
    if key == "product":
        _expect(family, DirectProduct, key)
        return ProductSubgroup(family, subgroup_from_json(family.left, val[0]),
                               subgroup_from_json(family.right, val[1]))
    if key == "generated":
        return GeneratedSubgroup(family, val)
    raise ValueError(f"unknown subgroup spec {key!r}")


def _expect(family, cls, key):
    if not isinstance(family, cls):
        raise FamilyMismatch(f"subgroup spec {key!r} needs a {cls.kind} family, got {family.kind}")


def normal_core(spec: SubgroupSpec) -> SubgroupSpec | None:
    """The normal core of ``spec`` when it can be written down exactly, else None."""
    fam = spec.family
    if isinstance(spec, WholeGroup) or isinstance(spec, Lattice):
        return spec
    if isinstance(spec, DihedralSubgroup):
        if spec.reflection is None or spec.step in (1, 2):
            return spec
        return DihedralSubgroup(fam, spec.step, None)
    if isinstance(spec, ProductSubgroup):
        L, R = normal_core(spec.left), normal_core(spec.right)
        if L is None or R is None:
            return None
        return ProductSubgroup(fam, L, R)
    if isinstance(spec, FiniteSubgroup) and isinstance(fam, FinitePerm):
        core = set(spec.elements())
        for g in fam.group.elements:
            gi = g.inverse()
            core = {h for h in core if gi * h * g in spec._members}
        return FiniteSubgroup(fam, sorted(core, key=_sort_key))
    return None


def is_normal_spec(spec: SubgroupSpec) -> bool:
    """Normality via the oracle: every symmetric generator conjugates every subgroup generator inside."""
    fam = spec.family
    return all(spec.contains(fam.conj(s, g))
               for _, s in fam.symmetric_generators for g in spec.generators)


# -- coset tables -------------------------------------------------------------

@dataclass
class FiniteQuotient:
    """Left-multiplication action of the family generators on ``G / K``.

    ``representatives[0]`` is the identity coset.  ``tables[label]`` is the
    permutation of coset indices induced by the generator ``label``.
    """

    family: GroupFamily
    spec: SubgroupSpec | None
    representatives: list
    tables: dict[str, Permutation]
    _keys: dict = field(default_factory=dict, repr=False)

    @property
    def index(self) -> int:
        return len(self.representatives)

    def coset_of(self, g) -> int:
        return self._keys[self.spec.coset_key(g)]

    def act(self, g, i: int) -> int:
        return self.coset_of(self.family.mul(g, self.representatives[i]))

    def image(self, g) -> Permutation:
        return Permutation([self.act(g, i) for i in range(self.index)], check=False)

    def word_image(self, word: Iterable[str]) -> Permutation:
        p = Permutation.identity(self.index)
        for letter in word:
            if letter.endswith(INVERSE_SUFFIX):
                p = p * self.tables[letter[: -len(INVERSE_SUFFIX)]].inverse()
            else:
                p = p * self.tables[letter]
        return p

    def satisfies_relations(self) -> bool:
        return all(self.word_image(r).is_identity() for r in self.family.relators())

    def image_group(self) -> PermGroup:
        return PermGroup([self.tables[lab] for lab in self.family.labels], degree=self.index)


def quotient_by_subgroup(family: GroupFamily, spec: SubgroupSpec, index_cap: int = 100_000) -> FiniteQuotient:
    if not spec.has_oracle:
        raise MissingOracle("coset enumeration needs a subgroup with a membership oracle")
    gens = family.generators
    e = family.identity
    reps = [spec.coset_rep(e)]
    keys = {spec.coset_key(e): 0}
    rows = {label: [] for label, _ in gens}
    i = 0
    while i < len(reps):
        r = reps[i]
        for label, s in gens:
            y = family.mul(s, r)
            k = spec.coset_key(y)
            j = keys.get(k)
            if j is None:
                j = len(reps)
                if j >= index_cap:
                    raise IndexCapExceeded(index_cap)
                keys[k] = j
                reps.append(spec.coset_rep(y))
            rows[label].append(j)
        i += 1
    tables = {label: Permutation(rows[label]) for label, _ in gens}
    return FiniteQuotient(family, spec, reps, tables, keys)
