"""Truncated odometers built from nested finite-index subgroup chains, and the full shift.

A :class:`LevelSystem` holds the coset tables of ``G/G_i`` for ``i <= depth``
together with the projections ``G/G_{i+1} -> G/G_i``.  A point of the
truncated odometer is a compatible prefix of coset indices; index 0 is always
the identity coset, so the all-zero prefix is the basepoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .groups import (FiniteQuotient, GroupFamily, SubgroupSpec, WholeGroup,
                     quotient_by_subgroup)
from .gsets import FiniteGSet
from .perm import PermGroup


class NonNestedChain(ValueError):
    pass


@dataclass
class GroupChain:
    """``specs[0]`` is the whole group; ``specs[i+1]`` must lie inside ``specs[i]``."""

    family: GroupFamily
    specs: list[SubgroupSpec]

    @classmethod
    def from_levels(cls, family: GroupFamily, levels: Sequence[SubgroupSpec]) -> GroupChain:
        """Chain G = G_0 > levels[0] > levels[1] > ..."""
        return cls(family, [WholeGroup(family)] + list(levels))

    def __len__(self) -> int:
        return len(self.specs)

    def check_nested(self) -> None:
        for i in range(len(self.specs) - 1):
            outer, inner = self.specs[i], self.specs[i + 1]
            for g in inner.generators:
                if not outer.contains(g):
                    raise NonNestedChain(
                        f"generator {self.family.format(g)} of level {i + 1} is not in level {i}")

    def truncated(self, depth: int) -> GroupChain:
        if depth + 1 > len(self.specs):
            raise ValueError(f"chain has only {len(self.specs) - 1} levels below G, depth {depth} requested")
        return GroupChain(self.family, self.specs[: depth + 1])


class LevelSystem:
    def __init__(self, chain: GroupChain, quotients: list[FiniteQuotient], projections: list[list[int]]):
        self.chain = chain
        self.family = chain.family
        self.quotients = quotients
        self.projections = projections
        self._images: dict[int, PermGroup] = {}
        self._gsets: dict[tuple[int, int], FiniteGSet] = {}

    @property
    def depth(self) -> int:
        return len(self.quotients) - 1

    def size(self, level: int) -> int:
        return self.quotients[level].index

    def sizes(self) -> list[int]:
        return [q.index for q in self.quotients]

    def _check_level(self, level: int) -> None:
        if not 0 <= level <= self.depth:
            raise ValueError(f"level {level} out of range 0..{self.depth}")

    def image_group(self, level: int) -> PermGroup:
        """The image of G in the permutations of ``G/G_level``."""
        self._check_level(level)
        if level not in self._images:
            self._images[level] = self.quotients[level].image_group()
        return self._images[level]

    def level_gset(self, level: int, acting_level: int | None = None, uniform: bool = True) -> FiniteGSet:
        """``G/G_level`` as a finite G-set.

        Stabilizers live in the image group of ``acting_level`` (default: this level),
        which must be at least ``level``.
        """
        self._check_level(level)
        acting_level = level if acting_level is None else acting_level
        if acting_level < level:
            raise ValueError("acting level must be at least the level")
        key = (level, acting_level)
        if key not in self._gsets:
            q = self.quotients[level]
            labels = self.family.labels
            perms = [q.tables[lab] for lab in labels]
            measure = [Fraction(1, q.index)] * q.index
            self._gsets[key] = FiniteGSet(labels, perms, measure, self.image_group(acting_level))
        X = self._gsets[key]
        if not uniform:
            X = FiniteGSet(X.labels, X.generators, None, X.acting)
        return X

    # -- invariants -----------------------------------------------------------

    def check_equivariance(self) -> bool:
        for i, proj in enumerate(self.projections):
            lower, upper = self.quotients[i], self.quotients[i + 1]
            for lab in self.family.labels:
                lo, up = lower.tables[lab], upper.tables[lab]
                if any(proj[up(x)] != lo(proj[x]) for x in range(upper.index)):
                    return False
        return True

    def check_index_multiplicativity(self) -> bool:
        """|G/G_{i+1}| = |G/G_i| [G_i : G_{i+1}], with the relative index read off the fibers."""
        for i, proj in enumerate(self.projections):
            fibers = [0] * self.size(i)
            for x in proj:
                fibers[x] += 1
            rel = fibers[0]
            if any(f != rel for f in fibers) or self.size(i + 1) != self.size(i) * rel:
                return False
        return True

    def check_relations(self) -> bool:
        return all(q.satisfies_relations() for q in self.quotients)


def build_level_system(chain: GroupChain, depth: int, index_cap: int = 100_000) -> LevelSystem:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    chain = chain.truncated(depth)
    chain.check_nested()
    quotients = [quotient_by_subgroup(chain.family, spec, index_cap) for spec in chain.specs]
    projections = []
    for i in range(depth):
        lower, upper = quotients[i], quotients[i + 1]
        projections.append([lower.coset_of(r) for r in upper.representatives])
    ls = LevelSystem(chain, quotients, projections)
    assert ls.size(0) == 1
    return ls


# -- points, cylinders, measure, metric ----------------------------------------

@dataclass(frozen=True)
class Cylinder:
    level: int
    index: int


class InvalidPrefix(ValueError):
    pass


def validate_prefix(ls: LevelSystem, x: Sequence[int]) -> tuple[int, ...]:
    x = tuple(x)
    if not 1 <= len(x) <= ls.depth + 1:
        raise InvalidPrefix(f"prefix length must be in 1..{ls.depth + 1}")
    for i, xi in enumerate(x):
        if not 0 <= xi < ls.size(i):
            raise InvalidPrefix(f"coset index {xi} out of range at level {i}")
    for i in range(len(x) - 1):
        if ls.projections[i][x[i + 1]] != x[i]:
            raise InvalidPrefix(f"prefix incompatible between levels {i} and {i + 1}")
    return x


def basepoint(ls: LevelSystem, depth: int | None = None) -> tuple[int, ...]:
    depth = ls.depth if depth is None else depth
    return (0,) * (depth + 1)


def prefix_of(ls: LevelSystem, g, depth: int | None = None) -> tuple[int, ...]:
    """The prefix of ``g`` applied to the basepoint: ``(gG_0, gG_1, ...)``."""
    depth = ls.depth if depth is None else depth
    return tuple(ls.quotients[i].coset_of(g) for i in range(depth + 1))


def lift(ls: LevelSystem, level: int, index: int) -> tuple[int, ...]:
    """The prefix ending at a level-``level`` coset."""
    out = [index]
    for i in range(level - 1, -1, -1):
        out.append(ls.projections[i][out[-1]])
    return tuple(reversed(out))


def act_on_prefix(ls: LevelSystem, g, x: Sequence[int]) -> tuple[int, ...]:
    x = validate_prefix(ls, x)
    return tuple(ls.quotients[i].act(g, xi) for i, xi in enumerate(x))


def cylinder_measure(ls: LevelSystem, c: Cylinder) -> Fraction:
    ls._check_level(c.level)
    if not 0 <= c.index < ls.size(c.level):
        raise ValueError("cylinder index out of range")
    return Fraction(1, ls.size(c.level))


def refinements(ls: LevelSystem, c: Cylinder, level: int) -> list[int]:
    """Level-``level`` coset indices lying in the cylinder ``c``."""
    ls._check_level(level)
    if level < c.level:
        raise ValueError("refinement level below the cylinder's level")
    current = [c.index]
    for i in range(c.level, level):
        proj = ls.projections[i]
        keep = set(current)
        current = [y for y in range(ls.size(i + 1)) if proj[y] in keep]
    return current


def distance(x: Sequence[int], y: Sequence[int]) -> Fraction:
    """``2^-n`` with ``n`` the last level where the prefixes agree; 0 for identical prefixes."""
    if len(x) != len(y):
        raise ValueError("prefixes must have equal length")
    if tuple(x) == tuple(y):
        return Fraction(0)
    n = -1
    for i, (a, b) in enumerate(zip(x, y)):
        if a != b:
            break
        n = i
    if n < 0:
        raise InvalidPrefix("prefixes disagree at level 0")
    return Fraction(1, 2**n)


def check_transitivity(X: LevelSystem | FiniteGSet) -> list[bool]:
    """Per-level transitivity of a level system, or a single entry for a finite G-set."""
    if isinstance(X, FiniteGSet):
        return [X.is_transitive()]
    return [X.level_gset(i).is_transitive() for i in range(X.depth + 1)]


def orbit_partition_sizes(X: FiniteGSet) -> list[int]:
    return sorted(len(o) for o in X.orbits())


# -- full shift on two symbols ----------------------------------------------------

Word = tuple[int, ...]


def minimal_period(word: Sequence[int]) -> int:
    """Least p dividing len(word) such that the periodic extension has period p."""
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and all(word[i] == word[i % p] for i in range(n)):
            return p
    raise ValueError("empty word")


def shift_periodic_points(n: int) -> tuple[list[Word], list[Word]]:
    """(Fix(sigma^n), points whose stabilizer is exactly nZ), each as period-n words."""
    if n < 1:
        raise ValueError("period must be at least 1")
    fixed = [tuple(w) for w in product((0, 1), repeat=n)]
    exact = [w for w in fixed if minimal_period(w) == n]
    return fixed, exact


class ShiftSystem:
    """Z acting on {0,1}^Z by (sigma x)_i = x_{i+1}, probed through periodic points and windows.

    A periodic point is stored as one period ``w``; its coordinates are
    ``x_i = w[i mod len(w)]``.  Windows are the coordinates ``[-k, k]``.
    """

    @staticmethod
    def coordinate(word: Word, i: int) -> int:
        return word[i % len(word)]

    @classmethod
    def window(cls, word: Word, k: int) -> Word:
        return tuple(cls.coordinate(word, i) for i in range(-k, k + 1))

    @classmethod
    def shift(cls, word: Word, m: int) -> Word:
        """sigma^m applied to the periodic point, as a period word of the same length."""
        n = len(word)
        return tuple(word[(i + m) % n] for i in range(n))

    @classmethod
    def is_fixed(cls, word: Word, m: int) -> bool:
        return cls.shift(word, m) == tuple(word)

    @staticmethod
    def stabilizer_generator(word: Word) -> int:
        """The stabilizer of a periodic point is pZ with p its minimal period."""
        return minimal_period(word)

    @staticmethod
    def fixed_points(n: int) -> list[Word]:
        return shift_periodic_points(n)[0]

    @staticmethod
    def exact_points(n: int) -> list[Word]:
        return shift_periodic_points(n)[1]

    @classmethod
    def cylinder_cover(cls, points: Sequence[Word], k: int) -> int:
        """How many window-[-k, k] cylinders are needed to cover the given points."""
        return len({cls.window(w, k) for w in points})

    @staticmethod
    def cylinder_count(k: int) -> int:
        return 2 ** (2 * k + 1)

    @staticmethod
    def cylinder_measure(k: int) -> Fraction:
        """Uniform Bernoulli measure of one window-[-k, k] cylinder."""
        return Fraction(1, 2 ** (2 * k + 1))
