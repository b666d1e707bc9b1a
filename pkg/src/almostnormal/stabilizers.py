"""Stabilizers, conjugate orbits, block decompositions, holonomy and stabilizer measures.

Everything here is exact on finite G-sets.  On odometer truncations the
answers are exact for the truncation; statements about the limit are only
ever reported as trends (see :func:`almost_normality_report`).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .groups import GroupFamily, SubgroupSpec, ball
from .gsets import FiniteGSet, format_rational
from .odometer import (Cylinder, GroupChain, LevelSystem, ShiftSystem, Word,
                       act_on_prefix, refinements, validate_prefix)
from .perm import PermGroup, Permutation, Subgroup, conjugate_orbit_with_reps, normalizer


class NotAlmostNormal(ValueError):
    pass


# -- stabilizers on level systems ------------------------------------------------

def level_stabilizer(ls: LevelSystem, c: Cylinder, acting_level: int | None = None) -> Subgroup:
    """Stabilizer of a level-``c.level`` coset inside the image group of ``acting_level``."""
    return ls.level_gset(c.level, acting_level).stabilizer(c.index)


def stabilizer_ball(ls: LevelSystem, x: Sequence[int], radius: int) -> list:
    """Elements of the radius ball fixing every coordinate of the prefix ``x``."""
    x = validate_prefix(ls, x)
    return [g for g in ball(ls.family, radius) if act_on_prefix(ls, g, x) == x]


def stabilizer_ball_profile(ls: LevelSystem, radius: int, depths: Sequence[int] | None = None,
                            point: Sequence[int] | None = None) -> dict[int, list]:
    """``stabilizer_ball`` of a point's prefix truncated at each depth (default: the basepoint)."""
    depths = range(ls.depth + 1) if depths is None else depths
    point = tuple(point) if point is not None else (0,) * (ls.depth + 1)
    return {d: stabilizer_ball(ls, point[: d + 1], radius) for d in depths}


def stabilization_depth(profile: dict[int, list]) -> int:
    """Least depth from which the profile equals its value at the deepest depth."""
    depths = sorted(profile)
    last = profile[depths[-1]]
    first = depths[-1]
    for d in reversed(depths):
        if profile[d] != last:
            break
        first = d
    return first


# -- conjugate orbits in a group family -------------------------------------------

@dataclass
class FamilyConjugates:
    """Conjugates ``conjugates[i] = reps[i] H reps[i]^-1`` found by BFS under the generators."""

    family: GroupFamily
    conjugates: list[frozenset]
    reps: list
    closed: bool

    def __post_init__(self):
        self.index = {C: i for i, C in enumerate(self.conjugates)}

    def locate(self, g) -> int:
        """Index of ``g H g^-1``."""
        fam = self.family
        C = frozenset(fam.conj(g, h) for h in self.conjugates[0])
        return self.index[C]


def family_conjugate_orbit(family: GroupFamily, H: Sequence, cap: int = 2000) -> FamilyConjugates:
    H0 = frozenset(H)
    conjs = [H0]
    reps = [family.identity]
    index = {H0: 0}
    queue = deque([0])
    gens = [g for _, g in family.generators]
    while queue:
        i = queue.popleft()
        for s in gens:
            C = frozenset(family.conj(s, h) for h in conjs[i])
            if C not in index:
                if len(conjs) >= cap:
                    return FamilyConjugates(family, conjs, reps, False)
                index[C] = len(conjs)
                conjs.append(C)
                reps.append(family.mul(s, reps[i]))
                queue.append(index[C])
    return FamilyConjugates(family, conjs, reps, True)


def normalizes(family: GroupFamily, g, H: frozenset) -> bool:
    return all(family.conj(g, h) in H for h in H)


def chain_certificate_level(chain: GroupChain, H: frozenset) -> int | None:
    """Least n such that every generator of the chain's level n normalizes H."""
    for n, spec in enumerate(chain.specs):
        if all(normalizes(chain.family, g, H) for g in spec.generators):
            return n
    return None


def image_subgroup(A: PermGroup, images: Sequence[Permutation]) -> Subgroup:
    return A.subgroup(images)


def subgroup_in_gset(X: FiniteGSet, family: GroupFamily, elements: Sequence, injective: bool = True) -> Subgroup:
    """The image of a finite subgroup of the family in the acting group of X."""
    imgs = {X.to_acting(family, h) for h in elements}
    if injective and len(imgs) != len(set(elements)):
        raise ValueError("subgroup does not embed in the acting group of this G-set")
    return Subgroup(X.acting, imgs)


def level_conjugate_counts(ls: LevelSystem, H: Sequence, levels: Sequence[int]) -> dict[int, int]:
    """Number of conjugates of the image of H in each level's image group."""
    out = {}
    for i in levels:
        A = ls.image_group(i)
        q = ls.quotients[i]
        K = Subgroup(A, {q.image(h) for h in H}, check=False)
        conjs, _ = conjugate_orbit_with_reps(A, K)
        out[i] = len(conjs)
    return out


def strictly_increasing_run(values: Sequence[int]) -> int:
    """Length of the longest run of strictly increasing consecutive values."""
    best = run = 1 if values else 0
    for a, b in zip(values, values[1:]):
        run = run + 1 if b > a else 1
        best = max(best, run)
    return best


@dataclass
class AlmostNormalityReport:
    verdict: str  # "yes", "evidence_no" or "unknown"
    conjugate_count: int | None
    normalizer_index: int | None
    orbit_closed: bool
    certificate_level: int | None
    coset_reps: list
    level_counts: dict[int, int]
    reason: str

    def to_json(self, family: GroupFamily) -> dict:
        return {
            "verdict": self.verdict,
            "conjugate_count": self.conjugate_count,
            "normalizer_index": self.normalizer_index,
            "orbit_closed": self.orbit_closed,
            "certificate_level": self.certificate_level,
            "coset_reps": [family.format(r) for r in self.coset_reps],
            "level_counts": {str(k): v for k, v in sorted(self.level_counts.items())},
            "reason": self.reason,
        }


def almost_normality_report(family: GroupFamily, H: SubgroupSpec, chain: GroupChain | None = None,
                            ls: LevelSystem | None = None, levels: Sequence[int] = (),
                            min_levels: int = 3, cap: int = 2000) -> AlmostNormalityReport:
    """Decide whether the finite subgroup H has finitely many conjugates.

    ``yes`` needs the BFS conjugate orbit to close and, when a chain is given,
    a chain level whose generators normalize H.  ``evidence_no`` needs the
    conjugate counts in successive level quotients to grow strictly over at
    least ``min_levels`` levels.
    """
    elems = H.elements()
    if elems is None:
        return AlmostNormalityReport("unknown", None, None, False, None, [], {},
                                     "H is not finite with an enumerable element list")
    Hs = frozenset(elems)
    orbit = family_conjugate_orbit(family, elems, cap)
    cert = chain_certificate_level(chain, Hs) if chain is not None else None
    counts = level_conjugate_counts(ls, elems, levels) if ls is not None and levels else {}
    if orbit.closed and (chain is None or cert is not None):
        n = len(orbit.conjugates)
        how = "conjugate orbit closed" + (f"; chain level {cert} normalizes H" if cert is not None else "")
        return AlmostNormalityReport("yes", n, n, True, cert, orbit.reps, counts, how)
    series = [counts[i] for i in sorted(counts)]
    if len(series) >= min_levels and strictly_increasing_run(series) >= min_levels:
        return AlmostNormalityReport("evidence_no", None, None, orbit.closed, cert, [], counts,
                                     f"conjugate counts grow strictly over {len(series)} levels")
    if orbit.closed:
        reason = "conjugate orbit closed but no chain level normalizes H"
    else:
        reason = f"conjugate orbit exceeded cap {cap} and level counts show no strict growth"
    return AlmostNormalityReport("unknown", None, None, orbit.closed, cert, [], counts, reason)


# -- block decompositions ------------------------------------------------------------

@dataclass
class BlockMap:
    """A map from points to the conjugates of H (equivalently to G/N_G(H))."""

    labels: list[int]
    block_count: int
    equivariant: bool
    conjugate_table: dict[str, list[int]]  # generator label -> permutation of conjugate indices


def conjugation_table(X: FiniteGSet, conjs: Sequence[Subgroup]) -> dict[str, list[int]]:
    index = {K: i for i, K in enumerate(conjs)}
    out = {}
    for lab, s in zip(X.labels, X.acting.generators):
        out[lab] = [index[K.conjugate(s)] for K in conjs]
    return out


def _equivariant(X: FiniteGSet, labels: Sequence[int], table: dict[str, list[int]]) -> bool:
    return all(labels[p(x)] == table[lab][labels[x]]
               for lab, p in X.gens.items() for x in range(X.size))


@dataclass
class XHPartition:
    conjugates: list[Subgroup]
    reps: list[Permutation]
    exact_block: list[int | None]
    containing: list[tuple[int, ...]]
    blocks: list[list[int]]
    exceptional: list[int]
    phi: BlockMap | None
    transitive: bool
    lqa_level: int | None

    @property
    def xh(self) -> list[int]:
        return [x for x, b in enumerate(self.exact_block) if b is not None]

    @property
    def xh_empty(self) -> bool:
        return not self.xh

    @property
    def block_count(self) -> int:
        return sum(1 for b in self.blocks if b)

    @property
    def normalizer_index(self) -> int:
        return len(self.conjugates)

    def to_json(self) -> dict:
        return {
            "normalizer_index": self.normalizer_index,
            "block_count": self.block_count,
            "block_sizes": [len(b) for b in self.blocks],
            "xh_size": len(self.xh),
            "xh_empty": self.xh_empty,
            "exceptional": self.exceptional,
            "transitive": self.transitive,
            "phi_defined": self.phi is not None,
            "phi_equivariant": None if self.phi is None else self.phi.equivariant,
            "lqa_level": self.lqa_level,
        }


def lqa_separation_level(labels: Sequence[int], cylinders: dict[int, Sequence[int]]) -> int | None:
    """Least level at which no cylinder holds points of two different blocks."""
    for level in sorted(cylinders):
        seen: dict[int, int] = {}
        ok = True
        for x, c in enumerate(cylinders[level]):
            if seen.setdefault(c, labels[x]) != labels[x]:
                ok = False
                break
        if ok:
            return level
    return None


def xh_partition(X: FiniteGSet, H: Subgroup, cylinders: dict[int, Sequence[int]] | None = None) -> XHPartition:
    """Classify points by whether their stabilizer equals or contains a conjugate of H.

    In a finite G-set every subset is closed, so the block closures are the
    blocks themselves and ``exceptional`` collects the points lying in two of them.
    """
    conjs, reps = conjugate_orbit_with_reps(X.acting, H)
    conjs, reps = list(conjs), list(reps)
    index = {K: i for i, K in enumerate(conjs)}
    stabs = X.stabilizers()
    exact = [index.get(S) for S in stabs]
    containing = [tuple(i for i, K in enumerate(conjs) if K <= S) for S in stabs]
    blocks = [[] for _ in conjs]
    for x, b in enumerate(exact):
        if b is not None:
            blocks[b].append(x)
    membership = [0] * X.size
    for b in blocks:
        for x in b:
            membership[x] += 1
    exceptional = [x for x, m in enumerate(membership) if m >= 2]
    phi = None
    if all(b is not None for b in exact):
        table = conjugation_table(X, conjs)
        phi = BlockMap(list(exact), len(conjs), _equivariant(X, exact, table), table)
    lqa = None
    if phi is not None and cylinders:
        lqa = lqa_separation_level(phi.labels, cylinders)
    return XHPartition(conjs, reps, exact, containing, blocks, exceptional, phi,
                       X.is_transitive(), lqa)


def double_conjugate_points(X: FiniteGSet, H: Subgroup) -> list[int]:
    """Points whose orbit meets X_H and whose stabilizer contains two distinct conjugates of H."""
    part = xh_partition(X, H)
    xh = set(part.xh)
    bad = []
    for orb in X.orbits():
        if xh.isdisjoint(orb):
            continue
        bad.extend(x for x in orb if len(part.containing[x]) >= 2)
    return sorted(bad)


def translation_property(X: FiniteGSet, part: XHPartition) -> bool:
    """``s . X_H(g_i) = X_H(s g_i)`` for every generator s, as point sets."""
    table = conjugation_table(X, part.conjugates)
    for lab, p in X.gens.items():
        for i, block in enumerate(part.blocks):
            if sorted(p(x) for x in block) != sorted(part.blocks[table[lab][i]]):
                return False
    return True


def odometer_block_map(ls: LevelSystem, level: int, conjugates: FamilyConjugates) -> BlockMap:
    """``rG_level -> r H r^-1``; well defined once ``G_level`` normalizes H."""
    fam = ls.family
    if not conjugates.closed:
        raise NotAlmostNormal("H has too many conjugates for a block map")
    H = conjugates.conjugates[0]
    spec = ls.chain.specs[level]
    if not all(normalizes(fam, g, H) for g in spec.generators):
        raise NotAlmostNormal(f"level {level} of the chain does not normalize H")
    q = ls.quotients[level]
    labels = [conjugates.locate(r) for r in q.representatives]
    table = {lab: [conjugates.locate(fam.mul(s, r)) for r in conjugates.reps]
             for lab, s in fam.generators}
    X = ls.level_gset(level)
    return BlockMap(labels, len(conjugates.conjugates), _equivariant(X, labels, table), table)


def level_cylinders(ls: LevelSystem, level: int) -> dict[int, list[int]]:
    """For each level i <= level, the level-i cylinder of every level-``level`` point."""
    out = {level: list(range(ls.size(level)))}
    for i in range(level - 1, -1, -1):
        proj = ls.projections[i]
        out[i] = [proj[c] for c in out[i + 1]]
    return out


@dataclass
class ShiftXHReport:
    period: int
    fixed_count: int
    exact_count: int
    windows: list[int]
    cover_counts: list[int]
    cylinder_counts: list[int]
    dense: bool

    def to_json(self) -> dict:
        return {"period": self.period, "fixed_count": self.fixed_count,
                "exact_count": self.exact_count, "windows": self.windows,
                "cover_counts": self.cover_counts, "cylinder_counts": self.cylinder_counts,
                "status": "X_H dense" if self.dense else "X_H not dense"}


def shift_xh_report(n: int, windows: Sequence[int] = range(0, 6)) -> ShiftXHReport:
    """X_H for H = nZ in the full shift: finite, so its cylinder cover does not grow."""
    fixed = ShiftSystem.fixed_points(n)
    exact = ShiftSystem.exact_points(n)
    covers = [ShiftSystem.cylinder_cover(exact, k) for k in windows]
    counts = [ShiftSystem.cylinder_count(k) for k in windows]
    # a dense set meets every cylinder, so its cover count would equal the cylinder count
    dense = all(c == t for c, t in zip(covers, counts))
    return ShiftXHReport(n, len(fixed), len(exact), list(windows), covers, counts, dense)


# -- holonomy ------------------------------------------------------------------------

@dataclass(frozen=True)
class Fixed:
    cylinder: Any
    checked_level: int


@dataclass(frozen=True)
class Witness:
    element: Any
    cylinder: Any
    refined: Any
    moved_to: Any
    trace: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Inconclusive:
    horizon: int
    reason: str


HolonomyVerdict = Fixed | Witness | Inconclusive


def holonomy_check(system, g, cylinder, horizon: int = 0) -> HolonomyVerdict:
    """Does g fix a whole neighbourhood of the cylinder's point?

    * :class:`FiniteGSet`: ``cylinder`` is a point (points are open), ``g`` an acting element.
    * :class:`LevelSystem`: ``cylinder`` is a :class:`Cylinder`, ``g`` a family element.
    * :class:`ShiftSystem` (or the class itself): ``cylinder`` is a periodic word, ``g`` a shift amount.
    """
    if isinstance(system, FiniteGSet):
        y = system.act(g, cylinder)
        if y == cylinder:
            return Fixed(cylinder, 0)
        return Witness(g, cylinder, cylinder, y)
    if isinstance(system, LevelSystem):
        return _holonomy_levels(system, g, cylinder, horizon)
    if system is ShiftSystem or isinstance(system, ShiftSystem):
        return _holonomy_shift(g, tuple(cylinder), horizon)
    raise TypeError(f"unsupported system {type(system).__name__}")


def _holonomy_levels(ls: LevelSystem, g, c: Cylinder, horizon: int) -> HolonomyVerdict:
    top = min(horizon, ls.depth)
    fam = ls.family
    for m in range(c.level, top + 1):
        q = ls.quotients[m]
        for p in refinements(ls, c, m):
            y = q.act(g, p)
            if y != p:
                trace = {"word": fam.word(g), "level": m, "coset": p, "image": y,
                         "coset_rep": fam.format(q.representatives[p])}
                return Witness(g, c, Cylinder(m, p), Cylinder(m, y), trace)
    if horizon >= ls.depth:
        return Fixed(c, top)
    return Inconclusive(horizon, f"all refinements fixed through level {top} of {ls.depth}")


def _holonomy_shift(m: int, x: Word, horizon: int) -> HolonomyVerdict:
    S = ShiftSystem
    if not S.is_fixed(x, m):
        return Witness(m, x, x, S.shift(x, m))
    if m == 0:
        return Fixed(x, horizon)
    k = horizon
    p = 2 * k + 4
    while True:
        positions = range(-k - 1, -k - 1 + p)
        w = [0] * p
        for j in positions:
            v = S.coordinate(x, j)
            w[j % p] = 1 - v if j == k + 1 else v
        y = tuple(w)
        if S.window(y, k) == S.window(x, k) and not S.is_fixed(y, m):
            trace = {"shift": m, "window": [-k, k], "point_period": list(y),
                     "moved_period": list(S.shift(y, m))}
            return Witness(m, x, y, S.shift(y, m), trace)
        p += 1


def replay_witness(system, w: Witness) -> bool:
    """Re-check that a witness really exhibits a moved refinement."""
    if isinstance(system, LevelSystem):
        q = system.quotients[w.refined.level]
        inside = w.refined.index in refinements(system, w.cylinder, w.refined.level)
        return inside and q.act(w.element, w.refined.index) == w.moved_to.index != w.refined.index
    if system is ShiftSystem or isinstance(system, ShiftSystem):
        k = w.trace.get("window", [0, 0])[1]
        y = tuple(w.refined)
        return (ShiftSystem.window(y, k) == ShiftSystem.window(tuple(w.cylinder), k)
                and not ShiftSystem.is_fixed(y, w.element))
    if isinstance(system, FiniteGSet):
        return system.act(w.element, w.refined) == w.moved_to != w.refined
    raise TypeError(type(system).__name__)


# -- stabilizer measures ------------------------------------------------------------------

class AtomicSubgroupMeasure:
    def __init__(self, weights: dict[Subgroup, Fraction]):
        self.weights = dict(weights)
        if any(w <= 0 for w in self.weights.values()):
            raise ValueError("atom weights must be positive")
        if sum(self.weights.values()) != 1:
            raise ValueError("atom weights must sum to 1")

    @property
    def support(self) -> list[Subgroup]:
        return list(self.weights)

    def __getitem__(self, K: Subgroup) -> Fraction:
        return self.weights.get(K, Fraction(0))

    def is_conjugation_invariant(self, generators: Sequence[Permutation]) -> bool:
        return all(self[K.conjugate(s)] == w for s in generators for K, w in self.weights.items())


@dataclass
class URSIRSReport:
    urs_atoms: list[Subgroup]
    irs: AtomicSubgroupMeasure
    irs_invariant: bool
    flags: dict[str, bool] | None

    def to_json(self) -> dict:
        out = {"urs_atom_count": len(self.urs_atoms),
               "urs_atom_orders": [K.order() for K in self.urs_atoms],
               "irs_weights": [format_rational(self.irs[K]) for K in self.urs_atoms],
               "irs_invariant": self.irs_invariant}
        if self.flags is not None:
            out["flags"] = dict(self.flags)
        return out


def urs_irs_report(X: FiniteGSet, H: Subgroup | None = None) -> URSIRSReport:
    """Stabilizer atoms, the pushed-forward measure on them, and the six summary flags for H.

    Flags (all computed directly from the finite system):
      1. mu(X_H) = 1
      2. the atom H has positive weight and the support is exactly Conj(H)
      3. some point of X_H has trivial holonomy
      4. X_H is exactly the set of points with trivial holonomy
      5. H has finitely many conjugates
      6. the set of stabilizers (the URS of a transitive finite system) is Conj(H)
    """
    if X.measure is None:
        raise ValueError("urs_irs_report needs a measure")
    stabs = X.stabilizers()
    atoms: dict[Subgroup, Fraction] = {}
    for x, S in enumerate(stabs):
        atoms[S] = atoms.get(S, Fraction(0)) + X.measure[x]
    positive = {K: w for K, w in atoms.items() if w > 0}
    irs = AtomicSubgroupMeasure(positive)
    urs = list(atoms)
    invariant = irs.is_conjugation_invariant(X.acting.generators)
    flags = None
    if H is not None:
        part = xh_partition(X, H)
        conj_set = set(part.conjugates)
        xh = part.xh
        mu_xh = sum((X.measure[x] for x in xh), Fraction(0))
        trivial_holonomy = [x for x in range(X.size)
                            if all(isinstance(holonomy_check(X, a, x), Fixed) for a in stabs[x].generators)]
        flags = {
            "1": mu_xh == 1,
            "2": irs[H] > 0 and set(irs.support) == conj_set,
            "3": any(x in set(trivial_holonomy) for x in xh),
            "4": sorted(xh) == trivial_holonomy,
            "5": len(part.conjugates) * normalizer(X.acting, H).order() == X.acting.order(),
            "6": set(urs) == conj_set,
        }
    return URSIRSReport(urs, irs, invariant, flags)


def key_lemma_holds(X: FiniteGSet, conjugates: Sequence[Subgroup]) -> bool:
    """Every stabilizer meets every conjugate of H trivially."""
    return all(len(S.intersection(K)) == 1 for S in X.stabilizers() for K in conjugates)


def stabilizer_core_check(X: FiniteGSet) -> dict:
    """For an effective transitive action, the normal core of a point stabilizer is trivial.

    The core (the intersection of all stabilizers) is the kernel of the action,
    so this is exactly effectiveness read through the stabilizers.
    """
    stabs = X.stabilizers()
    core = stabs[0].members
    for S in stabs[1:]:
        core = core & S.members
    kernel = [a for a in X.acting.elements if X.rho(a).is_identity()]
    effective = len(kernel) == 1
    return {"transitive": X.is_transitive(), "effective": effective,
            "core_order": len(core), "holds": (not effective) or len(core) == 1}
