from __future__ import annotations

from fractions import Fraction

import pytest

from almostnormal.groups import (DihedralInfinite, FiniteSubgroup, FreeAbelian, dihedral_power)
from almostnormal.gsets import (ActionMismatch, FiniteGSet, disjoint_union, equivariant_isomorphism,
                                format_rational, from_coset_action)
from almostnormal.odometer import Cylinder, GroupChain, ShiftSystem, build_level_system
from almostnormal.perm import Permutation, all_subgroups, alternating_group, symmetric_group
from almostnormal.stabilizers import (Fixed, Inconclusive, Witness, almost_normality_report,
                                      family_conjugate_orbit, holonomy_check, key_lemma_holds,
                                      lqa_separation_level, replay_witness, stabilization_depth,
                                      stabilizer_ball_profile, stabilizer_core_check,
                                      strictly_increasing_run, urs_irs_report, xh_partition)

D = DihedralInfinite()


@pytest.fixture(scope="module")
def dls():
    chain = GroupChain.from_levels(D, [dihedral_power(D, i) for i in range(1, 9)])
    return build_level_system(chain, 8)


# -- finite G-sets ----------------------------------------------------------------------

def test_coset_action_stabilizers_are_conjugates():
    G = symmetric_group(4)
    K = G.subgroup([Permutation([1, 0, 2, 3])])
    X, reps = from_coset_action(G, K)
    assert X.size == 12 and X.is_transitive()
    for p, r in enumerate(reps):
        assert X.stabilizer(p) == K.conjugate(r)
        assert X.stabilizer(p) == X.stabilizer_by_filter(p)
    assert X.measure_is_invariant()


def test_action_mismatch_detected():
    G = symmetric_group(3)
    # both generators sent to one transposition: the 3-cycle cannot act with order 2
    bad = [Permutation([1, 0]), Permutation([1, 0])]
    with pytest.raises(ActionMismatch):
        FiniteGSet(["s0", "s1"], bad, acting=G)


def test_disjoint_union_and_isomorphism():
    G = symmetric_group(3)
    X, _ = from_coset_action(G, G.trivial())
    U = disjoint_union(X, X)
    assert U.size == 12 and len(U.orbits()) == 2
    assert sum(U.measure) == 1
    assert equivariant_isomorphism(X, X) is not None
    Y, _ = from_coset_action(G, G.subgroup([Permutation([1, 0, 2])]))
    assert equivariant_isomorphism(X, Y) is None


def test_format_rational():
    assert format_rational(Fraction(3, 6)) == "1/2"
    assert format_rational(Fraction(4, 2)) == 2


def test_stabilizer_core_is_trivial_for_effective_actions():
    G = symmetric_group(4)
    for K in all_subgroups(G):
        X, _ = from_coset_action(G, K)
        res = stabilizer_core_check(X)
        assert res["holds"]


def test_key_lemma_on_free_actions():
    G = alternating_group(4)
    X, _ = from_coset_action(G, G.trivial())
    H = G.subgroup([Permutation([1, 2, 0, 3])])
    assert key_lemma_holds(X, xh_partition(X, H).conjugates)


# -- stabilizer balls and almost normality ---------------------------------------------

def test_dihedral_stabilizer_ball_profile(dls):
    profile = stabilizer_ball_profile(dls, 4)
    sizes = {d: len(v) for d, v in profile.items()}
    # frozen: the radius-4 ball meets <a^(2^d), b> in these many elements
    assert sizes == {0: 16, 1: 8, 2: 4, 3: 2, 4: 2, 5: 2, 6: 2, 7: 2, 8: 2}
    assert set(profile[8]) == {(0, 0), (0, 1)}
    assert stabilization_depth(profile) == 3


def test_almost_normality_verdicts(dls):
    H = FiniteSubgroup(D, [(0, 1)])
    chain = dls.chain
    rep = almost_normality_report(D, H, chain, dls, [1, 2, 3, 4])
    assert rep.verdict == "evidence_no"
    assert rep.level_counts == {1: 1, 2: 2, 3: 4, 4: 8}
    # too few levels for evidence
    assert almost_normality_report(D, H, chain, dls, [1, 2]).verdict == "unknown"
    # the trivial subgroup is normal
    triv = almost_normality_report(D, FiniteSubgroup(D, []), chain)
    assert triv.verdict == "yes" and triv.conjugate_count == 1


def test_family_conjugate_orbit_caps():
    orb = family_conjugate_orbit(D, [(0, 0), (0, 1)], cap=20)
    assert not orb.closed
    Z2 = FreeAbelian(2)
    assert family_conjugate_orbit(Z2, [(0, 0)]).closed


def test_strictly_increasing_run():
    assert strictly_increasing_run([1, 2, 4, 8]) == 4
    assert strictly_increasing_run([1, 2, 2, 3]) == 2


# -- holonomy ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_dihedral_holonomy_witness(dls, n):
    v = holonomy_check(dls, (0, 1), Cylinder(n, 0), n + 2)
    assert isinstance(v, Witness)
    assert replay_witness(dls, v)
    # b fixes both level-(n+1) refinements 0 and 2^n of the identity coset; it first moves one at n+2
    assert v.refined.level == n + 2


def test_holonomy_fixed_and_inconclusive(dls):
    assert isinstance(holonomy_check(dls, (0, 0), Cylinder(2, 0), 8), Fixed)
    assert isinstance(holonomy_check(dls, (0, 0), Cylinder(2, 0), 4), Inconclusive)


def test_shift_holonomy():
    v = holonomy_check(ShiftSystem, 2, (0, 1), 5)
    assert isinstance(v, Witness) and replay_witness(ShiftSystem, v)
    assert ShiftSystem.window(v.refined, 5) == ShiftSystem.window((0, 1), 5)
    moved = holonomy_check(ShiftSystem, 1, (0, 1), 5)
    assert isinstance(moved, Witness) and moved.refined == (0, 1)


def test_finite_holonomy():
    G = symmetric_group(3)
    X, _ = from_coset_action(G, G.trivial())
    g = G.generators[0]
    assert isinstance(holonomy_check(X, g, 0), Witness)
    assert isinstance(holonomy_check(X, G.identity, 0), Fixed)


# -- blocks, LQA and stabilizer measures --------------------------------------------------

def test_lqa_separation_level():
    cylinders = {1: [0, 0, 1, 1], 2: [0, 1, 2, 3]}
    assert lqa_separation_level([0, 0, 1, 1], cylinders) == 1
    assert lqa_separation_level([0, 1, 0, 1], cylinders) == 2


def test_urs_irs_on_a_mixed_system():
    G = symmetric_group(3)
    X, _ = from_coset_action(G, G.trivial())
    Y, _ = from_coset_action(G, G.subgroup([Permutation([1, 0, 2])]))
    U = disjoint_union(X, Y).with_uniform_measure()
    U = FiniteGSet(U.labels, U.generators, U.measure, G)
    H = G.subgroup([Permutation([1, 0, 2])])
    rep = urs_irs_report(U, H)
    assert rep.irs_invariant
    assert rep.irs[G.trivial()] == Fraction(6, 9)
    assert len(rep.urs_atoms) == 4
    assert rep.flags["3"] and not rep.flags["1"] and not rep.flags["4"]
