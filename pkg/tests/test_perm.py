from __future__ import annotations

from itertools import permutations

import pytest

from almostnormal.perm import (EnumerationCapExceeded, PermGroup, Permutation, Subgroup, all_subgroups,
                               alternating_group, centralizer_center, closure, conjugate_orbit,
                               conjugate_orbit_with_reps, conjugation_action_hom, cyclic_group,
                               dihedral_group, is_normal, is_regular, named_groups, normalizer,
                               orbit_and_stabilizer, quaternion_group, subgroup_classes, symmetric_group)


def brute_subgroups(G: PermGroup) -> set[frozenset]:
    """Every subgroup of a small group is generated by at most two elements here."""
    els = G.elements
    out = set()
    for a in els:
        for b in els:
            out.add(frozenset(closure([a, b], G.degree)))
    return out


def test_composition_is_right_to_left():
    p = Permutation([1, 2, 0])
    q = Permutation([1, 0, 2])
    assert (p * q)(0) == p(q(0)) == 2
    assert (p * q).images == (2, 1, 0)


def test_inverse_and_powers():
    p = Permutation.from_cycles(5, (0, 1, 2), (3, 4))
    assert (p * p.inverse()).is_identity()
    assert (p ** 6).is_identity() and not (p ** 3).is_identity()
    assert p ** -1 == p.inverse()
    assert p.cycles() == [(0, 1, 2), (3, 4)]


def test_rejects_non_permutation():
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])
    with pytest.raises(ValueError):
        Permutation([0, 1]) * Permutation([0, 1, 2])


@pytest.mark.parametrize("name,order", [("C4", 4), ("C6", 6), ("S3", 6), ("D4", 8), ("Q8", 8),
                                        ("D6", 12), ("A4", 12), ("S4", 24), ("A5", 60)])
def test_named_group_orders(name, order):
    assert named_groups()[name].order() == order


# subgroup counts and conjugacy class counts, frozen from a two-generator brute-force closure
@pytest.mark.parametrize("G,subgroups,classes", [
    (symmetric_group(3), 6, 4), (dihedral_group(4), 10, 8), (alternating_group(4), 10, 5),
    (symmetric_group(4), 30, 11), (quaternion_group(), 6, 6), (cyclic_group(6), 4, 4),
])
def test_subgroup_lattice_counts(G, subgroups, classes):
    subs = all_subgroups(G)
    assert len(subs) == subgroups
    assert {S.members for S in subs} == brute_subgroups(G)
    assert len(subgroup_classes(G, subs)) == classes


def test_a5_subgroup_counts():
    A5 = alternating_group(5)
    subs = all_subgroups(A5)
    assert len(subs) == 59
    assert len(subgroup_classes(A5, subs)) == 9


def test_orbit_stabilizer():
    G = symmetric_group(4)
    orb, stab = orbit_and_stabilizer(G, 0)
    assert orb == frozenset(range(4)) and stab.order() == 6


def test_normalizer_matches_definition():
    G = symmetric_group(4)
    for H in all_subgroups(G):
        N = normalizer(G, H)
        brute = {g for g in G.elements if H.conjugate(g) == H}
        assert N.members == frozenset(brute)
        conjs, core = conjugate_orbit(G, H)
        assert len(conjs) * N.order() == G.order()
        assert is_normal(G, core)


def test_conjugate_reps_index_conjugates():
    G = alternating_group(5)
    H = G.subgroup([Permutation([1, 2, 0, 3, 4])])
    conjs, reps = conjugate_orbit_with_reps(G, H)
    assert len(conjs) == 10
    assert reps[0].is_identity() and conjs[0] == H
    assert all(H.conjugate(r) == K for K, r in zip(conjs, reps))


def test_centralizer_and_center():
    D4 = dihedral_group(4)
    Z, C = centralizer_center(D4, D4.whole())
    assert Z.order() == 2 and C.order() == 2
    S3 = symmetric_group(3)
    Z, C = centralizer_center(S3, S3.whole())
    assert Z.order() == 1


def test_regularity():
    assert is_regular(cyclic_group(4).whole())
    assert not is_regular(symmetric_group(3).whole())


def test_conjugation_action_kernel():
    G = symmetric_group(4)
    H = G.subgroup([Permutation([1, 0, 2, 3])])
    act = conjugation_action_hom(G, H)
    assert len(act.conjugates) == 6
    assert act.image.order() == 24 and act.kernel.order() == 1
    assert act.hypothesis_holds


def test_subgroup_check_and_cap():
    G = symmetric_group(3)
    with pytest.raises(ValueError):
        Subgroup(G, [Permutation([1, 0, 2])])  # missing identity
    big = PermGroup(symmetric_group(6).generators, cap=100)
    with pytest.raises(EnumerationCapExceeded):
        big.order()


def test_symmetric_group_is_everything():
    assert {p.images for p in symmetric_group(4).elements} == set(permutations(range(4)))
