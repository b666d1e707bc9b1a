from __future__ import annotations

import pytest

from almostnormal.groups import (DihedralInfinite, DirectProduct, FamilyMismatch, FinitePerm, FreeAbelian,
                                 GeneratedSubgroup, IndexCapExceeded, Lattice, Membership, MissingOracle,
                                 ball, dihedral_power, family_from_json, hermite_normal_form, is_normal_spec,
                                 normal_core, quotient_by_subgroup, subgroup_from_json, subgroup_membership)
from almostnormal.perm import Permutation

D = DihedralInfinite()
A5 = FinitePerm([Permutation([1, 2, 0, 3, 4]), Permutation([1, 2, 3, 4, 0])], ["s", "t"])
ZA5 = DirectProduct(FreeAbelian(1, ["x"]), A5)


def test_dihedral_relations():
    a, b = (1, 0), (0, 1)
    assert D.mul(D.mul(b, a), b) == D.inv(a)
    assert D.mul(b, b) == D.identity
    assert D.evaluate(["a", "a", "b", "a^-1"]) == D.mul(D.mul((2, 0), b), D.inv(a))


@pytest.mark.parametrize("family,radius,size", [(D, 2, 8), (D, 4, 16), (FreeAbelian(1), 3, 7),
                                                (FreeAbelian(2), 2, 13)])
def test_ball_sizes(family, radius, size):
    assert len(ball(family, radius)) == size


def test_words_evaluate_back():
    for g in ball(D, 4):
        assert D.evaluate(D.word(g)) == g
    for g in ball(ZA5, 2):
        assert ZA5.evaluate(ZA5.word(g)) == g


@pytest.mark.parametrize("i", range(0, 7))
def test_dihedral_quotient_index(i):
    q = quotient_by_subgroup(D, dihedral_power(D, i))
    assert q.index == 2**i
    assert q.satisfies_relations()
    assert q.coset_of(D.identity) == 0


def test_dihedral_membership():
    H = dihedral_power(D, 1)
    assert not H.contains((1, 0))
    assert H.contains((2, 0)) and H.contains((0, 1)) and H.contains((4, 1))
    assert not H.contains((1, 1))


def test_hermite_normal_form_and_lattice():
    assert hermite_normal_form([[2, 0], [0, 2], [2, 2]], 2) == [[2, 0], [0, 2]]
    L = Lattice(FreeAbelian(2), [[2, 0], [0, 2]])
    assert not L.contains((3, 1)) and L.contains((4, -2))
    assert quotient_by_subgroup(FreeAbelian(2), L).index == 4


def test_direct_product_quotient():
    spec = subgroup_from_json(ZA5, {"product": [{"lattice": [[2]]}, {"trivial": None}]})
    q = quotient_by_subgroup(ZA5, spec)
    assert q.index == 120
    assert q.satisfies_relations()


def test_index_cap():
    with pytest.raises(IndexCapExceeded):
        quotient_by_subgroup(D, dihedral_power(D, 10), index_cap=100)


def test_family_json_round_trip():
    for fam in (D, FreeAbelian(2, ["u", "v"]), A5, ZA5):
        assert family_from_json(fam.to_json()) == fam


def test_label_collision_rejected():
    with pytest.raises(ValueError):
        DirectProduct(FreeAbelian(1, ["s"]), A5)


def test_spec_family_mismatch():
    with pytest.raises(FamilyMismatch):
        subgroup_from_json(FreeAbelian(1), {"dihedral_power": 2})
    with pytest.raises(ValueError):
        subgroup_from_json(D, {"nonsense": 1})


def test_generated_subgroup_membership_is_tri_state():
    H = GeneratedSubgroup(D, [["a", "a"], ["b"]], radius=6)
    assert subgroup_membership(H, (2, 1)) is Membership.YES
    assert subgroup_membership(H, (1, 0)) in (Membership.NO_WITHIN_BALL, Membership.UNKNOWN)
    with pytest.raises(MissingOracle):
        quotient_by_subgroup(D, H)


def test_finite_subgroup_and_normality():
    H = subgroup_from_json(ZA5, {"finite_generators": [[[0], [1, 2, 0, 3, 4]]]})
    assert len(H.elements()) == 3
    assert not is_normal_spec(H)
    kernel = subgroup_from_json(ZA5, {"product": [{"whole": None}, {"trivial": None}]})
    assert is_normal_spec(kernel)
    assert not is_normal_spec(dihedral_power(D, 2))
    core = normal_core(dihedral_power(D, 2))
    assert core is not None and is_normal_spec(core)
