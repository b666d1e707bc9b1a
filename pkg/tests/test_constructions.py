from __future__ import annotations

from fractions import Fraction

import pytest

from almostnormal.cli import factor_at, gamma_candidates
from almostnormal.constructions import (EquivariantMap, UnionFind, block_gset, build_extension, build_factor,
                                        coset_projection, fiber_lemma_check, find_free_complement,
                                        round_trip, sufficient_condition_shadow, verify_universal_property)
from almostnormal.groups import subgroup_from_json
from almostnormal.gsets import equivariant_isomorphism, from_coset_action
from almostnormal.perm import Permutation, all_subgroups, alternating_group, symmetric_group
from almostnormal.stabilizers import xh_partition


def test_union_find_classes_are_deterministic():
    uf = UnionFind(6)
    uf.union(4, 1)
    uf.union(5, 3)
    uf.union(3, 1)
    assert uf.classes() == [[0], [1, 3, 4, 5], [2]]


@pytest.mark.parametrize("G", [symmetric_group(4), alternating_group(4), alternating_group(5)])
def test_factor_of_free_action_is_coset_space(G):
    """Collapsing the regular action by H gives G/H, with fibers of size |H|."""
    X, _ = from_coset_action(G, G.trivial())
    t = X.transversal(0)
    for H in all_subgroups(G):
        conjs = list(xh_partition(from_coset_action(G, H)[0], H).conjugates)
        # the point t(0) gets the block of t H t^-1
        blocks = [conjs.index(H.conjugate(t[p])) for p in range(X.size)]
        f = build_factor(X, blocks, conjs)
        assert set(f.fiber_sizes) == {H.order()}
        assert f.fiber_formula_ok and f.stabilizer_product_ok and f.phi_factors
        assert equivariant_isomorphism(f.Y, from_coset_action(G, H)[0]) is not None


def test_block_map_must_be_equivariant():
    G = symmetric_group(3)
    X, _ = from_coset_action(G, G.trivial())
    H = G.subgroup([Permutation([1, 0, 2])])
    conjs = list(xh_partition(from_coset_action(G, H)[0], H).conjugates)
    with pytest.raises(ValueError):
        build_factor(X, [0] * X.size, conjs)


def test_coset_projection_and_fiber_lemma():
    G = symmetric_group(4)
    K = G.trivial()
    L = G.subgroup([Permutation([1, 2, 0, 3])])
    pi = coset_projection(G, K, L)
    assert pi.commutes() and pi.is_surjective() and set(pi.fiber_sizes()) == {3}
    assert pi.pushforward([Fraction(1, 24)] * 24) == [Fraction(1, 8)] * 8
    r = fiber_lemma_check(pi, 0)
    assert r.m == 3 and r.indices == [3, 3, 3] and r.bound_holds
    assert r.free_point and r.injective and r.regular
    with pytest.raises(ValueError):
        coset_projection(G, L, K)


def test_equivariant_map_detects_non_commuting():
    G = symmetric_group(3)
    X, _ = from_coset_action(G, G.trivial())
    Y, _ = from_coset_action(G, G.subgroup([Permutation([1, 0, 2])]))
    assert not EquivariantMap(X, Y, [0] * 6).is_surjective()
    assert not EquivariantMap(X, Y, [0, 1, 2, 0, 1, 2]).commutes()


# -- the Z x A5 system -------------------------------------------------------------------

def test_factor_sizes_by_level(zxa5_ctx):
    # frozen: |X| = 60 * 2^n and |Y| = |X| / 3 at levels 1..3
    for n, (xs, ys) in {1: (120, 40), 2: (240, 80), 3: (480, 160)}.items():
        X, bm, conjs, f = factor_at(zxa5_ctx, n)
        assert (X.size, f.Y.size) == (xs, ys)
        assert bm.block_count == 10 and bm.equivariant


def test_free_complement_search(zxa5_ctx):
    search = find_free_complement(zxa5_ctx.family, zxa5_ctx.H_elements, gamma_candidates(zxa5_ctx))
    assert search.found is not None and search.found.index == 60 and search.found.valid
    whole = next(c for c in search.searched if c.name == "whole")
    assert not whole.meets_trivially


def test_extension_round_trip_and_universal_property(zxa5_ctx):
    X, bm, conjs, f = factor_at(zxa5_ctx, 1)
    gamma = subgroup_from_json(zxa5_ctx.family, {"product": [{"whole": None}, {"trivial": None}]})
    ext = build_extension(f.Y, 0, zxa5_ctx.family, zxa5_ctx.H_elements, gamma)
    assert ext.free_over_yh and ext.max_fiber == 3 and ext.X.size == 120
    assert ext.measure_invariant and ext.product_measure_invariant
    assert sufficient_condition_shadow(ext, f)
    rt = round_trip(ext, f, zxa5_ctx.family, zxa5_ctx.conjugates)
    assert rt.isomorphism is not None and rt.preimage_equals_free
    fl = fiber_lemma_check(ext.pi, 0)
    assert fl.bound_holds and fl.regular

    B = block_gset(X, conjs)
    up = verify_universal_property(f, B, bm.labels, list(range(10)))
    assert up.psi == f.phi_tilde and up.psi_equivariant
    up2 = verify_universal_property(f, X, list(range(X.size)), bm.labels)
    assert up2.witness == (0, 2) and not up2.condition_ii


def test_extension_rejects_bad_gamma(zxa5_ctx):
    X, bm, conjs, f = factor_at(zxa5_ctx, 1)
    whole = subgroup_from_json(zxa5_ctx.family, {"whole": None})
    with pytest.raises(ValueError):
        build_extension(f.Y, 0, zxa5_ctx.family, zxa5_ctx.H_elements, whole)
