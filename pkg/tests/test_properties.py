"""Property tests for the structural invariants."""

from __future__ import annotations

import json
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from almostnormal.constructions import coset_projection, fiber_lemma_check, is_invariant
from almostnormal.groups import (DihedralInfinite, FreeAbelian, Lattice, dihedral_power,
                                 quotient_by_subgroup)
from almostnormal.gsets import from_coset_action
from almostnormal.odometer import (GroupChain, act_on_prefix, build_level_system, distance, prefix_of)
from almostnormal.perm import Permutation, all_subgroups, symmetric_group
from almostnormal.report import Report, exact

S4 = symmetric_group(4)
S4_SUBGROUPS = all_subgroups(S4)
D = DihedralInfinite()
DLS = build_level_system(GroupChain.from_levels(D, [dihedral_power(D, i) for i in range(1, 7)]), 6)

perms5 = st.permutations(list(range(5))).map(Permutation)
dihedral_elements = st.tuples(st.integers(-50, 50), st.integers(0, 1))
subgroups = st.sampled_from(S4_SUBGROUPS)
s4_elements = st.sampled_from(S4.elements)


@given(perms5, perms5, perms5)
def test_permutation_group_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert (p * p.inverse()).is_identity() and (p.inverse() * p).is_identity()
    assert (p * q).inverse() == q.inverse() * p.inverse()
    assert all((p * q)(x) == p(q(x)) for x in range(5))


@given(dihedral_elements, dihedral_elements, dihedral_elements)
def test_dihedral_group_axioms(g, h, k):
    assert D.mul(D.mul(g, h), k) == D.mul(g, D.mul(h, k))
    assert D.mul(g, D.inv(g)) == D.identity
    assert D.evaluate(D.word(g)) == g


@given(st.integers(0, 6), dihedral_elements, dihedral_elements)
def test_coset_action_is_left_multiplication(i, g, h):
    q = quotient_by_subgroup(D, dihedral_power(D, i))
    assert q.coset_of(D.mul(g, h)) == q.act(g, q.coset_of(h))


@given(st.lists(st.integers(-6, 6), min_size=2, max_size=2), st.integers(-3, 3), st.integers(-3, 3))
def test_lattice_membership_is_coset_invariant(v, a, b):
    L = Lattice(FreeAbelian(2), [[2, 1], [0, 3]])
    shifted = (v[0] + 2 * a, v[1] + a + 3 * b)
    assert L.contains(tuple(v)) == L.contains(shifted)
    assert L.coset_key(tuple(v)) == L.coset_key(shifted)


@given(subgroups, s4_elements)
def test_orbit_stabilizer_and_conjugate_stabilizers(K, g):
    X, _ = from_coset_action(S4, K)
    assert X.size * K.order() == S4.order()
    for x in range(X.size):
        assert X.stabilizer(X.act(g, x)) == X.stabilizer(x).conjugate(g)
    assert is_invariant(X, X.measure)


@settings(max_examples=60)
@given(subgroups, subgroups)
def test_fiber_lemma_bound(K, L):
    if not K <= L:
        K, L = L.intersection(K), L
    pi = coset_projection(S4, K, L)
    assert pi.commutes()
    assert len(set(pi.fiber_sizes())) == 1
    for y in range(pi.target.size):
        assert fiber_lemma_check(pi, y).bound_holds


@given(dihedral_elements, dihedral_elements, dihedral_elements, dihedral_elements)
def test_odometer_metric_is_an_invariant_ultrametric(a, b, c, g):
    x, y, z = (prefix_of(DLS, e) for e in (a, b, c))
    assert distance(x, z) <= max(distance(x, y), distance(y, z))
    assert distance(x, y) == distance(y, x)
    assert distance(act_on_prefix(DLS, g, x), act_on_prefix(DLS, g, y)) == distance(x, y)


@given(st.lists(st.fractions(min_value=0, max_value=5), max_size=5))
def test_report_serialization_is_deterministic(values):
    r = Report("verify all", {"values": values})
    r.add(exact("values", "claim", True, {"sum": sum(values, Fraction(0))}))
    text = r.dumps()
    assert text == r.dumps()
    doc = json.loads(text)
    assert all(isinstance(v, (int, str)) for v in doc["config"]["values"])
