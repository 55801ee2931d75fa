import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from sympair import config
from sympair.catalog import build
from sympair.errors import CapExceededError, NotAutomorphismError, NotNormalError
from sympair.groups import (AbelianGroup, Automorphism, CayleyGroup, PermutationGroup,
                            ProductGroup, Subgroup, center, close_generators,
                            conjugacy_classes, derived_subgroup, double_cosets,
                            find_involutive_automorphisms, fixed_subgroup, generate_subgroup,
                            inner_automorphism, normal_closure, p_radical, quotient_group,
                            sylow_subgroup)

SMALL = ["symmetric:3", "symmetric:4", "quaternion:8", "dihedral:4", "dihedral:6", "gl:2:3",
         "sl:2:3", "heisenberg:3", "frobenius:7:3", "alternating:4", "dicyclic:3",
         "abelian:2:4", "product:(symmetric:3),(cyclic:2)",
         "semidirect:(heisenberg:3),(cyclic:2):0", "double:(symmetric:3)"]


def perm(*cycles, n=3):
    p = list(range(n))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            p[a] = b
    return p


# ------------------------------------------------------------------ closure

def test_empty_generators_give_trivial_group():
    G = close_generators([], degree=3)
    assert G.order == 1


def test_s3_from_transposition_and_3_cycle():
    G = close_generators([perm((0, 1)), perm((0, 1, 2))], degree=3)
    assert G.order == 6
    assert not G.is_abelian()


def test_sl23_and_gl23_from_generators():
    # both generators have determinant 1
    G = close_generators([[[1, 1], [0, 1]], [[0, 1], [2, 0]]], backend="matrix", p=3)
    assert G.order == 24
    G = close_generators([[[1, 1], [0, 1]], [[0, 1], [1, 0]]], backend="matrix", p=3)
    assert G.order == 48


def test_closure_cap():
    with pytest.raises(CapExceededError):
        close_generators([perm((0, 1), n=6), perm((0, 1, 2, 3, 4, 5), n=6)], degree=6, cap=100)


@pytest.mark.parametrize("spec", SMALL)
def test_group_axioms(spec):
    G = build(spec)
    T = oracles.table(G)
    n = G.order
    assert (T[0] == np.arange(n)).all() and (T[:, 0] == np.arange(n)).all()
    assert (T[np.arange(n), G.inv] == 0).all()
    # every row is a permutation (Latin square)
    assert all(np.unique(T[i]).size == n for i in range(n))
    rng = np.random.default_rng(1)
    a, b, c = rng.integers(0, n, (3, 300))
    assert np.array_equal(G.mul(G.mul(a, b), c), G.mul(a, G.mul(b, c)))


@given(st.lists(st.integers(0, 47), min_size=3, max_size=3))
def test_gl23_associativity_property(xs):
    G = build("gl:2:3")
    a, b, c = xs
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))


@given(st.lists(st.integers(1, 12), min_size=1, max_size=3))
@settings(max_examples=40, deadline=None)
def test_abelian_group_order_and_exponent(mods):
    G = AbelianGroup(mods)
    assert G.order == int(np.prod(mods))
    assert G.is_abelian()
    assert G.exponent() == int(np.lcm.reduce(mods))


def test_element_orders_match_powers():
    G = build("gl:2:3")
    o = G.element_orders()
    ids = G.elements()
    assert (G.power(ids, 0) == 0).all()
    for k in range(1, 9):
        hit = G.power(ids, k) == 0
        assert np.array_equal(hit, (k % o) == 0)


# ------------------------------------------------------------------ classes

@pytest.mark.parametrize("spec", SMALL)
def test_classes_against_brute_force(spec):
    G = build(spec)
    ours = sorted(frozenset(int(x) for x in m) for _, m in conjugacy_classes(G))
    assert ours == sorted(oracles.classes(G))


def test_class_examples():
    assert sorted(build("symmetric:3").classes().sizes) == [1, 2, 3]
    assert list(build("symmetric:3").classes().sizes) == [1, 3, 2]
    assert len(build("quaternion:8").classes().reps) == 5
    A = build("abelian:2:6")
    assert (A.classes().sizes == 1).all()


def test_power_map_and_inverse_class():
    G = build("gl:2:3")
    cl = G.classes()
    assert np.array_equal(cl.inverse_class, cl.power_map(-1))
    assert np.array_equal(cl.power_map(1), np.arange(len(cl.reps)))


# ------------------------------------------------------------ subgroups

def test_fixed_subgroup_examples():
    G = build("gl:2:3")
    ident = Automorphism(G, G.elements())
    assert fixed_subgroup(G, ident).order == G.order
    A = build("abelian:2:4:3")
    inv = Automorphism(A, A.inv)
    assert fixed_subgroup(A, inv).order == int((A.element_orders() <= 2).sum()) == 4


def test_double_coset_examples():
    G = build("symmetric:3")
    assert len(double_cosets(G, G.whole(), G.whole())) == 1
    assert len(double_cosets(G, G.trivial(), G.trivial())) == 6
    A3 = derived_subgroup(G)
    t = next(int(x) for x in G.elements() if G.element_orders()[x] == 2)
    assert len(double_cosets(G, A3, generate_subgroup(G, [t]))) == 1


def test_quotients():
    G = build("symmetric:4")
    Q, lab = quotient_group(G, G.trivial())
    assert Q.order == 24
    Q, lab = quotient_group(G, G.whole())
    assert Q.order == 1
    V4 = p_radical(G, 2)
    Q, lab = quotient_group(G, V4)
    assert Q.order == 6 and not Q.is_abelian()
    # the projection is a homomorphism
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, 24, (2, 100))
    assert np.array_equal(lab[G.mul(a, b)], Q.mul(lab[a], lab[b]))
    t = next(int(x) for x in G.elements() if G.element_orders()[x] == 2 and not V4.mask[x])
    with pytest.raises(NotNormalError):
        quotient_group(G, generate_subgroup(G, [t]))


@pytest.mark.parametrize("spec,p,order", [("cyclic:6", 3, 3), ("symmetric:4", 2, 8),
                                          ("gl:2:3", 3, 3), ("gl:2:3", 2, 16),
                                          ("alternating:5", 5, 5), ("heisenberg:3", 3, 27)])
def test_sylow_orders(spec, p, order):
    G = build(spec)
    P = sylow_subgroup(G, p)
    assert P.order == order
    assert all(oracles.is_p_power(int(o), p) for o in G.element_orders()[P.members])


@pytest.mark.parametrize("spec", SMALL + ["symmetric:5", "gl:2:5"])
def test_radical_against_normal_closure_oracle(spec):
    G = build(spec)
    for p in [2, 3, 5, 7]:
        R = p_radical(G, p)
        assert set(int(x) for x in R.members) == oracles.p_radical(G, p)
        assert R.is_normal()


def test_radical_examples():
    assert p_radical(build("symmetric:3"), 5).order == 1
    assert p_radical(build("heisenberg:3"), 3).order == 27
    assert p_radical(build("symmetric:4"), 2).order == 4


def test_structural_subgroups():
    A = build("abelian:2:6")
    assert center(A).order == 12 and derived_subgroup(A).order == 1
    S3 = build("symmetric:3")
    assert center(S3).order == 1 and derived_subgroup(S3).order == 3
    Q8 = build("quaternion:8")
    assert center(Q8).order == 2 and derived_subgroup(Q8).order == 2


def test_subgroup_views_round_trip():
    G = build("gl:2:3")
    H = sylow_subgroup(G, 2)
    loc = H.to_local(H.members)
    assert np.array_equal(H.to_parent(loc), H.members)
    K = H.group
    rng = np.random.default_rng(2)
    a, b = rng.integers(0, H.order, (2, 50))
    assert np.array_equal(H.to_parent(K.mul(a, b)), G.mul(H.to_parent(a), H.to_parent(b)))
    Z = center(G)
    assert Z.relative_to(H).order == Z.order
    with pytest.raises(AssertionError):
        Subgroup(G, [0, 1, 2, 3, 4])


def test_normal_closure_of_a_transposition_is_s4():
    G = build("symmetric:4")
    t = next(int(x) for x in G.elements()
             if G.element_orders()[x] == 2 and not p_radical(G, 2).mask[x]
             and G.classes().sizes[G.classes().class_of[x]] == 6)
    assert normal_closure(G, [t]).order == 24


# ------------------------------------------------------------- products

def test_semidirect_product_is_nonabelian_dihedral():
    C = AbelianGroup([5])
    D = ProductGroup([C, AbelianGroup([2])], action=np.stack([C.elements(), C.inv]))
    assert D.order == 10 and not D.is_abelian()
    assert sorted(D.classes().sizes) == [1, 2, 2, 5]


def test_cayley_backend_matches_table():
    G = build("symmetric:3")
    T = oracles.table(G)
    C = CayleyGroup(T)
    assert C.order == 6
    assert np.array_equal(oracles.table(C), T)


def test_permutation_degree_limit():
    with pytest.raises(CapExceededError):
        PermutationGroup.generated(16, [list(range(1, 16)) + [0]])


# ----------------------------------------------------------- automorphisms

def test_automorphism_certification_rejects_bad_maps():
    G = build("symmetric:3")
    with pytest.raises(NotAutomorphismError):
        Automorphism(G, np.array([1, 0, 2, 3, 4, 5]))  # moves the identity
    with pytest.raises(NotAutomorphismError):
        Automorphism(G, np.array([0, 1, 1, 3, 4, 5]))  # not a bijection
    T = oracles.table(G)
    # a bijection fixing 1 that is not a homomorphism: swap one involution with an order-3 element
    o = G.element_orders()
    a, b = int(np.flatnonzero(o == 2)[0]), int(np.flatnonzero(o == 3)[0])
    f = np.arange(6)
    f[[a, b]] = [b, a]
    assert not all(T[f[x], f[y]] == f[T[x, y]] for x in range(6) for y in range(6))
    with pytest.raises(NotAutomorphismError):
        Automorphism(G, f)


def test_inner_automorphisms_are_automorphisms():
    G = build("gl:2:3")
    for t in [1, 5, 17, 40]:
        a = inner_automorphism(G, t)
        a.certify()
        assert np.array_equal(a.inverse().compose(a).images, G.elements())


@pytest.mark.parametrize("spec,count", [("cyclic:3", 2), ("cyclic:2", 1), ("symmetric:3", 4),
                                        ("symmetric:4", 10), ("quaternion:8", 10),
                                        ("abelian:2:2:2", 22), ("gl:2:3", 20)])
def test_involution_counts(spec, count):
    found = find_involutive_automorphisms(build(spec))
    assert found.complete
    assert len(found) == count
    assert found[0].name == "id"


@pytest.mark.parametrize("spec", ["symmetric:3", "quaternion:8", "dihedral:4", "abelian:2:4",
                                  "frobenius:7:3", "cyclic:12", "dicyclic:3", "alternating:4"])
def test_involutions_against_brute_force(spec):
    G = build(spec)
    ours = sorted(tuple(int(x) for x in a.images) for a in find_involutive_automorphisms(G))
    assert ours == oracles.automorphism_involutions(G)


def test_s3_involutions_are_transposition_conjugations():
    G = build("symmetric:3")
    found = find_involutive_automorphisms(G)
    inner = {tuple(inner_automorphism(G, t).images) for t in G.elements()
             if G.element_orders()[t] == 2}
    assert {tuple(a.images) for a in found[1:]} == inner


def test_search_budget_flag():
    found = find_involutive_automorphisms(build("abelian:2:2:2:2"), budget=5)
    assert not found.complete


def test_search_cap():
    old = config.set_caps(automorphism_search=10)
    try:
        with pytest.raises(CapExceededError):
            find_involutive_automorphisms(build("symmetric:4"))
    finally:
        config.set_caps(**old.__dict__)
