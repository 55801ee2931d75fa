import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from sympair.catalog import build, involution_by_name, standard_involutions
from sympair.chartab import (character_table, induce, invariant_dimension, restrict, table_of,
                             tensor)
from sympair.clifford import (clifford_stabilizer, factorization_expected, mackey_invariants,
                              main_theorem_trace, tensor_factorize)
from sympair.errors import NotNormalError, PreconditionError
from sympair.groups import (Automorphism, derived_subgroup, find_involutive_automorphisms,
                            generate_subgroup, inner_automorphism, p_radical)

SEMI = "semidirect:(heisenberg:3),(cyclic:2):0"
# the C2 acts by -1 on H/Z here, so it fixes the center and both degree-3 characters
SEMI_FIX = "semidirect:(heisenberg:3),(cyclic:2):7"


def transposition_conjugation(G):
    t = int(np.flatnonzero(G.element_orders() == 2)[0])
    return inner_automorphism(G, t)


def stabilizer_oracle(G, N, tau):
    """Loop-based {g : tau(g^-1 n g) = tau(n) for every n in N}."""
    T = oracles.table(G)
    inv = oracles.inverses(T)
    members = [int(x) for x in N.members]
    val = {n: int(tau.at(N.to_local(np.array([n])))[0]) for n in members}
    return [g for g in range(G.order)
            if all(val[int(T[T[inv[g], n], g])] == val[n] for n in members)]


# ----------------------------------------------------------------- stabilizer

def test_stabilizer_trivial_normal_subgroup():
    G = build("gl:2:3")
    for rho in character_table(G).irreducibles:
        cl = clifford_stabilizer(G, G.trivial(), rho)
        assert cl.tau.degree == 1 and cl.delta.order == G.order
        assert np.array_equal(cl.sigma.values, rho.values)


def test_stabilizer_s3_over_a3():
    G = build("symmetric:3")
    tab = character_table(G)
    rho = next(c for c in tab.irreducibles if c.degree == 2)
    A3 = derived_subgroup(G)
    cl = clifford_stabilizer(G, A3, rho)
    assert cl.tau.degree == 1 and (cl.tau.values != 1).any()
    assert cl.delta.order == 3
    assert np.array_equal(cl.sigma.values, cl.tau.values)
    assert induce(cl.sigma, G) == rho


def test_stabilizer_needs_normal_subgroup():
    G = build("symmetric:3")
    t = int(np.flatnonzero(G.element_orders() == 2)[0])
    with pytest.raises(NotNormalError):
        clifford_stabilizer(G, generate_subgroup(G, [t]), character_table(G).irreducibles[0])


@pytest.mark.parametrize("spec,p", [(SEMI, 3), (SEMI_FIX, 3), ("symmetric:4", 2), ("gl:2:3", 2),
                                    ("frobenius:7:3", 7), ("dicyclic:3", 3)])
def test_stabilizer_against_oracle(spec, p):
    G = build(spec)
    N = p_radical(G, p)
    for rho in character_table(G).irreducibles:
        cl = clifford_stabilizer(G, N, rho)
        assert sorted(int(x) for x in cl.delta.members) == stabilizer_oracle(G, N, cl.tau)
        assert rho.degree == (G.order // cl.delta.order) * cl.sigma.degree
        assert cl.delta.mask[N.members].all()


def test_semidirect_degree_three():
    G = build(SEMI_FIX)
    N = p_radical(G, 3)
    assert N.order == 27
    threes = [c for c in character_table(G).irreducibles if c.degree == 3]
    assert threes
    for rho in threes:
        cl = clifford_stabilizer(G, N, rho)
        assert cl.delta.order == 54 and cl.sigma == rho
        assert sorted(int(x) for x in cl.delta.members) == stabilizer_oracle(G, N, cl.tau)
    # with the other action the two degree-3 characters are swapped and induce a 6
    G = build(SEMI)
    N = p_radical(G, 3)
    six = next(c for c in character_table(G).irreducibles if c.degree == 6)
    cl = clifford_stabilizer(G, N, six)
    assert cl.delta.order == 27 and cl.tau.degree == 3 and cl.sigma.degree == 3


# --------------------------------------------------------------------- Mackey

def test_mackey_examples():
    G = build("symmetric:3")
    tab = character_table(G)
    A3 = derived_subgroup(G)
    atab = table_of(A3, tab)
    ident = Automorphism(G, G.elements())
    nontriv = next(c for c in atab.irreducibles if (c.values != 1).any())
    total, parts = mackey_invariants(G, A3, nontriv, ident)
    assert total == 0 and len(parts) == 1
    theta = transposition_conjugation(G)
    total, parts = mackey_invariants(G, A3, atab.trivial(), theta)
    # Ind 1 = 1 + sign, and sign has no invariants under a transposition
    vals, n = oracles.induced_values(G, A3.members, lambda d: 1)
    fixed = theta.fixed_subgroup().members
    assert total == sum(vals[int(h)] for h in fixed) // (n * len(fixed)) == 1
    whole = G.whole()
    for chi in tab.irreducibles:
        t, parts = mackey_invariants(G, whole, chi, theta)
        assert len(parts) == 1 and t == invariant_dimension(chi, theta.fixed_subgroup())


@given(st.sampled_from(["symmetric:4", "gl:2:3", "dihedral:6", SEMI, "double:(symmetric:3)"]),
       st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_mackey_matches_direct_property(spec, seed):
    G = build(spec)
    rng = np.random.default_rng(seed)
    invs = find_involutive_automorphisms(G, budget=5000)
    theta = invs[int(rng.integers(len(invs)))]
    D = generate_subgroup(G, [int(x) for x in rng.integers(0, G.order, 2)])
    dtab = table_of(D, character_table(G))
    sigma = dtab.irreducibles[int(rng.integers(len(dtab.irreducibles)))]
    total, parts = mackey_invariants(G, D, sigma, theta, check=False)
    assert total == invariant_dimension(induce(sigma, G), theta.fixed_subgroup())
    assert all(c >= 0 for _, c in parts)


# ---------------------------------------------------------- tensor factorization

def test_factorize_trivial_on_n():
    G = build("gl:2:3")
    N = p_radical(G, 2)
    for rho in character_table(G).irreducibles:
        if (restrict(rho, N).values == rho.degree).all():
            f = tensor_factorize(G, N, rho)
            assert f is not None and f.pi1.degree == 1
            assert tensor(f.pi1, f.pi2) == rho


def test_factorize_product_group():
    G = build("product:(heisenberg:3),(cyclic:2)")
    N = p_radical(G, 3)
    tab = character_table(G)
    for rho in tab.irreducibles:
        f = tensor_factorize(G, N, rho, p=3)
        assert f is not None
        assert tensor(f.pi1, f.pi2) == rho
        rn = restrict(f.pi1, N)
        assert rn.table.inner(rn.values, rn.values) == 1
        assert (restrict(f.pi2, N).values == f.pi2.degree).all()
    assert factorization_expected(G, N, 3) is True


def test_factorize_preconditions():
    G = build("symmetric:3")
    rho = next(c for c in character_table(G).irreducibles if c.degree == 2)
    with pytest.raises(PreconditionError):
        tensor_factorize(G, derived_subgroup(G), rho)
    G = build("symmetric:4")
    N = derived_subgroup(G)  # A4 is not a p-group
    triv = character_table(G).trivial()
    with pytest.raises(PreconditionError):
        tensor_factorize(G, N, triv, p=2)


def test_factorization_expected_rules():
    G = build("symmetric:4")
    assert factorization_expected(G, p_radical(G, 2), 2) is False
    assert factorization_expected(G, p_radical(G, 3), 3) is False


# ---------------------------------------------------------------------- trace

@pytest.mark.parametrize("spec", ["heisenberg:3", "frobenius:7:3", "cyclic:15"])
def test_trace_on_odd_groups(spec):
    G = build(spec)
    p = min(q for q in (3, 5, 7) if G.order % q == 0)
    for theta in find_involutive_automorphisms(G):
        for rho in character_table(G).irreducibles:
            rep = main_theorem_trace(G, theta, rho, p)
            assert rep.ok
            assert invariant_dimension(rho, theta.fixed_subgroup()) <= 1


def test_trace_with_trivial_radical():
    G = build("symmetric:4")
    assert p_radical(G, 3).order == 1
    for _, theta in standard_involutions(G):
        for rho in character_table(G).irreducibles:
            rep = main_theorem_trace(G, theta, rho, 3)
            assert rep.ok
            if not rep.early_exit:
                s5 = rep.steps[4]["values"]
                assert s5["delta_order"] == G.order


def test_trace_on_semidirect():
    # the standard involutions all exit early on degree 3, so run every involution
    G = build(SEMI_FIX)
    seen = 0
    for theta in find_involutive_automorphisms(G):
        for rho in character_table(G).irreducibles:
            if rho.degree != 3:
                continue
            rep = main_theorem_trace(G, theta, rho, 3)
            assert rep.ok
            js = rep.to_json()
            assert [s["step"] for s in js["steps"]] == (
                [1, 2] if rep.early_exit else list(range(1, 10)))
            if not rep.early_exit:
                seen += 1
                v8 = js["steps"][7]["values"]
                assert v8["cosets"] == v8["kernel"]
    assert seen > 0


def test_trace_needs_odd_prime():
    G = build("symmetric:3")
    with pytest.raises(PreconditionError):
        main_theorem_trace(G, Automorphism(G, G.elements()), character_table(G).trivial(), 2)
