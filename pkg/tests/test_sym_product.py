import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vircoh.graded_ring import factor_class, format_class, make_cp, make_even_sphere, tensor_many
from vircoh.group_ring import GroupRingElement, g_action
from vircoh.sym_product import (
    cycle_class,
    diagonal_class,
    diagonal_inclusion,
    generators_symprod,
    gysin_oracle,
    monomial,
    perm_for,
    perm_pullback,
    perm_pushforward,
    sym_action,
    sym_group,
    sym_power,
)

CP1, CP2 = make_cp(1), make_cp(2)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_diagonal_class_cp(m):
    M = make_cp(m)
    Y = sym_power(M, 2)
    expected = sum((monomial(Y, (j, m - j)) for j in range(m + 1)), Y.zero())
    assert diagonal_class(M, 2, 1, 2) == expected


def test_diagonal_class_sphere_product():
    M = tensor_many([make_even_sphere(1), make_even_sphere(1)])
    D = diagonal_class(M, 2, 1, 2)
    assert D.degree == 4
    assert sym_power(M, 2).integrate(D * D) == 4


def test_perm_for():
    assert perm_for(3, [[1, 2]]) == (1, 0, 2)
    assert perm_for(4, [[1, 3, 4]]) == (2, 1, 3, 0)


@pytest.mark.parametrize("M,n", [(CP1, 2), (CP1, 3), (CP2, 2), (make_even_sphere(2), 3)])
def test_pushforward_matches_gysin_oracle(M, n):
    G = sym_group(n)
    for p in G.perms:
        inc = diagonal_inclusion(M, n, p)
        for k in range(inc.source.dim):
            a = inc.source.basis_class(k)
            assert perm_pushforward(M, n, p, a) == gysin_oracle(M, n, p, a)


@pytest.mark.parametrize("cycles,n", [([[1, 2, 3]], 3), ([[1, 2, 3, 4]], 4), ([[1, 3, 4]], 4), ([[1, 2], [3, 4]], 4)])
@pytest.mark.parametrize("M", [CP1, CP2])
def test_spanning_tree_independence(cycles, n, M):
    p = perm_for(n, cycles)
    assert cycle_class(M, n, p, "path") == cycle_class(M, n, p, "star")


def _pairs(n):
    G = sym_group(n)
    return [(p, k) for p in G.perms for k in range(diagonal_inclusion(CP1, n, p).source.dim)]


@given(st.data())
def test_projection_formula(data):
    n = 3
    M = CP1
    Y = sym_power(M, n)
    p = data.draw(st.sampled_from(sym_group(n).perms))
    inc = diagonal_inclusion(M, n, p)
    a = inc.source.from_vector(data.draw(st.lists(st.integers(-2, 2), min_size=inc.source.dim, max_size=inc.source.dim)))
    b = Y.from_vector(data.draw(st.lists(st.integers(-2, 2), min_size=Y.dim, max_size=Y.dim)))
    assert perm_pushforward(M, n, p, perm_pullback(M, n, p, b) * a) == b * perm_pushforward(M, n, p, a)


@pytest.mark.parametrize("M,n", [(CP1, 3), (CP2, 2), (CP1, 4)])
def test_degree_shift(M, n):
    for p in sym_group(n).perms:
        inc = diagonal_inclusion(M, n, p)
        for k in range(inc.source.dim):
            a = inc.source.basis_class(k)
            out = perm_pushforward(M, n, p, a)
            assert out.is_zero() or out.degree == a.degree + inc.codim


@pytest.mark.parametrize("M,n", [(CP1, 3), (CP2, 3)])
def test_lift_is_a_section_of_pullback(M, n):
    for p in sym_group(n).perms:
        inc = diagonal_inclusion(M, n, p)
        for k in range(inc.source.dim):
            a = inc.source.basis_class(k)
            assert inc.pull(inc.lift(a)) == a


def test_lift_well_defined_modulo_annihilator():
    # two different lifts of the same class give the same pushforward
    M, n = CP2, 3
    p = perm_for(n, [[1, 2, 3]])
    inc = diagonal_inclusion(M, n, p)
    Y = sym_power(M, n)
    x = M.basis_class(1)
    lifts = [factor_class(Y, i, x) for i in range(3)]
    imgs = {format_class(cycle_class(M, n, p) * u) for u in lifts}
    assert len(imgs) == 1
    assert cycle_class(M, n, p) * lifts[0] == perm_pushforward(M, n, p, inc.source.basis_class(1))


@pytest.mark.parametrize("M", [CP1, CP2, make_even_sphere(1)])
def test_annihilator_of_diagonal(M):
    n = 3
    Y = sym_power(M, n)
    for i, j in itertools.combinations(range(n), 2):
        D = diagonal_class(M, n, i + 1, j + 1)
        for k in range(1, M.dim):
            u = M.basis_class(k)
            assert (D * (factor_class(Y, i, u) - factor_class(Y, j, u))).is_zero()


@pytest.mark.parametrize("M,n", [(CP1, 3), (CP2, 3)])
def test_conjugation_equivariance(M, n):
    G = sym_group(n)
    act = sym_action(M, n)
    for t in range(G.order):
        x = GroupRingElement.single(G, t, cycle_class(M, n, G.perms[t]))
        for h in range(G.order):
            k = G.conj(t, h)
            assert g_action(x, h, act) == GroupRingElement.single(G, k, cycle_class(M, n, G.perms[k]))


def test_generators_symprod_labels():
    gens = generators_symprod(CP1, 3)
    labels = gens.labels
    assert labels[:8] == [f"{nm} at 1_G" for nm in sym_power(CP1, 3).names]
    assert labels[8:] == ["transposition class (1 2)", "transposition class (1 3)", "transposition class (2 3)"]
