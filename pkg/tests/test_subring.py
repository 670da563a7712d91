import itertools

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from vircoh.graded_ring import make_cp, make_even_sphere
from vircoh.group_ring import GroupRingElement, g_action
from vircoh.subring import (
    DegreeMismatch,
    NotGStable,
    Presentation,
    check_closure,
    check_g_stable,
    close_subring,
    dims_table,
    element_from_literal,
    invariant_subring,
    member,
    parse_polynomial,
    quotient_dims,
    structure_constants,
    verify_presentation,
)
from vircoh.sym_product import generators_symprod, sym_action, sym_group, sym_power

CP1 = make_cp(1)


def image(M, n):
    return close_subring(generators_symprod(M, n))


def _dims(S):
    return {r["element"]: r["dims"] for r in dims_table(S)["rows"]}


def test_cp1_squared_dims():
    S = image(CP1, 2)
    assert _dims(S) == {"()": [1, 2, 1], "(1 2)": [0, 1, 1]}
    assert S.dim == 6


def test_provenance_words():
    S = image(CP1, 2)
    provs = [p for *_, p in S.basis()]
    assert provs[0] == "1"
    assert "[transposition class (1 2)]" in provs


@pytest.mark.parametrize("M,n", [(CP1, 3), (make_cp(2), 2)])
def test_generator_order_invariance(M, n):
    gens = generators_symprod(M, n)
    base = _dims(close_subring(gens))
    orders = [list(reversed(range(len(gens)))), list(range(1, len(gens))) + [0]]
    for order in orders:
        S = close_subring(gens.reordered(order))
        assert _dims(S) == base
        # same subspace, not just same dimensions
        assert all(S.contains(r) for *_, r, _ in close_subring(gens).basis())


@pytest.mark.parametrize("M,n", [(CP1, 2), (CP1, 3), (make_cp(2), 2), (make_even_sphere(1), 3)])
def test_image_is_g_stable_and_closed(M, n):
    S = image(M, n)
    assert check_g_stable(S, sym_action(M, n)) == []
    assert check_closure(S) == []


def test_not_g_stable_detected():
    G = sym_group(2)
    Y = sym_power(CP1, 2)
    x1 = GroupRingElement.single(G, 0, Y.basis_class(Y.index("x1")))
    S = close_subring([x1], ["x1"])
    with pytest.raises(NotGStable):
        invariant_subring(S, sym_action(CP1, 2))


def test_invariant_subring_cp1_squared():
    S = image(CP1, 2)
    inv = invariant_subring(S, sym_action(CP1, 2))
    assert inv.dim == 5
    assert _dims(inv) == {"()": [1, 1, 1], "(1 2)": [0, 1, 1]}
    act = sym_action(CP1, 2)
    for *_, r, _ in inv.basis():
        assert all(g_action(r, h, act) == r for h in range(2))


def test_member_coordinates():
    S = image(CP1, 2)
    basis = S.basis()
    x = basis[1][2] + basis[2][2] * 3
    coords = member(S, x)
    assert coords is not None
    G, Y = S.group, S.ambient
    outside = GroupRingElement.single(G, 1, Y.unit())
    assert member(S, outside) is None and not S.contains(outside)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_structure_constants_integral_and_consistent(m):
    M = make_cp(m)
    S = image(M, 2)
    sc = structure_constants(S)
    assert sc.integral
    for (i, j), row in sc.table.items():
        lhs = sc.elements[i] * sc.elements[j]
        rhs = sum((c * sc.elements[k] for k, c in row.items()), GroupRingElement(S.group, S.ambient))
        assert lhs == rhs


def test_parse_polynomial():
    assert parse_polynomial("u^2 - 2*x*y", ["x", "y", "u"]) == {(0, 0, 2): 1, (1, 1, 0): -2}
    with pytest.raises(ValueError):
        parse_polynomial("z^2", ["x"])


def test_presentation_homogeneity_checked():
    with pytest.raises(DegreeMismatch):
        Presentation.from_strings([("x", 2), ("w", 4)], ["x^2 - x"])


def _oracle_quotient_dims(p, up_to):
    # standard monomials w.r.t. a Groebner basis (sympy), counted per degree
    syms = sympy.symbols(p.names)
    rels = [sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod(s**e for s, e in zip(syms, ex))
                for ex, c in r.items()) for r in p.relations]
    gb = sympy.groebner(rels, *syms, order="grevlex") if rels else None
    out = []
    for D in range(0, up_to + 1, 2):
        n = 0
        for exps in itertools.product(*(range(D // d + 1) for d in p.degrees)):
            if sum(e * d for e, d in zip(exps, p.degrees)) != D:
                continue
            mono = sympy.prod(s**e for s, e in zip(syms, exps))
            if gb is None or gb.reduce(mono)[1] == mono:
                n += 1
        out.append(n)
    return out


@pytest.mark.parametrize("gens,rels", [
    ([("x", 2), ("y", 2), ("u", 2)], ["x^2", "y^2", "u^2 - 2*x*y", "u*(x - y)"]),
    ([("w", 2), ("u", 2)], ["w^3", "u^3", "u^2 - w^2"]),
    ([("x", 2), ("z", 4)], ["x^3", "z*x", "z^2"]),
    ([("a", 2)], []),
])
def test_quotient_dims_against_groebner(gens, rels):
    p = Presentation.from_strings(gens, rels)
    assert quotient_dims(p, 8) == _oracle_quotient_dims(p, 8)


def _assign(S, **lits):
    return {k: element_from_literal(S.group, S.ambient, v) for k, v in lits.items()}


def test_verify_presentation_detects_missing_relation():
    S = image(CP1, 2)
    a = _assign(S, x=[{"g": "()", "class": {"x1": "1"}}], y=[{"g": "()", "class": {"x2": "1"}}],
                u=[{"g": "(1 2)", "class": {"x1": "1", "x2": "1"}}])
    good = Presentation.from_strings([("x", 2), ("y", 2), ("u", 2)], ["x^2", "y^2", "u^2 - 2*x*y", "u*(x - y)"])
    assert verify_presentation(S, good, a).passed
    weak = Presentation.from_strings([("x", 2), ("y", 2), ("u", 2)], ["x^2", "y^2", "u^2 - 2*x*y"])
    rep = verify_presentation(S, weak, a)
    assert not rep.passed and rep.relations_hold and not rep.dims_match
    wrong = Presentation.from_strings([("x", 2), ("y", 2), ("u", 2)], ["x^2", "y^2", "u^2 - x*y", "u*(x - y)"])
    rep = verify_presentation(S, wrong, a)
    assert rep.failing_relations() == ["-x*y + u^2"]


def test_verify_presentation_detects_non_generating():
    S = image(CP1, 2)
    a = _assign(S, x=[{"g": "()", "class": {"x1": "1"}}], y=[{"g": "()", "class": {"x2": "1"}}])
    p = Presentation.from_strings([("x", 2), ("y", 2)], ["x^2", "y^2"])
    rep = verify_presentation(S, p, a)
    assert not rep.generates and not rep.passed


@given(st.permutations(range(11)))
def test_closure_order_invariance_random(order):
    gens = generators_symprod(CP1, 3)
    assert _dims(close_subring(gens.reordered(list(order)))) == _dims(image(CP1, 3))
