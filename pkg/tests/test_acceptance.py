"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line; the lines are
collected again in the terminal summary.  Run ``pytest tests/test_acceptance.py -v``
or ``python3 tests/test_acceptance.py``.
"""

import itertools
import sys
from fractions import Fraction

import pytest

from vircoh.graded_ring import factor_class, make_cp, make_even_sphere, tensor_many
from vircoh.group_ring import GroupRingElement, g_action, reynolds
from vircoh.inertia import (
    build_scenario_cpn_zp,
    build_scenario_symprod2,
    check_associativity,
    check_homomorphism,
    check_injectivity,
    component_class,
    replace_euler,
    virtual_ring_direct,
    vproduct,
)
from vircoh.scenario_io import assignment_from_json
from vircoh.subring import (
    Presentation,
    check_g_stable,
    close_subring,
    dims_table,
    element_from_literal,
    invariant_subring,
    structure_constants,
    verify_presentation,
)
from vircoh.sym_product import (
    cycle_class,
    diagonal_class,
    diagonal_inclusion,
    generators_general,
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

RESULTS: list[str] = []


def record(n: int, ok: bool, detail: str):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _rows(table):
    return {r["element"]: r["dims"] for r in table["rows"]}


def _S2_elem(M, cls, tau):
    G = sym_group(2)
    return GroupRingElement.single(G, tau, cls)


# 1 -------------------------------------------------------------------------

def test_criterion_01_diagonal_class():
    bad = []
    for m in range(1, 5):
        M = make_cp(m)
        Y = sym_power(M, 2)
        expected = sum((monomial(Y, (j, m - j)) for j in range(m + 1)), Y.zero())
        if diagonal_class(M, 2, 1, 2) != expected:
            bad.append(m)
    record(1, not bad, f"diagonal class of CP^m x CP^m equals sum x1^j x2^(m-j) for m=1..4 (failures: {bad})")


# 2 -------------------------------------------------------------------------

def test_criterion_02_pushforward_vs_gysin():
    cases = [(make_cp(1), 2), (make_cp(1), 3), (make_cp(1), 4), (make_cp(2), 2)]
    checked, bad = 0, []
    for M, n in cases:
        for p in sym_group(n).perms:
            inc = diagonal_inclusion(M, n, p)
            for k in range(inc.source.dim):
                a = inc.source.basis_class(k)
                checked += 1
                if perm_pushforward(M, n, p, a) != gysin_oracle(M, n, p, a):
                    bad.append((n, p, k))
    record(2, not bad, f"perm_pushforward == gysin_oracle on {checked} (permutation, basis class) cases, "
                       f"{len(bad)} mismatches")


# 3 -------------------------------------------------------------------------

def test_criterion_03_euler_class_identity():
    models = {"CP1": (make_cp(1), 2), "CP2": (make_cp(2), 3), "S4": (make_even_sphere(2), 2),
              "S2xS2": (tensor_many([make_even_sphere(1), make_even_sphere(1)]), 4)}
    bad = []
    for name, (M, chi) in models.items():
        Y = sym_power(M, 2)
        G = sym_group(2)
        u = GroupRingElement.single(G, 1, cycle_class(M, 2, G.perms[1]))
        top = Y.basis_class(Y.dim - 1)
        assert Y.integrate(top) == 1
        ok = M.euler_char() == chi and u * u == GroupRingElement.single(G, 0, chi * top)
        if not ok:
            bad.append(name)
    record(3, not bad, f"(f_tau! 1)^2 = chi(M) top(M)xtop(M) at 1_G for CP1, CP2, S4, S2xS2 (failures: {bad})")


# 4 -------------------------------------------------------------------------

BUNDLED_RELS = ["x^2", "y^2", "u^2 - 2*x*y", "u*(x - y)"]


def _cp1_assignment(S):
    lit = {"x": [{"g": "()", "class": {"x1": "1"}}], "y": [{"g": "()", "class": {"x2": "1"}}],
           "u": [{"g": "(1 2)", "class": {"x1": "1", "x2": "1"}}]}
    return assignment_from_json(lit, S.group, S.ambient)


def test_criterion_04_cp1_squared_ring():
    M = make_cp(1)
    S = close_subring(generators_symprod(M, 2))
    rows = _rows(dims_table(S))
    p = Presentation.from_strings([("x", 2), ("y", 2), ("u", 2)], BUNDLED_RELS)
    rep = verify_presentation(S, p, _cp1_assignment(S))
    ok = rows == {"()": [1, 2, 1], "(1 2)": [0, 1, 1]} and rep.passed and rep.quotient_dims[:3] == [1, 3, 2]
    record(4, ok, f"dims {rows}, presentation verdict {'pass' if rep.passed else 'fail'}, "
                  f"quotient dims {rep.quotient_dims}")


# 5 -------------------------------------------------------------------------

def test_criterion_05_invariant_ring():
    M = make_cp(1)
    S = close_subring(generators_symprod(M, 2))
    inv = invariant_subring(S, sym_action(M, 2))
    G, Y = S.group, S.ambient
    w = element_from_literal(G, Y, [{"g": "()", "class": {"x1": "1", "x2": "1"}}])
    u = element_from_literal(G, Y, [{"g": "(1 2)", "class": {"x1": "1", "x2": "1"}}])
    x1x2_tau = element_from_literal(G, Y, [{"g": "(1 2)", "class": {"x1*x2": "1"}}])
    p = Presentation(["w", "u"], [2, 2], [
        {(3, 0): Fraction(1)}, {(0, 3): Fraction(1)}, {(0, 2): Fraction(1), (2, 0): Fraction(-1)}])
    rep = verify_presentation(inv, p, {"w": w, "u": u})
    ok = inv.dim == 5 and rep.passed and u * u == w * w and u * w == 2 * x1x2_tau
    record(5, ok, f"invariant dim {inv.dim}, presentation <w^3, u^3, u^2 - w^2> "
                  f"{'pass' if rep.passed else 'fail'}, u^2 = w^2 and uw = 2 x1x2 tau: {u * u == w * w and u * w == 2 * x1x2_tau}")


# 6 -------------------------------------------------------------------------

def test_criterion_06_cpn_zp_group_ring():
    details, ok = [], True
    for n, p in [(2, 3), (3, 5)]:
        sc = build_scenario_cpn_zp(n, p, include_points=False)
        S = close_subring(generators_general(sc))
        rows = _rows(dims_table(S))
        totals = [sum(rows[lab]) for lab in sc.group.labels]
        ok &= totals == [n + 1] + [n] * (p - 1)
        ok &= all(rows[lab][0] == 0 for lab in sc.group.labels[1:])
        Y = sc.ambient
        for g in range(1, p):
            for j in range(0, n + 1):
                xj = GroupRingElement.single(sc.group, g, Y.basis_class(j))
                ok &= S.contains(xj) == (j >= 1)
        details.append(f"(n={n},p={p}) totals {totals}")
    record(6, ok, "; ".join(details) + "; image at each lambda^i = span{x..x^n}, degree 0 only at 1_G")


# 7 -------------------------------------------------------------------------

def test_criterion_07_homomorphism():
    fixtures = [build_scenario_symprod2(make_cp(1)), build_scenario_symprod2(make_cp(2)),
                build_scenario_cpn_zp(2, 3, True)]
    reports = [check_homomorphism(sc) for sc in fixtures]
    sc = fixtures[0]
    bad = replace_euler(sc, (1, 1, "diag", "diag"), sc.component(1, "diag").ring.unit())
    corrupt = check_homomorphism(bad)
    ok = all(r.passed and not r.violations for r in reports) and len(corrupt.violations) >= 1
    record(7, ok, "violations " + ", ".join(f"{s.name}:{len(r.violations)}" for s, r in zip(fixtures, reports))
           + f"; corrupted excess class: {len(corrupt.violations)} violations")


# 8 -------------------------------------------------------------------------

def test_criterion_08_injectivity():
    sym = [build_scenario_symprod2(M) for M in (make_cp(1), make_cp(2), make_cp(3), make_even_sphere(2),
                                               tensor_many([make_even_sphere(1), make_even_sphere(1)]))]
    ok = all(check_injectivity(sc)["injective"] for sc in sym)
    ok &= check_injectivity(build_scenario_cpn_zp(2, 3, False))["injective"]
    ok &= check_injectivity(build_scenario_cpn_zp(3, 5, False))["injective"]
    kernels = []
    for n, p in [(2, 3), (3, 5)]:
        rep = check_injectivity(build_scenario_cpn_zp(n, p, True))
        ks = [e["kernel_dim"] for e in rep["elements"]]
        kernels.append(ks)
        ok &= (not rep["injective"]) and ks == [0] + [1] * (p - 1)
    record(8, ok, f"symmetric products and cpn-zp without points injective; with points kernel dims {kernels}")


# 9 -------------------------------------------------------------------------

def test_criterion_09_point_relations():
    ok, checked = True, 0
    for n, p in [(2, 3), (3, 5)]:
        sc = build_scenario_cpn_zp(n, p, True)
        for g, h in itertools.product(range(1, p), repeat=2):
            z_g = component_class(sc, g, "pt", {"1": 1})
            z_h = component_class(sc, h, "pt", {"1": 1})
            x_h = component_class(sc, h, "H", {"1": 1})
            ok &= vproduct(sc, z_g, x_h) == {} and vproduct(sc, x_h, z_g) == {} and vproduct(sc, z_g, z_h) == {}
            checked += 1
    record(9, ok, f"zx = 0 and z^2 = 0 exactly on {checked} sector pairs")


# 10 ------------------------------------------------------------------------

def test_criterion_10_u_cubed():
    ok, details = True, []
    for m in (1, 2, 3):
        M = make_cp(m)
        G = sym_group(2)
        Y = sym_power(M, 2)
        u = GroupRingElement.single(G, 1, cycle_class(M, 2, G.perms[1]))
        S = close_subring(generators_symprod(M, 2))
        sq = GroupRingElement.single(G, 0, (m + 1) * monomial(Y, (m, m)))
        ok &= S.contains(u) and u * u == sq and (u ** 3).is_zero()
        details.append(f"m={m}")
    record(10, ok, "u^2 = (m+1) x1^m x2^m and u^3 = 0 for " + ", ".join(details))


# 11 ------------------------------------------------------------------------

def _projection_and_degree(M, n):
    Y = sym_power(M, n)
    for p in sym_group(n).perms:
        inc = diagonal_inclusion(M, n, p)
        for k in range(inc.source.dim):
            a = inc.source.basis_class(k)
            fa = perm_pushforward(M, n, p, a)
            if not fa.is_zero() and fa.degree != a.degree + inc.codim:
                return False
            for b in range(Y.dim):
                bb = Y.basis_class(b)
                if perm_pushforward(M, n, p, perm_pullback(M, n, p, bb) * a) != bb * fa:
                    return False
    return True


def test_criterion_11_properties():
    props = {}
    props["projection+degree"] = all(_projection_and_degree(M, n) for M, n in
                                     [(make_cp(1), 3), (make_cp(2), 2), (make_even_sphere(2), 3)])
    props["tree"] = all(cycle_class(M, n, perm_for(n, c), "path") == cycle_class(M, n, perm_for(n, c), "star")
                        for M in (make_cp(1), make_cp(2)) for n, c in [(3, [[1, 2, 3]]), (4, [[1, 2, 3, 4]])])
    order_ok, stable_ok, reyn_ok = True, True, True
    for M, n in [(make_cp(1), 2), (make_cp(1), 3), (make_cp(2), 2)]:
        gens = generators_symprod(M, n)
        base = close_subring(gens)
        k = len(gens)
        for order in [list(reversed(range(k)))] + [list(range(s, k)) + list(range(s)) for s in range(1, k)]:
            S = close_subring(gens.reordered(order))
            order_ok &= S.dim == base.dim and all(S.contains(r) for *_, r, _ in base.basis())
        act = sym_action(M, n)
        stable_ok &= check_g_stable(base, act) == []
        for *_, r, _ in base.basis():
            rr = reynolds(r, act)
            reyn_ok &= reynolds(rr, act) == rr and all(g_action(rr, h, act) == rr for h in range(base.group.order))
    props["generator order"] = order_ok
    props["G-stability"] = stable_ok
    props["Reynolds"] = reyn_ok
    fixtures = [build_scenario_symprod2(make_cp(1)), build_scenario_symprod2(make_cp(2)),
                build_scenario_symprod2(make_even_sphere(2)), build_scenario_cpn_zp(2, 3, True),
                build_scenario_cpn_zp(3, 5, True), build_scenario_cpn_zp(3, 5, False)]
    props["associativity"] = all(check_associativity(sc).passed for sc in fixtures)
    bad = [k for k, v in props.items() if not v]
    record(11, not bad, f"{len(props)} property families exhaustive (failures: {bad})")


# 12 ------------------------------------------------------------------------

def test_criterion_12_integrality():
    audited, bad = [], []
    for m, n in [(1, 2), (2, 2), (3, 2), (4, 2), (1, 3), (2, 3), (1, 4)]:
        M = make_cp(m)
        S = close_subring(generators_symprod(M, n))
        inv = invariant_subring(S, sym_action(M, n))
        for tag, sc in (("image", structure_constants(S)), ("invariants", structure_constants(inv))):
            audited.append(f"(CP{m})^{n} {tag}")
            if not sc.integral:
                bad.append(audited[-1])
    for m in (1, 2, 3):
        vr = virtual_ring_direct(build_scenario_symprod2(make_cp(m)), invariants=False)
        audited.append(f"symprod2(CP{m}) direct")
        if not vr.integral:
            bad.append(audited[-1])
    record(12, not bad, f"{len(audited)} rings audited, non-integral: {bad}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
