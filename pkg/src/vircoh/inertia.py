"""Virtual product on the inertia decomposition, computed from geometric data.

A scenario lists, for every group element g, the components of the fixed set
Y^g with their pushforward and pullback matrices, and for every pair of
components the intersection components with restriction maps, the excess
Euler class and the pushforward into a component of Y^{gh}.  Excess classes
are inputs; the two built-in fixtures pin them by known identities.

Matrices act on row vectors: row ``k`` is the image of source basis element ``k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exactalg import QMatrix, rank
from .graded_ring import CohClass, ManifoldModel, euler_char, make_cp
from .group_ring import (
    CohAction,
    FiniteGroup,
    GroupRingElement,
    cyclic_group,
    format_element,
    g_action,
    trivial_action,
)
from .sym_product import diagonal_inclusion, perm_pushforward, sym_action, sym_group, sym_power


class ScenarioError(ValueError):
    pass


class MissingPairData(ScenarioError):
    pass


def _apply(m: QMatrix, u: CohClass, target: ManifoldModel) -> CohClass:
    if m.nrows != u.model.dim or m.ncols != target.dim:
        raise ScenarioError(f"matrix of shape {m.nrows}x{m.ncols} cannot map dim {u.model.dim} -> {target.dim}")
    out: dict[int, Fraction] = {}
    for k, c in u.coeffs.items():
        for j, a in enumerate(m.rows[k]):
            if a:
                out[j] = out.get(j, Fraction(0)) + c * a
    return CohClass(target, out)


def matrix_of(images: Sequence[CohClass], ncols: int) -> QMatrix:
    return QMatrix([u.vector() for u in images], ncols)


@dataclass
class FixedComponent:
    g: int
    id: str
    ring: ManifoldModel
    push: QMatrix
    pull: QMatrix
    ambient: ManifoldModel

    @property
    def dim(self) -> int:
        return self.ring.manifold_dim

    @property
    def codim(self) -> int:
        return self.ambient.manifold_dim - self.dim

    def pushforward(self, u: CohClass) -> CohClass:
        return _apply(self.push, u, self.ambient)

    def pullback(self, u: CohClass) -> CohClass:
        return _apply(self.pull, u, self.ring)


@dataclass
class Intersection:
    ring: ManifoldModel
    ig: QMatrix
    ih: QMatrix
    euler: CohClass
    target: str
    ipush: QMatrix


@dataclass
class InertiaScenario:
    name: str
    group: FiniteGroup
    ambient: ManifoldModel
    action: CohAction
    components: dict[int, list[FixedComponent]]
    pairs: dict[tuple[int, int, str, str], list[Intersection]]
    transports: dict[tuple[int, int, str], tuple[str, QMatrix]] = field(default_factory=dict)

    def __post_init__(self):
        G, Y = self.group, self.ambient
        ident = FixedComponent(0, "Y", Y, QMatrix.identity(Y.dim), QMatrix.identity(Y.dim), Y)
        given = self.components.get(0)
        if given:
            if len(given) != 1 or given[0].ring is not Y:
                raise ScenarioError("the identity's fixed set must be Y itself")
        self.components[0] = [ident]
        for g in range(G.order):
            self.components.setdefault(g, [])
        for g, comps in self.components.items():
            ids = [c.id for c in comps]
            if len(set(ids)) != len(ids):
                raise ScenarioError(f"duplicate component ids for {G.labels[g]}")
            for c in comps:
                if c.push.nrows != c.ring.dim or c.push.ncols != Y.dim:
                    raise ScenarioError(f"pushforward of {c.id!r} has the wrong shape")
                if c.pull.nrows != Y.dim or c.pull.ncols != c.ring.dim:
                    raise ScenarioError(f"pullback of {c.id!r} has the wrong shape")
                if c.codim < 0 or c.codim % 2:
                    raise ScenarioError(f"component {c.id!r} has invalid codimension {c.codim}")
        self._derive_identity_pairs()
        for g, h in itertools.product(range(1, G.order), repeat=2):
            for cg in self.components[g]:
                for ch in self.components[h]:
                    if (g, h, cg.id, ch.id) not in self.pairs:
                        raise MissingPairData(
                            f"no pair data for ({G.labels[g]}, {G.labels[h]}, {cg.id}, {ch.id})"
                        )
        for key, inters in self.pairs.items():
            g, h, _, _ = key
            gh = G.mul(g, h)
            for it in inters:
                if it.euler.model is not it.ring:
                    raise ScenarioError(f"excess class for {key} lives in the wrong ring")
                if it.euler.coeffs and (it.euler.degree is None or it.euler.degree % 2):
                    raise ScenarioError(f"excess class for {key} must be homogeneous of even degree")
                self.component(gh, it.target)

    def _derive_identity_pairs(self):
        Y = self.ambient
        for h in range(self.group.order):
            for c in self.components[h]:
                ident = QMatrix.identity(c.ring.dim)
                for key, ig, ih in (((0, h, "Y", c.id), c.pull, ident), ((h, 0, c.id, "Y"), ident, c.pull)):
                    if key not in self.pairs:
                        self.pairs[key] = [Intersection(c.ring, ig, ih, c.ring.unit(), c.id, ident)]

    def component(self, g: int, cid: str) -> FixedComponent:
        for c in self.components[g]:
            if c.id == cid:
                return c
        raise ScenarioError(f"{self.group.labels[g]} has no component {cid!r}")

    def module_basis(self) -> list[tuple[int, str, int]]:
        """(g, component id, basis index) for the whole inertia cohomology."""
        return [(g, c.id, k) for g in range(self.group.order) for c in self.components[g] for k in range(c.ring.dim)]

    def virtual_degree(self, g: int, cid: str, k: int) -> int:
        c = self.component(g, cid)
        return c.ring.degrees[k] + c.codim

    def label(self, g: int, cid: str, k: int) -> str:
        c = self.component(g, cid)
        return f"{c.ring.names[k]}@{cid}·{self.group.labels[g]}"

    def issues(self) -> list[str]:
        """Consistency problems that do not block evaluation (degree bookkeeping, projection formula)."""
        out = []
        Y = self.ambient
        for g, comps in self.components.items():
            for c in comps:
                for k in range(c.ring.dim):
                    img = c.pushforward(c.ring.basis_class(k))
                    if img.coeffs and img.degree != c.ring.degrees[k] + c.codim:
                        out.append(f"pushforward of {c.ring.names[k]} on {c.id} has the wrong degree")
                for b in range(Y.dim):
                    bb = Y.basis_class(b)
                    for k in range(c.ring.dim):
                        a = c.ring.basis_class(k)
                        if c.pushforward(c.pullback(bb) * a) != bb * c.pushforward(a):
                            out.append(f"projection formula fails on {c.id} for ({Y.names[b]}, {c.ring.names[k]})")
        for (g, h, a, b), inters in self.pairs.items():
            cg, ch = self.component(g, a), self.component(h, b)
            gh = self.group.mul(g, h)
            for it in inters:
                expected = Y.manifold_dim + it.ring.manifold_dim - cg.dim - ch.dim
                if it.euler.coeffs and it.euler.degree != expected:
                    out.append(
                        f"excess class on ({self.group.labels[g]}, {self.group.labels[h]}, {a}, {b}) has degree "
                        f"{it.euler.degree}, expected {expected}"
                    )
                tgt = self.component(gh, it.target)
                if tgt.dim < it.ring.manifold_dim:
                    out.append(f"intersection is larger than its target component {it.target}")
        return out

    def transport(self, h: int, g: int, cid: str) -> tuple[str, QMatrix] | None:
        """Inertia-level action of h: component of Y^g -> component of Y^{h^-1 g h}."""
        if (h, g, cid) in self.transports:
            return self.transports[(h, g, cid)]
        c = self.component(g, cid)
        if h == 0:
            return cid, QMatrix.identity(c.ring.dim)
        if g == 0:
            return "Y", matrix_of(self.action.maps[h], self.ambient.dim)
        if self.action.kind == "trivial" and self.group.conj(g, h) == g:
            return cid, QMatrix.identity(c.ring.dim)
        return None


VClass = dict[tuple[int, str], CohClass]


def virtual_product(sc: InertiaScenario, g: int, cg: str, alpha: CohClass, h: int, ch: str, beta: CohClass) -> VClass:
    """(alpha, g) . (beta, h) = sum over intersection components of i_{gh!}(i_g^* alpha . i_h^* beta . e)."""
    key = (g, h, cg, ch)
    if key not in sc.pairs:
        raise MissingPairData(f"no pair data for {key}")
    gh = sc.group.mul(g, h)
    out: VClass = {}
    for it in sc.pairs[key]:
        prod = _apply(it.ig, alpha, it.ring) * _apply(it.ih, beta, it.ring) * it.euler
        tgt = sc.component(gh, it.target)
        val = _apply(it.ipush, prod, tgt.ring)
        k = (gh, it.target)
        out[k] = out[k] + val if k in out else val
    return {k: v for k, v in out.items() if v.coeffs}


def to_group_ring(sc: InertiaScenario, x: VClass) -> GroupRingElement:
    """The map f: (alpha, g) -> (f_{g!} alpha) g."""
    out = GroupRingElement(sc.group, sc.ambient)
    for (g, cid), u in x.items():
        out = out + GroupRingElement.single(sc.group, g, sc.component(g, cid).pushforward(u))
    return out


def _basis_vclass(sc: InertiaScenario, g: int, cid: str, k: int) -> VClass:
    return {(g, cid): sc.component(g, cid).ring.basis_class(k)}


def _vmul(sc: InertiaScenario, x: VClass, y: VClass) -> VClass:
    out: VClass = {}
    for (g, a), u in x.items():
        for (h, b), v in y.items():
            for k, w in virtual_product(sc, g, a, u, h, b, v).items():
                out[k] = out[k] + w if k in out else w
    return {k: v for k, v in out.items() if v.coeffs}


@dataclass
class CheckReport:
    name: str
    passed: bool
    checked: int
    violations: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"check": self.name, "verdict": "pass" if self.passed else "fail", "checked": self.checked,
                "violations": self.violations}


def check_homomorphism(sc: InertiaScenario) -> CheckReport:
    """f(a . b) == f(a) f(b) for every pair of component basis classes."""
    basis = sc.module_basis()
    images = {b: to_group_ring(sc, _basis_vclass(sc, *b)) for b in basis}
    bad = []
    for a in basis:
        for b in basis:
            lhs = to_group_ring(sc, _vmul(sc, _basis_vclass(sc, *a), _basis_vclass(sc, *b)))
            rhs = images[a] * images[b]
            if lhs != rhs:
                bad.append({"a": sc.label(*a), "b": sc.label(*b), "f(a.b)": format_element(lhs),
                            "f(a)f(b)": format_element(rhs)})
    return CheckReport("homomorphism", not bad, len(basis) ** 2, bad)


def check_associativity(sc: InertiaScenario) -> CheckReport:
    basis = sc.module_basis()
    vb = {b: _basis_vclass(sc, *b) for b in basis}
    prods = {(a, b): _vmul(sc, vb[a], vb[b]) for a in basis for b in basis}
    bad = []
    for a, b, c in itertools.product(basis, repeat=3):
        lhs = _vmul(sc, prods[(a, b)], vb[c])
        rhs = _vmul(sc, vb[a], prods[(b, c)])
        if lhs != rhs:
            bad.append({"a": sc.label(*a), "b": sc.label(*b), "c": sc.label(*c)})
    return CheckReport("associativity", not bad, len(basis) ** 3, bad)


def check_injectivity(sc: InertiaScenario) -> dict:
    """Rank of the stacked pushforwards of every fixed set; f is injective iff all are full rank."""
    per = []
    for g in range(sc.group.order):
        rows = [r for c in sc.components[g] for r in c.push.rows]
        src = len(rows)
        rk = rank(QMatrix(rows, sc.ambient.dim)) if rows else 0
        per.append({"element": sc.group.labels[g], "source_dim": src, "rank": rk, "kernel_dim": src - rk,
                    "injective": rk == src})
    ok = all(p["injective"] for p in per)
    return {"check": "injectivity", "injective": ok, "verdict": "pass" if ok else "fail", "elements": per,
            "note": None if ok else "image only, f(H*_virt) != H*_virt"}


def _transport_vclass(sc: InertiaScenario, x: VClass, h: int) -> VClass | None:
    out: VClass = {}
    for (g, cid), u in x.items():
        t = sc.transport(h, g, cid)
        if t is None:
            return None
        tid, m = t
        k = (sc.group.conj(g, h), tid)
        val = _apply(m, u, sc.component(k[0], tid).ring)
        out[k] = out[k] + val if k in out else val
    return {k: v for k, v in out.items() if v.coeffs}


def check_equivariance(sc: InertiaScenario) -> CheckReport:
    """f(x.h) == f(x).h on every basis class."""
    bad = []
    n = 0
    for b in sc.module_basis():
        x = _basis_vclass(sc, *b)
        for h in range(sc.group.order):
            y = _transport_vclass(sc, x, h)
            if y is None:
                bad.append({"a": sc.label(*b), "h": sc.group.labels[h], "reason": "no transport data"})
                continue
            n += 1
            if to_group_ring(sc, y) != g_action(to_group_ring(sc, x), h, sc.action):
                bad.append({"a": sc.label(*b), "h": sc.group.labels[h]})
    return CheckReport("equivariance", not bad, n, bad)


@dataclass
class VirtualRing:
    scenario: InertiaScenario
    basis: list[tuple[int, str, int]]
    degrees: list[int]
    table: dict[tuple[int, int], dict[int, Fraction]]
    invariant_dims: list[int] | None

    def dims_table(self) -> dict:
        sc = self.scenario
        top = max(self.degrees) if self.degrees else 0
        degs = list(range(0, top + 1, 2))
        rows = []
        for g in range(sc.group.order):
            dims = [sum(1 for b, d in zip(self.basis, self.degrees) if b[0] == g and d == D) for D in degs]
            rows.append({"element": sc.group.labels[g], "dims": dims})
        return {"degrees": degs, "rows": rows, "total": len(self.basis),
                "by_degree": [sum(r["dims"][i] for r in rows) for i in range(len(degs))]}

    @property
    def integral(self) -> bool:
        return all(c.denominator == 1 for row in self.table.values() for c in row.values())

    def vector(self, x: VClass) -> list[Fraction]:
        v = [Fraction(0)] * len(self.basis)
        pos = {b: i for i, b in enumerate(self.basis)}
        for (g, cid), u in x.items():
            for k, c in u.coeffs.items():
                v[pos[(g, cid, k)]] += c
        return v


def virtual_ring_direct(sc: InertiaScenario, invariants: bool = True) -> VirtualRing:
    """Full virtual cohomology module with all products, plus invariant dimensions when transports exist."""
    basis = sc.module_basis()
    pos = {b: i for i, b in enumerate(basis)}
    degrees = [sc.virtual_degree(*b) for b in basis]
    table = {}
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            prod = _vmul(sc, _basis_vclass(sc, *a), _basis_vclass(sc, *b))
            row = {pos[(g, cid, k)]: c for (g, cid), u in prod.items() for k, c in u.coeffs.items()}
            if row:
                table[(i, j)] = row
    inv = None
    if invariants:
        inv = _invariant_dims(sc, basis, degrees)
    return VirtualRing(sc, basis, degrees, table, inv)


def _invariant_dims(sc, basis, degrees) -> list[int] | None:
    G = sc.group
    pos = {b: i for i, b in enumerate(basis)}
    rows_by_deg: dict[int, list[list[Fraction]]] = {}
    for b, d in zip(basis, degrees):
        x = _basis_vclass(sc, *b)
        v = [Fraction(0)] * len(basis)
        for h in range(G.order):
            y = _transport_vclass(sc, x, h)
            if y is None:
                return None
            for (g, cid), u in y.items():
                for k, c in u.coeffs.items():
                    v[pos[(g, cid, k)]] += c / G.order
        rows_by_deg.setdefault(d, []).append(v)
    top = max(degrees)
    return [rank(QMatrix(rows_by_deg[D], len(basis))) if D in rows_by_deg else 0 for D in range(0, top + 1, 2)]


def replace_euler(sc: InertiaScenario, key: tuple[int, int, str, str], euler: CohClass, index: int = 0) -> InertiaScenario:
    """Copy of the scenario with one excess class replaced (for negative controls)."""
    new_pairs = dict(sc.pairs)
    inters = list(new_pairs[key])
    it = inters[index]
    inters[index] = Intersection(it.ring, it.ig, it.ih, euler, it.target, it.ipush)
    new_pairs[key] = inters
    comps = {g: list(cs) for g, cs in sc.components.items() if g != 0}
    return InertiaScenario(sc.name + "-modified", sc.group, sc.ambient, sc.action, comps, new_pairs,
                           dict(sc.transports))


# -- fixtures -------------------------------------------------------------


def build_scenario_symprod2(M: ManifoldModel) -> InertiaScenario:
    """(M^2, S_2): Y = M x M at the identity, the diagonal at the swap.

    The diagonal meets itself with excess bundle its normal bundle (= TM), so
    the excess class is chi(M) times the top class.
    """
    G = sym_group(2)
    Y = sym_power(M, 2)
    act = sym_action(M, 2)
    tau = 1
    swap = G.perms[tau]
    inc = diagonal_inclusion(M, 2, swap)
    D = inc.source
    push = matrix_of([perm_pushforward(M, 2, swap, D.basis_class(k)) for k in range(D.dim)], Y.dim)
    diag = FixedComponent(tau, "diag", D, push, inc.pull_matrix(), Y)
    ident = QMatrix.identity(D.dim)
    pairs = {
        (tau, tau, "diag", "diag"): [
            Intersection(D, ident, ident, euler_char(M) * D.basis_class(D.top), "Y", push)
        ]
    }
    transports = {(h, tau, "diag"): ("diag", ident) for h in range(G.order)}
    return InertiaScenario("symprod2", G, Y, act, {tau: [diag]}, pairs, transports)


def build_scenario_cpn_zp(n: int, p: int, include_points: bool = True) -> InertiaScenario:
    """Z/p acting on CP^n through the last coordinate.

    Each nontrivial element fixes a hyperplane CP^{n-1} and, optionally, the
    isolated point [0:...:0:1].  Hyperplanes meet in themselves with excess the
    normal bundle O(1), class y; points meet with excess the whole tangent
    space, whose Euler class vanishes on a point; hyperplane and point are disjoint.
    """
    if n < 1 or p < 2:
        raise ValueError("need n >= 1 and p >= 2")
    G = cyclic_group(p)
    Y = make_cp(n, symbol="x")
    H = make_cp(n - 1, symbol="y")
    P = make_cp(0)
    act = trivial_action(G, Y)
    push_H = QMatrix([[1 if j == k + 1 else 0 for j in range(n + 1)] for k in range(n)], n + 1)
    pull_H = QMatrix([[1 if j == a else 0 for j in range(n)] for a in range(n + 1)], n)
    push_P = QMatrix([[1 if j == n else 0 for j in range(n + 1)]], n + 1)
    pull_P = QMatrix([[1 if a == 0 else 0] for a in range(n + 1)], 1)
    comps = {}
    for g in range(1, p):
        cs = [FixedComponent(g, "H", H, push_H, pull_H, Y)]
        if include_points:
            cs.append(FixedComponent(g, "pt", P, push_P, pull_P, Y))
        comps[g] = cs
    idH, idP = QMatrix.identity(H.dim), QMatrix.identity(1)
    e_H = H.basis_class(1) if n >= 2 else H.zero()
    pairs = {}
    for g, h in itertools.product(range(1, p), repeat=2):
        to_id = G.mul(g, h) == 0
        pairs[(g, h, "H", "H")] = [Intersection(H, idH, idH, e_H, "Y" if to_id else "H", push_H if to_id else idH)]
        if include_points:
            pairs[(g, h, "pt", "pt")] = [Intersection(P, idP, idP, P.zero(), "Y" if to_id else "pt",
                                                      push_P if to_id else idP)]
            pairs[(g, h, "H", "pt")] = []
            pairs[(g, h, "pt", "H")] = []
    name = f"cpn-zp(n={n},p={p}{',points' if include_points else ''})"
    return InertiaScenario(name, G, Y, act, comps, pairs)


def component_class(sc: InertiaScenario, g: int, cid: str, coeffs: Mapping) -> VClass:
    return {(g, cid): sc.component(g, cid).ring.cls(coeffs)}


def vproduct(sc: InertiaScenario, x: VClass, y: VClass) -> VClass:
    """Bilinear virtual product of two inertia classes."""
    return _vmul(sc, x, y)
