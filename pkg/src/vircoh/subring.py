"""Subrings of a group ring H*(Y)[G] and presentations of them.

A :class:`GradedSubspace` is stored as a direct sum of blocks indexed by
``(key, degree)`` where a key is a tuple of group elements.  Subrings
generated by elements supported on single group elements use singleton
keys; invariant subrings use conjugacy classes.  Each block keeps an echelon
basis (for membership tests) and a list of representative elements with
their provenance (for reports and structure constants).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import sympy

from .exactalg import QMatrix, coords_in_span, format_scalar, rank, solve_left, subspace_sum, to_scalar
from .graded_ring import RingModel
from .group_ring import CohAction, FiniteGroup, GroupRingElement, format_element, g_action, reynolds
from .sym_product import GeneratorSet


class NotGStable(ValueError):
    pass


class ProductEscapesSubspace(RuntimeError):
    pass


class NonCommutative(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


Key = tuple[int, ...]


@dataclass
class Block:
    key: Key
    deg: int
    cols: list[tuple[int, int]]
    ech: QMatrix
    reps: list[GroupRingElement] = field(default_factory=list)
    provenance: list[str] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.reps)

    def rep_matrix(self) -> QMatrix:
        return QMatrix([block_vector(r, self.cols) for r in self.reps], len(self.cols))


def block_vector(x: GroupRingElement, cols: Sequence[tuple[int, int]]) -> list[Fraction]:
    return [x.terms[g].coeffs.get(k, Fraction(0)) if g in x.terms else Fraction(0) for g, k in cols]


class GradedSubspace:
    def __init__(self, group: FiniteGroup, ambient: RingModel, keys: Sequence[Key]):
        self.group = group
        self.ambient = ambient
        self.keys = [tuple(k) for k in keys]
        self.key_of = {g: k for k in self.keys for g in k}
        if sorted(self.key_of) != list(range(group.order)):
            raise ValueError("keys must partition the group")
        self.degrees = sorted(set(ambient.degrees))
        self.blocks: dict[tuple[Key, int], Block] = {}
        for key in self.keys:
            for d in self.degrees:
                cols = [(g, k) for g in key for k in ambient.degree_indices(d)]
                self.blocks[(key, d)] = Block(key, d, cols, QMatrix([], len(cols)))

    def split(self, x: GroupRingElement) -> dict[tuple[Key, int], list[Fraction]]:
        """Nonzero block components of x."""
        parts: dict[tuple[Key, int], list[Fraction]] = {}
        for g, u in x.terms.items():
            key = self.key_of[g]
            for d in u.degrees():
                b = self.blocks[(key, d)]
                if (key, d) not in parts:
                    parts[(key, d)] = block_vector(x, b.cols)
        return parts

    def add(self, x: GroupRingElement, provenance: str) -> bool:
        """Add a single-block element; returns True if the span grew."""
        parts = self.split(x)
        if not parts:
            return False
        if len(parts) > 1:
            raise ValueError("element spans several blocks; split it first")
        (bk, v), = parts.items()
        b = self.blocks[bk]
        if coords_in_span(b.ech, v) is not None:
            return False
        b.ech = subspace_sum(b.ech, QMatrix([v], len(v)))
        b.reps.append(x)
        b.provenance.append(provenance)
        return True

    def contains(self, x: GroupRingElement) -> bool:
        return all(coords_in_span(self.blocks[bk].ech, v) is not None for bk, v in self.split(x).items())

    def basis(self) -> list[tuple[tuple[Key, int], int, GroupRingElement, str]]:
        out = []
        for key in self.keys:
            for d in self.degrees:
                b = self.blocks[(key, d)]
                for i, (r, p) in enumerate(zip(b.reps, b.provenance)):
                    out.append(((key, d), i, r, p))
        return out

    @property
    def dim(self) -> int:
        return sum(b.dim for b in self.blocks.values())

    def key_label(self, key: Key) -> str:
        return "+".join(self.group.labels[g] for g in key)

    def dims_by_degree(self) -> list[int]:
        top = max(self.degrees)
        return [sum(self.blocks[(k, d)].dim for k in self.keys) if d in self.degrees else 0
                for d in range(0, top + 1, 2)]


def _choose_keys(group: FiniteGroup, elements: Sequence[GroupRingElement]) -> list[Key]:
    if all(len(x.terms) <= 1 for x in elements):
        return [(g,) for g in range(group.order)]
    return [tuple(range(group.order))]


def close_subring(gens: GeneratorSet | Sequence[GroupRingElement], labels: Sequence[str] | None = None) -> GradedSubspace:
    """Span of all words in the generators (the unit included).

    Saturates by right multiplication: every newly found basis element is
    multiplied on the right by every generator until nothing new appears.
    """
    if isinstance(gens, GeneratorSet):
        elements, labels = list(gens.elements), list(gens.labels)
    else:
        elements = list(gens)
        labels = list(labels) if labels is not None else [f"g{i}" for i in range(len(elements))]
    if not elements:
        raise ValueError("empty generator set")
    G, Y = elements[0].group, elements[0].model
    for x in elements:
        if x.group is not G or x.model is not Y:
            raise ValueError("generators live in different group rings")
        if x.terms and x.degree is None:
            raise DegreeMismatch(f"generator {format_element(x)} is not homogeneous")
    S = GradedSubspace(G, Y, _choose_keys(G, elements))
    names = [f"[{lab}]" for lab in labels]
    frontier = []
    unit = GroupRingElement.unit(G, Y)
    if S.add(unit, "1"):
        frontier.append((unit, "1"))
    for x, nm in zip(elements, names):
        if S.add(x, nm):
            frontier.append((x, nm))
    while frontier:
        new = []
        for r, w in frontier:
            for x, nm in zip(elements, names):
                y = r * x
                word = nm if w == "1" else f"{w}*{nm}"
                if y.terms and S.add(y, word):
                    new.append((y, word))
        frontier = new
    return S


def dims_table(s: GradedSubspace) -> dict:
    """Dimensions per key and degree, in group-element and degree order."""
    top = max(s.degrees)
    degs = list(range(0, top + 1, 2))
    rows = []
    for key in s.keys:
        dims = [s.blocks[(key, d)].dim if d in s.degrees else 0 for d in degs]
        rows.append({"element": s.key_label(key), "dims": dims})
    return {"degrees": degs, "rows": rows, "total": s.dim, "by_degree": s.dims_by_degree()}


def member(s: GradedSubspace, x: GroupRingElement) -> dict | None:
    """Coordinates of x over each block's representatives, or None if x is not in s."""
    out = {}
    for bk, v in s.split(x).items():
        b = s.blocks[bk]
        if coords_in_span(b.ech, v) is None:
            return None
        c = solve_left(b.rep_matrix(), v)
        out[bk] = c
    return out


def check_g_stable(s: GradedSubspace, act: CohAction) -> list[tuple[str, str]]:
    bad = []
    for _, _, r, p in s.basis():
        for h in range(s.group.order):
            if not s.contains(g_action(r, h, act)):
                bad.append((p, s.group.labels[h]))
    return bad


def check_closure(s: GradedSubspace) -> list[tuple[str, str]]:
    """Pairs of basis elements whose product leaves s."""
    basis = s.basis()
    return [(p, q) for _, _, r, p in basis for _, _, t, q in basis if not s.contains(r * t)]


def primitive(x: GroupRingElement) -> GroupRingElement:
    """Positive rational multiple of x with coprime integer coefficients."""
    coeffs = [c for u in x.terms.values() for c in u.coeffs.values()]
    if not coeffs:
        return x
    den = math.lcm(*(c.denominator for c in coeffs))
    num = math.gcd(*(int(c * den) for c in coeffs))
    return x * Fraction(den, num)


def invariant_subring(s: GradedSubspace, act: CohAction, verify: bool = True) -> GradedSubspace:
    """G-invariant part of a G-stable subring, via the Reynolds operator."""
    bad = check_g_stable(s, act)
    if bad:
        raise NotGStable(f"{len(bad)} basis images leave the subspace, first: {bad[0]}")
    G = s.group
    if all(len(k) == 1 for k in s.keys):
        keys = G.conjugacy_classes()
    else:
        keys = s.keys
    inv = GradedSubspace(G, s.ambient, keys)
    for _, _, r, p in s.basis():
        inv.add(primitive(reynolds(r, act)), f"R({p})")
    if verify:
        bad = check_closure(inv)
        if bad:
            raise ProductEscapesSubspace(f"invariant subspace not closed: {bad[0]}")
    return inv


@dataclass
class StructureConstants:
    labels: list[str]
    elements: list[GroupRingElement]
    table: dict[tuple[int, int], dict[int, Fraction]]

    @property
    def integral(self) -> bool:
        return all(c.denominator == 1 for row in self.table.values() for c in row.values())

    def non_integral(self) -> list[tuple[int, int, int, Fraction]]:
        return [(i, j, k, c) for (i, j), row in self.table.items() for k, c in row.items() if c.denominator != 1]

    def product(self, i: int, j: int) -> dict[int, Fraction]:
        return self.table.get((i, j), {})


def structure_constants(s: GradedSubspace) -> StructureConstants:
    """Products of representative basis elements expanded in the same basis."""
    basis = s.basis()
    offset: dict[tuple[Key, int], int] = {}
    for n, (bk, i, _, _) in enumerate(basis):
        if i == 0:
            offset[bk] = n
    rep_mats = {bk: s.blocks[bk].rep_matrix() for bk in offset}
    table = {}
    for a, (_, _, x, _) in enumerate(basis):
        for b, (_, _, y, _) in enumerate(basis):
            row: dict[int, Fraction] = {}
            for bk, v in s.split(x * y).items():
                c = solve_left(rep_mats[bk], v) if bk in rep_mats else None
                if c is None:
                    raise ProductEscapesSubspace(f"{basis[a][3]} * {basis[b][3]} leaves the subspace")
                for i, ci in enumerate(c):
                    if ci:
                        row[offset[bk] + i] = ci
            if row:
                table[(a, b)] = row
    return StructureConstants([p for *_, p in basis], [x for _, _, x, _ in basis], table)


# -- presentations --------------------------------------------------------

Poly = dict[tuple[int, ...], Fraction]


@dataclass
class Presentation:
    names: list[str]
    degrees: list[int]
    relations: list[Poly]
    coefficients: str = "rationals"

    def __post_init__(self):
        for nm, d in zip(self.names, self.degrees):
            if d <= 0 or d % 2:
                raise DegreeMismatch(f"generator {nm} must have positive even degree, got {d}")
        for r in self.relations:
            if len({self.monomial_degree(e) for e in r}) > 1:
                raise DegreeMismatch(f"relation {self.format(r)} is not homogeneous")

    def monomial_degree(self, exps: Sequence[int]) -> int:
        return sum(e * d for e, d in zip(exps, self.degrees))

    def relation_degree(self, r: Poly) -> int:
        return self.monomial_degree(next(iter(r))) if r else 0

    def format(self, r: Poly) -> str:
        if not r:
            return "0"
        parts = []
        for exps in sorted(r, reverse=True):
            c = r[exps]
            mono = "*".join(nm if e == 1 else f"{nm}^{e}" for nm, e in zip(self.names, exps) if e)
            if not mono:
                term = format_scalar(abs(c))
            elif abs(c) == 1:
                term = mono
            else:
                term = f"{format_scalar(abs(c))}*{mono}"
            parts.append(("- " if c < 0 else "+ ") + term)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    @classmethod
    def from_strings(cls, generators: Sequence[tuple[str, int]], relations: Sequence[str], **kw) -> "Presentation":
        names = [g for g, _ in generators]
        return cls(names, [d for _, d in generators], [parse_polynomial(r, names) for r in relations], **kw)


def parse_polynomial(text: str, names: Sequence[str]) -> Poly:
    """Parse e.g. ``"u^2 - 2*x*y"`` into an exponent-tuple map."""
    syms = sympy.symbols(list(names))
    local = {nm: s for nm, s in zip(names, syms)}
    expr = sympy.sympify(text.replace("^", "**"), locals=local)
    extra = expr.free_symbols - set(syms)
    if extra:
        raise ValueError(f"unknown generator(s) {sorted(map(str, extra))} in {text!r}")
    poly = sympy.Poly(sympy.expand(expr), *syms, domain="QQ")
    out: Poly = {}
    for exps, c in poly.terms():
        out[tuple(int(e) for e in exps)] = Fraction(int(c.p), int(c.q))
    return out


def _monomials(degrees: Sequence[int], total: int) -> list[tuple[int, ...]]:
    out = []

    def rec(i, left, acc):
        if i == len(degrees):
            if left == 0:
                out.append(tuple(acc))
            return
        for e in range(left // degrees[i] + 1):
            rec(i + 1, left - e * degrees[i], acc + [e])

    rec(0, total, [])
    return sorted(out, reverse=True)


def quotient_dims(p: Presentation, up_to_degree: int) -> list[int]:
    """Dimensions of Q[gens]/(relations) in degrees 0, 2, ..., up_to_degree.

    In each degree the ideal is spanned by relation * monomial products, so the
    quotient dimension is #monomials minus the rank of that span.
    """
    dims = []
    for D in range(0, up_to_degree + 1, 2):
        monos = _monomials(p.degrees, D)
        if not monos:
            dims.append(0)
            continue
        pos = {m: i for i, m in enumerate(monos)}
        rows = []
        for r in p.relations:
            dr = p.relation_degree(r)
            if not r or dr > D:
                continue
            for m in _monomials(p.degrees, D - dr):
                v = [Fraction(0)] * len(monos)
                for e, c in r.items():
                    v[pos[tuple(a + b for a, b in zip(e, m))]] += c
                rows.append(v)
        rk = rank(QMatrix(rows, len(monos))) if rows else 0
        dims.append(len(monos) - rk)
    return dims


def evaluate(p: Presentation, r: Poly, assignment: Sequence[GroupRingElement]) -> GroupRingElement:
    G, Y = assignment[0].group, assignment[0].model
    total = GroupRingElement(G, Y)
    powers: dict[tuple[int, int], GroupRingElement] = {}

    def power(i, e):
        if (i, e) not in powers:
            powers[(i, e)] = assignment[i] ** e
        return powers[(i, e)]

    for exps, c in r.items():
        term = GroupRingElement.unit(G, Y)
        for i, e in enumerate(exps):
            if e:
                term = term * power(i, e)
        total = total + c * term
    return total


@dataclass
class PresentationReport:
    relations: list[dict]
    generates: bool
    quotient_dims: list[int]
    subring_dims: list[int]
    degrees: list[int]

    @property
    def relations_hold(self) -> bool:
        return all(r["holds"] for r in self.relations)

    @property
    def dims_match(self) -> bool:
        return self.quotient_dims == self.subring_dims

    @property
    def passed(self) -> bool:
        return self.relations_hold and self.generates and self.dims_match

    def failing_relations(self) -> list[str]:
        return [r["relation"] for r in self.relations if not r["holds"]]

    def to_dict(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "relations": self.relations,
            "generates": self.generates,
            "degrees": self.degrees,
            "quotient_dims": self.quotient_dims,
            "subring_dims": self.subring_dims,
            "dims_match": self.dims_match,
        }


def same_subspace(a: GradedSubspace, b: GradedSubspace) -> bool:
    return a.dim == b.dim and all(b.contains(r) for *_, r, _ in a.basis()) and all(
        a.contains(r) for *_, r, _ in b.basis()
    )


def verify_presentation(
    s: GradedSubspace, p: Presentation, assignment: Mapping[str, GroupRingElement]
) -> PresentationReport:
    """Check that s is isomorphic to the presented ring under the assignment.

    Passes iff every relation vanishes, the assigned elements generate s, and
    the graded dimensions of the quotient match those of s.  Given the first
    two, the induced map from the quotient onto s is surjective, so equal
    dimensions make it an isomorphism.
    """
    missing = [nm for nm in p.names if nm not in assignment]
    if missing:
        raise ValueError(f"no assignment for generator(s) {missing}")
    elems = [assignment[nm] for nm in p.names]
    for nm, d, x in zip(p.names, p.degrees, elems):
        if x.degree != d:
            raise DegreeMismatch(f"{nm} has degree {d} but is assigned {format_element(x)}")
        if not s.contains(x):
            raise ValueError(f"{nm} is assigned an element outside the subring")
    if not s.group.is_abelian():
        for (a, x), (b, y) in itertools.combinations(zip(p.names, elems), 2):
            if x * y != y * x:
                raise NonCommutative(f"{a} and {b} do not commute")
    rels = []
    for r in p.relations:
        val = evaluate(p, r, elems)
        rels.append({"relation": p.format(r), "holds": val.is_zero(), "value": format_element(val)})
    regen = close_subring(elems, p.names)
    generates = same_subspace(regen, s)
    sub = s.dims_by_degree()
    top = 2 * (len(sub) - 1)
    cap = top + max(p.degrees)
    qd = quotient_dims(p, cap)
    sub_ext = sub + [0] * (len(qd) - len(sub))
    return PresentationReport(rels, generates, qd, sub_ext, list(range(0, cap + 1, 2)))


def element_from_literal(group: FiniteGroup, model: RingModel, literal) -> GroupRingElement:
    """Group-ring element from ``[{"g": label|index, "class": {basis name: "num/den"}}]``."""
    out = GroupRingElement(group, model)
    for term in literal:
        g = group.index(term["g"])
        cls = model.cls({k: to_scalar(c) for k, c in term["class"].items()})
        out = out + GroupRingElement.single(group, g, cls)
    return out
