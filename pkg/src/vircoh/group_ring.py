"""Finite groups, the group ring H*(Y)[G] and the G-action on it.

Conventions
-----------
Permutations are stored 0-based in one-line notation and multiplied as maps,
``(g*h)(i) = g(h(i))``.  With the right action ``(x.h)_i = x_{h(i)}`` on
``Y = M^n`` this gives ``x.(gh) = (x.g).h``.  The cohomology action of ``h``
is ``(h^{-1})^*``, sending the class of factor ``i`` to factor ``h^{-1}(i)``,
and ``(alpha g).h = ((h^{-1})^* alpha) (h^{-1} g h)``.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Mapping, Sequence

from .exactalg import to_scalar
from .graded_ring import CohClass, ManifoldModel, ModelMismatch, RingModel, format_class

DEFAULT_MAX_ORDER = 720


class NotAGroup(ValueError):
    pass


class TooLarge(ValueError):
    pass


class NotAnAction(ValueError):
    pass


def perm_label(p: Sequence[int]) -> str:
    cycles = [c for c in cycle_decomposition(p) if len(c) > 1]
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles) or "()"


def cycle_decomposition(p: Sequence[int]) -> list[list[int]]:
    """Disjoint cycles of a 0-based permutation, reported 1-based.

    Each cycle starts at its smallest entry and follows ``i -> p(i)``; cycles
    (fixed points included) are sorted by their smallest entry.
    """
    n = len(p)
    seen = [False] * n
    out = []
    for i in range(n):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j + 1)
            j = p[j]
        out.append(cyc)
    return out


class FiniteGroup:
    """Group given by a multiplication table on ``range(order)``, identity at 0."""

    def __init__(self, labels: Sequence[str], mul: Sequence[Sequence[int]], *, kind: str = "table",
                 perms: Sequence[tuple[int, ...]] | None = None, validate: bool = True):
        self.labels = tuple(labels)
        self.order = len(self.labels)
        self.mul_table = tuple(tuple(int(v) for v in row) for row in mul)
        self.kind = kind
        self.perms = tuple(perms) if perms is not None else None
        if validate:
            self._validate()
        self.inv_table = tuple(next(b for b in range(self.order) if self.mul_table[a][b] == 0)
                               for a in range(self.order))
        self._index = {lab: i for i, lab in enumerate(self.labels)}

    def _validate(self):
        n = self.order
        if n == 0:
            raise NotAGroup("empty group")
        if len(set(self.labels)) != n:
            raise NotAGroup("element labels must be distinct")
        if len(self.mul_table) != n or any(len(r) != n for r in self.mul_table):
            raise NotAGroup("multiplication table must be square of size |G|")
        t = self.mul_table
        if any(not (0 <= v < n) for r in t for v in r):
            raise NotAGroup("multiplication table entry out of range")
        for a in range(n):
            if t[0][a] != a or t[a][0] != a:
                raise NotAGroup("element 0 is not the identity")
            if sorted(t[a]) != list(range(n)):
                raise NotAGroup(f"row {a} is not a permutation (no inverses)")
        for a, b, c in itertools.product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise NotAGroup(f"multiplication is not associative at ({a},{b},{c})")

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        return self.inv_table[a]

    def conj(self, g: int, h: int) -> int:
        """h^{-1} g h"""
        return self.mul(self.mul(self.inv(h), g), h)

    def index(self, label: str | int) -> int:
        if isinstance(label, int):
            if not 0 <= label < self.order:
                raise KeyError(f"group element index {label} out of range")
            return label
        if label in self._index:
            return self._index[label]
        alt = label.replace("lambda", "λ").replace(" ", "") if isinstance(label, str) else label
        for lab, i in self._index.items():
            if lab.replace(" ", "") == alt:
                return i
        raise KeyError(f"no group element {label!r}")

    def is_abelian(self) -> bool:
        t = self.mul_table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def conjugacy_classes(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for g in range(self.order):
            if g in seen:
                continue
            cls = tuple(sorted({self.conj(g, h) for h in range(self.order)}))
            seen.update(cls)
            out.append(cls)
        return out

    def transpositions(self) -> list[int]:
        if self.perms is None:
            return []
        return [i for i, p in enumerate(self.perms) if sum(1 for k, v in enumerate(p) if k != v) == 2]

    def element_for_perm(self, p: Sequence[int]) -> int:
        return self.perms.index(tuple(p))

    def __repr__(self):
        return f"FiniteGroup({self.kind}, order={self.order})"


def symmetric_group(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if n < 1:
        raise ValueError("n must be positive")
    if math.factorial(n) > max_order:
        raise TooLarge(f"|S_{n}| = {math.factorial(n)} exceeds the cap {max_order}")
    perms = list(itertools.permutations(range(n)))
    pos = {p: i for i, p in enumerate(perms)}
    mul = [[pos[tuple(g[h[i]] for i in range(n))] for h in perms] for g in perms]
    return FiniteGroup([perm_label(p) for p in perms], mul, kind="symmetric", perms=perms, validate=False)


def cyclic_group(p: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if p < 1:
        raise ValueError("p must be positive")
    if p > max_order:
        raise TooLarge(f"|Z/{p}| exceeds the cap {max_order}")
    labels = ["1"] + ["λ" if i == 1 else f"λ^{i}" for i in range(1, p)]
    mul = [[(a + b) % p for b in range(p)] for a in range(p)]
    return FiniteGroup(labels, mul, kind="cyclic", validate=False)


def build_group(spec: Mapping, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    kind = spec.get("kind")
    if kind == "symmetric":
        return symmetric_group(int(spec["n"]), max_order)
    if kind == "cyclic":
        return cyclic_group(int(spec["p"]), max_order)
    if kind == "table":
        if len(spec["elements"]) > max_order:
            raise TooLarge(f"group of order {len(spec['elements'])} exceeds the cap {max_order}")
        return FiniteGroup(spec["elements"], spec["mul"])
    raise ValueError(f"unknown group kind {kind!r}")


def group_to_spec(g: FiniteGroup) -> dict:
    if g.kind == "symmetric":
        return {"kind": "symmetric", "n": len(g.perms[0])}
    if g.kind == "cyclic":
        return {"kind": "cyclic", "p": g.order}
    return {"kind": "table", "elements": list(g.labels), "mul": [list(r) for r in g.mul_table]}


class CohAction:
    """Right action of G on H*(Y) by degree-preserving ring automorphisms.

    ``maps[h][i]`` is the image of basis element ``i`` under ``(h^{-1})^*``.
    """

    def __init__(self, group: FiniteGroup, model: RingModel, maps: Sequence[Sequence[CohClass]],
                 kind: str = "custom", validate: bool = True):
        self.group = group
        self.model = model
        self.maps = tuple(tuple(m) for m in maps)
        self.kind = kind
        if validate:
            self._validate()

    def _validate(self):
        G, M = self.group, self.model
        if len(self.maps) != G.order:
            raise NotAnAction("one map per group element is required")
        for i in range(M.dim):
            if self.maps[0][i] != M.basis_class(i):
                raise NotAnAction("the identity must act trivially")
        for h in range(G.order):
            for i in range(M.dim):
                img = self.maps[h][i]
                if img.model is not M or (img.coeffs and img.degree != M.degrees[i]):
                    raise NotAnAction(f"action of {G.labels[h]} does not preserve degrees")
            for i in range(M.dim):
                for j in range(M.dim):
                    if self.apply(M.basis_class(i) * M.basis_class(j), h) != self.maps[h][i] * self.maps[h][j]:
                        raise NotAnAction(f"action of {G.labels[h]} is not multiplicative")
        for h, k in itertools.product(range(G.order), repeat=2):
            hk = G.mul(h, k)
            for i in range(M.dim):
                if self.apply(self.maps[h][i], k) != self.maps[hk][i]:
                    raise NotAnAction("maps do not compose as a right action")

    def apply(self, u: CohClass, h: int) -> CohClass:
        img = self.maps[h]
        out: dict[int, Fraction] = {}
        for i, c in u.coeffs.items():
            for k, d in img[i].coeffs.items():
                out[k] = out.get(k, Fraction(0)) + c * d
        return CohClass(u.model, out)


def trivial_action(group: FiniteGroup, model: RingModel) -> CohAction:
    basis = model.basis()
    return CohAction(group, model, [basis] * group.order, kind="trivial", validate=False)


def permute_factors_action(group: FiniteGroup, model: ManifoldModel) -> CohAction:
    """Factor permutation on M^n: the factor at position i moves to position h^{-1}(i)."""
    if group.perms is None:
        raise NotAnAction("factor permutation needs a symmetric group")
    n = len(model.factors)
    index = {mi: k for k, mi in enumerate(model.multi_index)}
    maps = []
    for p in group.perms:
        # b_j = a_{h(j)}
        maps.append([model.basis_class(index[tuple(mi[p[j]] for j in range(n))]) for mi in model.multi_index])
    return CohAction(group, model, maps, kind="permute_factors", validate=False)


class GroupRingElement:
    """Finite sum of terms ``alpha_g g`` with alpha_g in H*(Y)."""

    __slots__ = ("group", "model", "terms")

    def __init__(self, group: FiniteGroup, model: RingModel, terms: Mapping[int, CohClass] | None = None):
        self.group = group
        self.model = model
        self.terms = {}
        for g, u in (terms or {}).items():
            if u.model is not model:
                raise ModelMismatch("coefficient lives in a different ring model")
            if u.coeffs:
                self.terms[g] = u

    @classmethod
    def single(cls, group: FiniteGroup, g: int, u: CohClass) -> "GroupRingElement":
        return cls(group, u.model, {g: u})

    @classmethod
    def unit(cls, group: FiniteGroup, model: RingModel) -> "GroupRingElement":
        return cls(group, model, {0: model.unit()})

    def _check(self, other: "GroupRingElement"):
        if other.group is not self.group or other.model is not self.model:
            raise ModelMismatch("elements live in different group rings")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        out = dict(self.terms)
        for g, u in other.terms.items():
            out[g] = out[g] + u if g in out else u
        return GroupRingElement(self.group, self.model, out)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement(self.group, self.model, {g: -u for g, u in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GroupRingElement):
            return gr_multiply(self, other)
        c = to_scalar(other)
        return GroupRingElement(self.group, self.model, {g: c * u for g, u in self.terms.items()})

    def __rmul__(self, other):
        return self * other

    def __pow__(self, e: int):
        out = GroupRingElement.unit(self.group, self.model)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return other.group is self.group and other.model is self.model and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted((g, hash(u)) for g, u in self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return set().union(*(u.degrees() for u in self.terms.values())) if self.terms else set()

    @property
    def degree(self) -> int | None:
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def coefficient(self, g: int) -> CohClass:
        return self.terms.get(g, self.model.zero())

    def __repr__(self):
        return f"GroupRingElement({format_element(self)})"


def gr_multiply(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    """(alpha g)(beta h) = (alpha beta)(gh), untwisted."""
    x._check(y)
    G = x.group
    out: dict[int, CohClass] = {}
    for g, a in x.terms.items():
        for h, b in y.terms.items():
            gh = G.mul(g, h)
            ab = a * b
            out[gh] = out[gh] + ab if gh in out else ab
    return GroupRingElement(G, x.model, out)


def g_action(x: GroupRingElement, h: int, act: CohAction) -> GroupRingElement:
    """x.h: each term (alpha, g) goes to ((h^{-1})^* alpha, h^{-1} g h)."""
    G = x.group
    out: dict[int, CohClass] = {}
    for g, a in x.terms.items():
        k = G.conj(g, h)
        img = act.apply(a, h)
        out[k] = out[k] + img if k in out else img
    return GroupRingElement(G, x.model, out)


def reynolds(x: GroupRingElement, act: CohAction) -> GroupRingElement:
    """Average of x.h over h in G."""
    total = GroupRingElement(x.group, x.model)
    for h in range(x.group.order):
        total = total + g_action(x, h, act)
    return total * Fraction(1, x.group.order)


def format_element(x: GroupRingElement) -> str:
    if not x.terms:
        return "0"
    parts = []
    for g in sorted(x.terms):
        u = x.terms[g]
        s = format_class(u)
        if len(u.coeffs) > 1:
            s = f"({s})"
        parts.append(f"{s}·{x.group.labels[g]}")
    return " + ".join(parts)

