"""Symmetric products (M^n, S_n).

The fixed set of a permutation is a diagonal copy of M^c, one factor per
cycle.  Pushforwards along these diagonals are computed two ways:

* :func:`perm_pushforward` multiplies a lift of the class by a product of
  diagonal classes ``D_ij`` along each cycle (projection formula), and
* :func:`gysin_oracle` solves the duality equations
  ``<f_! a . b> = <a . f^* b>`` directly, without using any product formula.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactalg import QMatrix, solve_left
from .graded_ring import CohClass, ManifoldModel, tensor_classes, tensor_power
from .group_ring import (
    DEFAULT_MAX_ORDER,
    CohAction,
    FiniteGroup,
    GroupRingElement,
    cycle_decomposition,
    permute_factors_action,
    symmetric_group,
)


class MissingPushforward(ValueError):
    pass


@functools.lru_cache(maxsize=None)
def sym_power(M: ManifoldModel, n: int) -> ManifoldModel:
    """M^n, cached so every caller shares one model object."""
    return tensor_power(M, n)


@functools.lru_cache(maxsize=None)
def sym_group(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    return symmetric_group(n, max_order)


@functools.lru_cache(maxsize=None)
def sym_action(M: ManifoldModel, n: int, max_order: int = DEFAULT_MAX_ORDER) -> CohAction:
    return permute_factors_action(sym_group(n, max_order), sym_power(M, n))


def _cycles(tau: Sequence[int]) -> list[list[int]]:
    return [[i - 1 for i in c] for c in cycle_decomposition(tau)]


class DiagonalInclusion:
    """Inclusion (M^n)^tau = M^c -> M^n, with c the number of cycles of tau.

    Source factor ``k`` is the diagonal of the k-th cycle (cycles ordered by
    their smallest position).
    """

    def __init__(self, M: ManifoldModel, n: int, tau: Sequence[int]):
        tau = tuple(tau)
        if sorted(tau) != list(range(n)):
            raise ValueError(f"{tau} is not a permutation of {n} letters")
        self.M = M
        self.n = n
        self.tau = tau
        self.cycles = _cycles(tau)
        self.source = sym_power(M, len(self.cycles))
        self.target = sym_power(M, n)
        self.pullback = [self._pull_basis(mi) for mi in self.target.multi_index]
        self._check_surjective()

    def _pull_basis(self, mi: tuple[int, ...]) -> CohClass:
        M = self.M
        parts = []
        for cyc in self.cycles:
            u = M.unit()
            for i in cyc:
                u = u * M.basis_class(mi[i])
            parts.append(u)
        return tensor_classes(self.source, parts)

    def _check_surjective(self):
        for sb in self.source.multi_index:
            if self.pullback[self.target.multi_index.index(self.lift_index(sb))] != self.source.basis_class(
                self.source.multi_index.index(sb)
            ):
                raise AssertionError("diagonal pullback is not surjective on the lifted basis")

    @property
    def codim(self) -> int:
        return self.M.manifold_dim * (self.n - len(self.cycles))

    def lift_index(self, source_mi: tuple[int, ...]) -> tuple[int, ...]:
        """Target multi-index with each cycle's factor placed on its smallest position."""
        out = [0] * self.n
        for cyc, k in zip(self.cycles, source_mi):
            out[cyc[0]] = k
        return tuple(out)

    def pull(self, u: CohClass) -> CohClass:
        out = self.source.zero()
        for k, c in u.coeffs.items():
            out = out + c * self.pullback[k]
        return out

    def lift(self, a: CohClass) -> CohClass:
        out = {}
        index = {mi: k for k, mi in enumerate(self.target.multi_index)}
        for k, c in a.coeffs.items():
            out[index[self.lift_index(self.source.multi_index[k])]] = c
        return CohClass(self.target, out)

    def pull_matrix(self) -> QMatrix:
        return QMatrix([u.vector() for u in self.pullback], self.source.dim)


@functools.lru_cache(maxsize=None)
def diagonal_inclusion(M: ManifoldModel, n: int, tau: tuple[int, ...]) -> DiagonalInclusion:
    return DiagonalInclusion(M, n, tau)


def diagonal_class(M: ManifoldModel, n: int, i: int, j: int) -> CohClass:
    """Poincaré dual of {x_i = x_j} in M^n (1-based positions): sum_a e_a (at i) e_a# (at j)."""
    if not (1 <= i < j <= n):
        raise IndexError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    Y = sym_power(M, n)
    duals = M.dual_basis()
    total = Y.zero()
    for a in range(M.dim):
        parts = [M.unit()] * n
        parts[i - 1] = M.basis_class(a)
        parts[j - 1] = duals[a]
        total = total + tensor_classes(Y, parts)
    return total


def cycle_class(M: ManifoldModel, n: int, tau: Sequence[int], tree: str = "path") -> CohClass:
    """f_{tau!}1 as a product of diagonal classes over each cycle.

    ``tree="path"`` joins consecutive sorted positions; ``"star"`` joins every
    position to the smallest one.  Both give the same class.
    """
    Y = sym_power(M, n)
    out = Y.unit()
    for cyc in _cycles(tau):
        pts = sorted(cyc)
        if tree == "path":
            edges = zip(pts, pts[1:])
        elif tree == "star":
            edges = ((pts[0], q) for q in pts[1:])
        else:
            raise ValueError(f"unknown tree shape {tree!r}")
        for a, b in edges:
            out = out * diagonal_class(M, n, a + 1, b + 1)
    return out


def perm_pullback(M: ManifoldModel, n: int, tau: Sequence[int], u: CohClass) -> CohClass:
    return diagonal_inclusion(M, n, tuple(tau)).pull(u)


def perm_pushforward(M: ManifoldModel, n: int, tau: Sequence[int], a: CohClass) -> CohClass:
    """f_{tau!} a = (f_{tau!} 1) * lift(a)."""
    inc = diagonal_inclusion(M, n, tuple(tau))
    if a.model is not inc.source:
        raise ValueError("class does not live on the fixed set of tau")
    return cycle_class(M, n, tau) * inc.lift(a)


def gysin_oracle(M: ManifoldModel, n: int, tau: Sequence[int], a: CohClass) -> CohClass:
    """Pushforward characterised by <f_! a . b>_{M^n} = <a . f^* b>_{M^c} for every basis b."""
    inc = diagonal_inclusion(M, n, tuple(tau))
    Y, X = inc.target, inc.source
    w = [X.integrate(a * inc.pullback[b]) for b in range(Y.dim)]
    v = solve_left(Y.pairing, w)
    if v is None:
        raise ZeroDivisionError("singular pairing")
    return Y.from_vector(v)


@dataclass
class GeneratorSet:
    group: FiniteGroup
    model: ManifoldModel
    elements: list[GroupRingElement] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)

    def add(self, x: GroupRingElement, label: str):
        self.elements.append(x)
        self.labels.append(label)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(zip(self.elements, self.labels))

    def reordered(self, order: Sequence[int]) -> "GeneratorSet":
        return GeneratorSet(self.group, self.model, [self.elements[i] for i in order], [self.labels[i] for i in order])


def ambient_generators(G: FiniteGroup, Y: ManifoldModel) -> GeneratorSet:
    gens = GeneratorSet(G, Y)
    for k in range(Y.dim):
        gens.add(GroupRingElement.single(G, 0, Y.basis_class(k)), f"{Y.names[k]} at 1_G")
    return gens


def generators_symprod(M: ManifoldModel, n: int, max_order: int = DEFAULT_MAX_ORDER) -> GeneratorSet:
    """Ambient basis at the identity plus D_kl (k l) for every transposition."""
    G = sym_group(n, max_order)
    Y = sym_power(M, n)
    gens = ambient_generators(G, Y)
    for k in range(1, n + 1):
        for l in range(k + 1, n + 1):
            p = list(range(n))
            p[k - 1], p[l - 1] = l - 1, k - 1
            gens.add(GroupRingElement.single(G, G.element_for_perm(p), diagonal_class(M, n, k, l)),
                     f"transposition class ({k} {l})")
    return gens


def generators_general(scenario) -> GeneratorSet:
    """Ambient basis at the identity plus (f_{g!} 1) g for every component of every g != 1."""
    G, Y = scenario.group, scenario.ambient
    gens = ambient_generators(G, Y)
    for g in range(1, G.order):
        for comp in scenario.components.get(g, []):
            if comp.push is None:
                raise MissingPushforward(f"component {comp.id!r} of {G.labels[g]} has no pushforward")
            gens.add(GroupRingElement.single(G, g, comp.pushforward(comp.ring.unit())),
                     f"identity class of {G.labels[g]} on {comp.id}")
    return gens


def perm_for(n: int, cycles: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """0-based one-line permutation from 1-based cycles, e.g. ``perm_for(3, [[1, 2, 3]])``."""
    p = list(range(n))
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            p[a - 1] = b - 1
    return tuple(p)


def monomial(Y: ManifoldModel, exps: Sequence[int], coeff=1) -> CohClass:
    """x_1^{e_1} ... x_n^{e_n} in (CP^m)^n, or the matching basis element for other factors."""
    return CohClass(Y, {Y.multi_index.index(tuple(exps)): Fraction(coeff)})
