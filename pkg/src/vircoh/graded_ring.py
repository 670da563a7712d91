"""Finite graded commutative rings with Poincaré duality.

Only even degrees are representable, so no Koszul signs ever appear.  A ring
is given by an ordered homogeneous basis (``basis[0]`` is the unit) and sparse
structure constants ``e_i * e_j = sum_k c_ijk e_k``.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exactalg import QMatrix, format_scalar, inverse, rank, to_scalar


class RingModelError(ValueError):
    pass


class OddDegree(RingModelError):
    pass


class NonAssociative(RingModelError):
    pass


class NonCommutative(RingModelError):
    pass


class NotGraded(RingModelError):
    pass


class NoUnit(RingModelError):
    pass


class DegeneratePairing(RingModelError):
    pass


class ModelMismatch(ValueError):
    pass


Terms = tuple[tuple[int, Fraction], ...]


class RingModel:
    """Graded commutative ring on a finite homogeneous basis."""

    def __init__(
        self,
        names: Sequence[str],
        degrees: Sequence[int],
        products: Mapping[tuple[int, int], Mapping[int, Fraction] | Iterable[tuple[int, Fraction]]],
        *,
        validate: bool = True,
    ):
        if not names:
            raise NoUnit("empty basis")
        if len(names) != len(degrees):
            raise RingModelError("names and degrees differ in length")
        if len(set(names)) != len(names):
            raise RingModelError("basis names must be distinct")
        self.names = tuple(names)
        self.degrees = tuple(int(d) for d in degrees)
        for nm, d in zip(self.names, self.degrees):
            if d % 2:
                raise OddDegree(f"basis element {nm!r} has odd degree {d}")
            if d < 0:
                raise NotGraded(f"basis element {nm!r} has negative degree {d}")
        if self.degrees[0] != 0:
            raise NoUnit("basis[0] must be the unit in degree 0")
        n = len(self.names)
        self._index = {nm: i for i, nm in enumerate(self.names)}

        table: dict[tuple[int, int], Terms] = {}
        for (i, j), terms in products.items():
            items = terms.items() if isinstance(terms, Mapping) else terms
            acc: dict[int, Fraction] = {}
            for k, c in items:
                c = to_scalar(c)
                if not (0 <= k < n):
                    raise RingModelError(f"product ({i},{j}) refers to basis index {k}")
                acc[k] = acc.get(k, Fraction(0)) + c
            table[(i, j)] = tuple(sorted((k, c) for k, c in acc.items() if c != 0))
        for (i, j) in list(table):
            if (j, i) not in table:
                table[(j, i)] = table[(i, j)]
        for j in range(n):
            unit_row = ((j, Fraction(1)),)
            for key in ((0, j), (j, 0)):
                if key not in table:
                    table[key] = unit_row
                elif table[key] != unit_row:
                    raise NoUnit(f"basis[0] * {self.names[j]} is not {self.names[j]}")
        self._table = table

        if validate:
            self._validate()

    # -- structure -------------------------------------------------------
    def _validate(self):
        n = self.dim
        for (i, j), terms in self._table.items():
            if self._table.get((j, i), ()) != terms:
                raise NonCommutative(f"{self.names[i]}*{self.names[j]} != {self.names[j]}*{self.names[i]}")
            for k, _ in terms:
                if self.degrees[k] != self.degrees[i] + self.degrees[j]:
                    raise NotGraded(
                        f"{self.names[i]}*{self.names[j]} has a term {self.names[k]} of the wrong degree"
                    )
        for i, j, k in itertools.product(range(n), repeat=3):
            if self.degrees[i] + self.degrees[j] + self.degrees[k] > self.top_degree:
                continue
            lhs = self._mul_vec(self._mul_basis_dict(i, j), k)
            rhs = self._mul_vec(self._mul_basis_dict(j, k), i, left=False)
            if lhs != rhs:
                raise NonAssociative(
                    f"({self.names[i]}*{self.names[j]})*{self.names[k]} != "
                    f"{self.names[i]}*({self.names[j]}*{self.names[k]})"
                )

    def _mul_basis_dict(self, i: int, j: int) -> dict[int, Fraction]:
        return dict(self._table.get((i, j), ()))

    def _mul_vec(self, vec: Mapping[int, Fraction], k: int, left: bool = True) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for i, c in vec.items():
            key = (i, k) if left else (k, i)
            for m, d in self._table.get(key, ()):
                out[m] = out.get(m, Fraction(0)) + c * d
        return {m: c for m, c in out.items() if c != 0}

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def top_degree(self) -> int:
        return max(self.degrees)

    def mul_basis(self, i: int, j: int) -> Terms:
        return self._table.get((i, j), ())

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no basis element named {name!r}") from None

    def degree_indices(self, deg: int) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d == deg]

    def dims_by_degree(self) -> list[int]:
        """Dimensions of the components in degrees 0, 2, ..., top."""
        return [len(self.degree_indices(d)) for d in range(0, self.top_degree + 1, 2)]

    def same_structure(self, other: "RingModel") -> bool:
        """Equal as rings on the same ordered basis, ignoring names."""
        return (
            self.degrees == other.degrees
            and all(self.mul_basis(i, j) == other.mul_basis(i, j) for i in range(self.dim) for j in range(self.dim))
        )

    # -- classes ---------------------------------------------------------
    def cls(self, coeffs: Mapping | None = None) -> "CohClass":
        out = {}
        for key, c in (coeffs or {}).items():
            k = self.index(key) if isinstance(key, str) else int(key)
            out[k] = out.get(k, Fraction(0)) + to_scalar(c)
        return CohClass(self, out)

    def basis_class(self, i: int) -> "CohClass":
        return CohClass(self, {i: Fraction(1)})

    def basis(self) -> list["CohClass"]:
        return [self.basis_class(i) for i in range(self.dim)]

    def unit(self) -> "CohClass":
        return self.basis_class(0)

    def zero(self) -> "CohClass":
        return CohClass(self, {})

    def from_vector(self, v: Sequence) -> "CohClass":
        return CohClass(self, {i: to_scalar(c) for i, c in enumerate(v)})

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, degrees={list(self.degrees)})"


class ManifoldModel(RingModel):
    """Cohomology ring of a closed connected oriented even-dimensional manifold.

    The top degree component must be spanned by a single basis element, the
    fundamental class, and the Poincaré pairing must be nondegenerate.
    """

    def __init__(self, names, degrees, products, dim: int, *, validate: bool = True, symbol: str | None = None):
        super().__init__(names, degrees, products, validate=validate)
        self.manifold_dim = int(dim)
        if self.manifold_dim % 2:
            raise OddDegree(f"manifold dimension {dim} is odd")
        tops = self.degree_indices(self.manifold_dim)
        if len(tops) != 1:
            raise DegeneratePairing(f"degree {dim} must be spanned by exactly one basis element, found {len(tops)}")
        if self.top_degree != self.manifold_dim:
            raise NotGraded(f"basis has degree {self.top_degree} above the manifold dimension {dim}")
        self.top = tops[0]
        self.symbol = symbol
        self.spec: dict | None = None
        self.factors: tuple[ManifoldModel, ...] = ()
        self.multi_index: tuple[tuple[int, ...], ...] = ()
        self._pairing: QMatrix | None = None
        self._dual: list[CohClass] | None = None
        if validate:
            self.dual_basis()

    def integrate(self, u: "CohClass") -> Fraction:
        """Coefficient of the fundamental class."""
        return u.coeffs.get(self.top, Fraction(0))

    @property
    def pairing(self) -> QMatrix:
        if self._pairing is None:
            n = self.dim
            rows = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                for j in range(n):
                    for k, c in self.mul_basis(i, j):
                        if k == self.top:
                            rows[i][j] = c
            self._pairing = QMatrix(rows, n)
        return self._pairing

    def dual_basis(self) -> list["CohClass"]:
        """Classes e_j# with <e_i * e_j#> = delta_ij."""
        if self._dual is None:
            P = self.pairing
            if rank(P) != self.dim:
                raise DegeneratePairing("Poincaré pairing is degenerate")
            Q = inverse(P)
            self._dual = [self.from_vector([Q[k, j] for k in range(self.dim)]) for j in range(self.dim)]
        return self._dual

    def euler_char(self) -> int:
        return euler_char(self)


class CohClass:
    """Element of a :class:`RingModel`, stored as a sparse coefficient map."""

    __slots__ = ("model", "coeffs")

    def __init__(self, model: RingModel, coeffs: Mapping[int, Fraction]):
        self.model = model
        self.coeffs = {k: Fraction(c) for k, c in coeffs.items() if c != 0}

    def _check(self, other: "CohClass"):
        if other.model is not self.model:
            raise ModelMismatch("classes live in different ring models")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + c
        return CohClass(self.model, out)

    __radd__ = __add__

    def __neg__(self):
        return CohClass(self.model, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, CohClass):
            return multiply(self, other)
        c = to_scalar(other)
        return CohClass(self.model, {k: c * v for k, v in self.coeffs.items()})

    def __rmul__(self, other):
        c = to_scalar(other)
        return CohClass(self.model, {k: c * v for k, v in self.coeffs.items()})

    def __pow__(self, e: int):
        out = self.model.unit()
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.coeffs
        if not isinstance(other, CohClass):
            return NotImplemented
        return other.model is self.model and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.model), tuple(sorted(self.coeffs.items()))))

    def is_zero(self) -> bool:
        return not self.coeffs

    def vector(self) -> list[Fraction]:
        v = [Fraction(0)] * self.model.dim
        for k, c in self.coeffs.items():
            v[k] = c
        return v

    def degrees(self) -> set[int]:
        return {self.model.degrees[k] for k in self.coeffs}

    @property
    def degree(self) -> int | None:
        """Degree of a nonzero homogeneous class; ``None`` for 0 or mixed classes."""
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def homogeneous_part(self, deg: int) -> "CohClass":
        return CohClass(self.model, {k: c for k, c in self.coeffs.items() if self.model.degrees[k] == deg})

    def __repr__(self):
        return f"CohClass({format_class(self)})"


def multiply(u: CohClass, v: CohClass) -> CohClass:
    """Cup product from the structure constants."""
    u._check(v)
    m = u.model
    out: dict[int, Fraction] = {}
    for i, a in u.coeffs.items():
        for j, b in v.coeffs.items():
            for k, c in m.mul_basis(i, j):
                out[k] = out.get(k, Fraction(0)) + a * b * c
    return CohClass(m, out)


def format_class(u: CohClass) -> str:
    if not u.coeffs:
        return "0"
    parts = []
    for k in sorted(u.coeffs, key=lambda i: (u.model.degrees[i], -i)):
        c = u.coeffs[k]
        nm = u.model.names[k]
        if nm == "1":
            term = format_scalar(abs(c))
        elif abs(c) == 1:
            term = nm
        else:
            term = f"{format_scalar(abs(c))}*{nm}"
        parts.append(("- " if c < 0 else "+ ") + term)
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


# -- constructors -----------------------------------------------------------


def _power_name(symbol: str, e: int) -> str:
    return "1" if e == 0 else symbol if e == 1 else f"{symbol}^{e}"


def make_cp(m: int, symbol: str = "y") -> ManifoldModel:
    """H*(CP^m) = Z[y]/(y^(m+1)), deg y = 2."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    products = {(i, j): ({i + j: 1} if i + j <= m else {}) for i in range(m + 1) for j in range(m + 1)}
    model = ManifoldModel(
        [_power_name(symbol, e) for e in range(m + 1)],
        [2 * e for e in range(m + 1)],
        products,
        2 * m,
        validate=False,
        symbol=symbol,
    )
    model.spec = {"kind": "cp", "m": m} if symbol == "y" else {"kind": "cp", "m": m, "symbol": symbol}
    return model


def make_point() -> ManifoldModel:
    return make_cp(0)


def make_even_sphere(k: int) -> ManifoldModel:
    """H*(S^2k) with basis {1, s}, s^2 = 0."""
    if k < 1:
        raise ValueError("k must be positive")
    model = ManifoldModel(["1", "s"], [0, 2 * k], {(1, 1): {}}, 2 * k, validate=False)
    model.spec = {"kind": "even_sphere", "k": k}
    return model


def make_table_ring(spec: Mapping) -> ManifoldModel:
    """Validated ring from the JSON table format.

    ``{"dim": d, "basis": [{"name", "deg"}], "products": [{"i", "j", "terms": [[k, "num/den"]]}]}``
    Basis elements are reordered by degree (stable); ``basis[0]`` must be the unit.
    """
    basis = list(spec["basis"])
    if not basis:
        raise NoUnit("empty basis")
    for b in basis:
        if int(b["deg"]) % 2:
            raise OddDegree(f"basis element {b['name']!r} has odd degree {b['deg']}")
    if int(basis[0]["deg"]) != 0:
        raise NoUnit("basis[0] must be the unit in degree 0")
    order = sorted(range(len(basis)), key=lambda i: (int(basis[i]["deg"]), i))
    new_of = {old: new for new, old in enumerate(order)}
    products: dict[tuple[int, int], dict[int, Fraction]] = {}
    for p in spec.get("products", []):
        i, j = new_of[int(p["i"])], new_of[int(p["j"])]
        terms: dict[int, Fraction] = {}
        for k, c in p.get("terms", []):
            k = new_of[int(k)]
            terms[k] = terms.get(k, Fraction(0)) + to_scalar(c)
        if (i, j) in products and products[(i, j)] != terms:
            raise RingModelError(f"conflicting entries for product ({p['i']},{p['j']})")
        if (j, i) in products and products[(j, i)] != terms:
            raise NonCommutative(f"product ({p['i']},{p['j']}) differs from ({p['j']},{p['i']})")
        products[(i, j)] = terms
    model = ManifoldModel(
        [basis[i]["name"] for i in order],
        [int(basis[i]["deg"]) for i in order],
        products,
        int(spec["dim"]),
    )
    model.spec = {"kind": "table", "dim": int(spec["dim"]), "basis": basis, "products": list(spec.get("products", []))}
    return model


_IDENT = re.compile(r"^[A-Za-z]\w*$")


def _factor_label(factor: ManifoldModel, k: int, pos: int) -> str | None:
    if k == 0:
        return None
    nm = factor.names[k]
    if factor.symbol is not None:
        e = factor.degrees[k] // 2
        return f"x{pos}" if e == 1 else f"x{pos}^{e}"
    return f"{nm}_{pos}" if _IDENT.match(nm) else f"({nm})_{pos}"


def tensor_many(models: Sequence[ManifoldModel]) -> ManifoldModel:
    """Künneth product of several models, basis ordered lexicographically by factor indices."""
    models = tuple(models)
    if not models:
        return make_point()
    multi = list(itertools.product(*(range(m.dim) for m in models)))
    pos_of = {mi: n for n, mi in enumerate(multi)}
    names = []
    for mi in multi:
        labels = [_factor_label(f, k, p + 1) for p, (f, k) in enumerate(zip(models, mi))]
        labels = [s for s in labels if s]
        names.append("*".join(labels) if labels else "1")
    degrees = [sum(f.degrees[k] for f, k in zip(models, mi)) for mi in multi]
    products: dict[tuple[int, int], dict[int, Fraction]] = {}
    for a, ma in enumerate(multi):
        for b, mb in enumerate(multi):
            if b < a:
                continue
            out: dict[int, Fraction] = {}
            per_factor = [f.mul_basis(i, j) for f, i, j in zip(models, ma, mb)]
            if all(per_factor):
                for combo in itertools.product(*per_factor):
                    c = Fraction(1)
                    for _, v in combo:
                        c *= v
                    key = pos_of[tuple(k for k, _ in combo)]
                    out[key] = out.get(key, Fraction(0)) + c
            products[(a, b)] = out
    dim = sum(f.manifold_dim for f in models)
    result = ManifoldModel(names, degrees, products, dim, validate=False)
    result.factors = models
    result.spec = {"kind": "tensor", "factors": [f.spec for f in models]}
    result.multi_index = tuple(multi)
    # the pairing is a tensor product, so duals are tensor products of duals
    factor_duals = [f.dual_basis() for f in models]
    duals = []
    for mi in multi:
        acc = {(): Fraction(1)}
        for dl, k in zip(factor_duals, mi):
            acc = {key + (j,): c * d for key, c in acc.items() for j, d in dl[k].coeffs.items()}
        duals.append(CohClass(result, {pos_of[key]: c for key, c in acc.items()}))
    result._dual = duals
    return result


def tensor(a: ManifoldModel, b: ManifoldModel) -> ManifoldModel:
    return tensor_many([a, b])


def tensor_power(m: ManifoldModel, n: int) -> ManifoldModel:
    return tensor_many([m] * n)


def factor_class(product: ManifoldModel, pos: int, u: CohClass) -> CohClass:
    """Place a class of factor ``pos`` (0-based) into the product, unit elsewhere."""
    out = {}
    for k, c in u.coeffs.items():
        mi = tuple(k if p == pos else 0 for p in range(len(product.factors)))
        out[product.multi_index.index(mi)] = c
    return CohClass(product, out)


def euler_char(m: RingModel) -> int:
    """Sum of all Betti numbers; all degrees are even so this is the Euler number."""
    return m.dim


def dual_basis(m: ManifoldModel) -> list[CohClass]:
    return m.dual_basis()


def tensor_classes(product: ManifoldModel, classes: Sequence[CohClass]) -> CohClass:
    """u_1 x u_2 x ... x u_n in a product built by :func:`tensor_many`."""
    acc = {(): Fraction(1)}
    for u in classes:
        acc = {key + (k,): c * d for key, c in acc.items() for k, d in u.coeffs.items()}
    index = {mi: n for n, mi in enumerate(product.multi_index)}
    return CohClass(product, {index[key]: c for key, c in acc.items()})
