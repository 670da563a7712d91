"""Exact rational linear algebra.

Scalars are :class:`fractions.Fraction`.  Matrices are small and dense, so a
:class:`QMatrix` is just an immutable tuple of rows.  Pivoting is always the
first nonzero entry scanning columns left to right, which keeps every echelon
basis reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


class DimensionMismatch(ValueError):
    pass


def to_scalar(x) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def format_scalar(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class QMatrix:
    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        rows = tuple(tuple(to_scalar(v) for v in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for an empty matrix")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch(f"row of length {len(r)} in a matrix with {ncols} columns")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "QMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self):
        return hash((self.ncols, self.rows))

    def __repr__(self):
        body = ", ".join("[" + ", ".join(format_scalar(v) for v in r) + "]" for r in self.rows)
        return f"QMatrix([{body}], ncols={self.ncols})"

    def transpose(self) -> "QMatrix":
        return QMatrix([[r[j] for r in self.rows] for j in range(self.ncols)], self.nrows)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        cols = other.transpose().rows
        return QMatrix(
            [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self.rows],
            other.ncols,
        )

    def apply_row(self, v: Sequence[Fraction]) -> list[Fraction]:
        """Row vector times matrix."""
        if len(v) != self.nrows:
            raise DimensionMismatch(f"vector of length {len(v)} against {self.nrows} rows")
        out = [Fraction(0)] * self.ncols
        for c, row in zip(v, self.rows):
            if c:
                for j, a in enumerate(row):
                    if a:
                        out[j] += c * a
        return out

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)


def _rref_rows(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                break
        else:
            continue
        rows[r], rows[i] = rows[i], rows[r]
        p = rows[r][c]
        if p != 1:
            rows[r] = [v / p for v in rows[r]]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: QMatrix) -> tuple[QMatrix, list[int], int]:
    """Reduced row echelon form, pivot columns and rank.

    The returned echelon matrix keeps the zero rows so its shape matches ``m``.
    """
    rows, pivots = _rref_rows([list(r) for r in m.rows], m.ncols)
    return QMatrix(rows, m.ncols), pivots, len(pivots)


def echelon_basis(m: QMatrix) -> QMatrix:
    """Nonzero rows of the reduced echelon form."""
    ech, _, rank = rref(m)
    return QMatrix(ech.rows[:rank], m.ncols)


def rank(m: QMatrix) -> int:
    return rref(m)[2]


def pivot_columns(basis_rows: QMatrix) -> list[int]:
    out = []
    for r in basis_rows.rows:
        for j, v in enumerate(r):
            if v != 0:
                out.append(j)
                break
    return out


def coords_in_span(basis_rows: QMatrix, v: Sequence) -> list[Fraction] | None:
    """Coordinates ``c`` with ``c @ basis_rows == v``, or ``None`` if ``v`` is outside the span.

    ``basis_rows`` must already be in reduced echelon form (zero rows allowed).
    """
    v = [to_scalar(a) for a in v]
    if len(v) != basis_rows.ncols:
        raise DimensionMismatch(f"vector of length {len(v)} against {basis_rows.ncols} columns")
    piv = pivot_columns(basis_rows)
    nonzero = [r for r in basis_rows.rows if any(r)]
    c = [v[p] for p in piv]
    recon = QMatrix(nonzero, basis_rows.ncols).apply_row(c) if nonzero else [Fraction(0)] * len(v)
    if recon != v:
        return None
    if len(nonzero) == basis_rows.nrows:
        return c
    # re-expand over all rows; zero rows get coefficient 0
    it = iter(c)
    return [next(it) if any(r) else Fraction(0) for r in basis_rows.rows]


def subspace_sum(a: QMatrix, b: QMatrix) -> QMatrix:
    """Echelon basis of rowspan(a) + rowspan(b)."""
    if a.ncols != b.ncols:
        raise DimensionMismatch(f"{a.ncols} vs {b.ncols} columns")
    return echelon_basis(QMatrix(a.rows + b.rows, a.ncols))


def inverse(m: QMatrix) -> QMatrix:
    if m.nrows != m.ncols:
        raise DimensionMismatch("inverse of a non-square matrix")
    n = m.nrows
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m.rows)]
    rows, pivots = _rref_rows(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return QMatrix([r[n:] for r in rows], n)


def solve_left(a: QMatrix, v: Sequence) -> list[Fraction] | None:
    """Some ``c`` with ``c @ a == v`` for arbitrary (not necessarily echelon) ``a``."""
    v = [to_scalar(x) for x in v]
    if len(v) != a.ncols:
        raise DimensionMismatch(f"vector of length {len(v)} against {a.ncols} columns")
    # c @ a = v  <=>  a^T c^T = v^T
    aug = [[a.rows[i][j] for i in range(a.nrows)] + [v[j]] for j in range(a.ncols)]
    rows, pivots = _rref_rows(aug, a.nrows + 1)
    if a.nrows in pivots:
        return None
    c = [Fraction(0)] * a.nrows
    for r, p in zip(rows, pivots):
        c[p] = r[a.nrows]
    return c
