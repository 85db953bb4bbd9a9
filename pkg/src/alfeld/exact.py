"""Exact integers, rationals and dense linear algebra over Q.

Rationals are :class:`fractions.Fraction` values (always reduced, positive
denominator).  Matrices are immutable :class:`RatMatrix` instances; every
elimination routine works on private copies.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import NonSquare, SingularMatrix

Rational = Fraction

__all__ = [
    "Rational",
    "RatMatrix",
    "binomial",
    "factorial",
    "multi_factorial",
    "parse_rational",
    "format_rational",
    "rank_and_nullity",
    "determinant",
    "nullspace",
    "Factorization",
]


@lru_cache(maxsize=None)
def factorial(n: int) -> int:
    return math.factorial(n)


def multi_factorial(alpha: Iterable[int]) -> int:
    """Product of factorials of the entries, i.e. ``alpha!``."""
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


def binomial(n: int, k: int) -> int:
    """C(n, k), with the convention C(n, k) = 0 whenever k < 0, k > n or n < 0."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    return Fraction(text)


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class RatMatrix:
    """Immutable dense rectangular matrix of rationals."""

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for row in data:
            if len(row) != ncols:
                raise ValueError("ragged matrix rows")
        self._rows = data
        self.nrows = len(data)
        self.ncols = ncols

    @classmethod
    def from_sparse(cls, rows: Sequence[dict], ncols: int) -> "RatMatrix":
        dense = []
        for row in rows:
            line = [Fraction(0)] * ncols
            for c, v in row.items():
                line[c] = Fraction(v)
            dense.append(line)
        return cls(dense, ncols)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(([int(i == j) for j in range(n)] for i in range(n)), n)

    @classmethod
    def diagonal(cls, entries: Sequence) -> "RatMatrix":
        n = len(entries)
        return cls(([entries[i] if i == j else 0 for j in range(n)] for i in range(n)), n)

    @property
    def rows(self) -> tuple:
        return self._rows

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def __eq__(self, other):
        return isinstance(other, RatMatrix) and self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        return f"RatMatrix({self.nrows}x{self.ncols})"

    def transpose(self) -> "RatMatrix":
        return RatMatrix(zip(*self._rows), self.nrows) if self.nrows else RatMatrix([], 0)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other._rows)) if other.nrows else [() for _ in range(other.ncols)]
        out = []
        for row in self._rows:
            nz = [(k, a) for k, a in enumerate(row) if a]
            out.append([sum((a * col[k] for k, a in nz), Fraction(0)) for col in cols])
        return RatMatrix(out, other.ncols)

    def apply(self, vector: Sequence) -> list[Fraction]:
        return [sum((a * vector[k] for k, a in enumerate(row) if a), Fraction(0)) for row in self._rows]

    def sparse_rows(self) -> list[dict]:
        return [{c: v for c, v in enumerate(row) if v} for row in self._rows]


def _as_sparse(M) -> tuple[list[dict], int]:
    if isinstance(M, RatMatrix):
        return M.sparse_rows(), M.ncols
    rows, ncols = M
    return rows, ncols


def _integer_row(row: dict) -> dict:
    """Scale a sparse rational row to a primitive integer row (same span)."""
    if not row:
        return {}
    den = 1
    for v in row.values():
        v = Fraction(v)
        den = den * v.denominator // math.gcd(den, v.denominator)
    out = {c: int(Fraction(v) * den) for c, v in row.items() if v}
    g = 0
    for v in out.values():
        g = math.gcd(g, v)
    if g > 1:
        out = {c: v // g for c, v in out.items()}
    return out


def _echelon(rows: Iterable[dict]) -> dict[int, dict]:
    """Fraction-free incremental row echelon form.

    Each incoming integer row is reduced against the stored pivot rows by
    cross-multiplication (``p*row - a*pivot``) and made primitive again, which
    keeps entry growth in check.  Returns ``{leading column: row}``.
    """
    pivots: dict[int, dict] = {}
    for raw in rows:
        row = _integer_row(raw)
        while row:
            lead = min(row)
            piv = pivots.get(lead)
            if piv is None:
                pivots[lead] = row
                break
            a = row[lead]
            p = piv[lead]
            g = math.gcd(a, p)
            fa, fp = a // g, p // g
            new = {c: fp * v for c, v in row.items()}
            for c, v in piv.items():
                w = new.get(c, 0) - fa * v
                if w:
                    new[c] = w
                else:
                    new.pop(c, None)
            g = 0
            for v in new.values():
                g = math.gcd(g, v)
                if g == 1:
                    break
            if g > 1:
                new = {c: v // g for c, v in new.items()}
            row = new
    return pivots


def rank_and_nullity(M) -> tuple[int, int]:
    """Exact rank over Q and nullity ``cols - rank``.

    ``M`` is a :class:`RatMatrix` or a pair ``(sparse_rows, ncols)`` where each
    sparse row maps column index to a rational.
    """
    rows, ncols = _as_sparse(M)
    rank = len(_echelon(rows))
    return rank, ncols - rank


def nullspace(M) -> list[list[Fraction]]:
    """Basis of the right nullspace, one vector per free column."""
    rows, ncols = _as_sparse(M)
    pivots = _echelon(rows)
    free = [c for c in range(ncols) if c not in pivots]
    order = sorted(pivots, reverse=True)
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for lead in order:
            row = pivots[lead]
            s = sum((v * x[c] for c, v in row.items() if c != lead), Fraction(0))
            x[lead] = -s / row[lead]
        basis.append(x)
    return basis


def determinant(M: RatMatrix) -> Fraction:
    """Exact determinant by Bareiss fraction-free elimination."""
    if M.nrows != M.ncols:
        raise NonSquare(f"{M.nrows}x{M.ncols} matrix has no determinant")
    n = M.nrows
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    a = []
    for row in M.rows:
        den = 1
        for v in row:
            den = den * v.denominator // math.gcd(den, v.denominator)
        scale /= den
        a.append([int(v * den) for v in row])
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (akk * rowi[j] - aik * rowk[j]) // prev
            rowi[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1] * scale


class Factorization:
    """PLU-style factorization of a square nonsingular rational matrix.

    Built once, then reused for any number of right-hand sides.
    """

    def __init__(self, M: RatMatrix):
        if M.nrows != M.ncols:
            raise NonSquare(f"{M.nrows}x{M.ncols}")
        n = M.nrows
        a = [list(row) for row in M.rows]
        perm = list(range(n))
        for k in range(n):
            p = next((i for i in range(k, n) if a[i][k] != 0), None)
            if p is None:
                raise SingularMatrix(f"no pivot in column {k}")
            if p != k:
                a[k], a[p] = a[p], a[k]
                perm[k], perm[p] = perm[p], perm[k]
            inv = 1 / a[k][k]
            rowk = a[k]
            nzk = [j for j in range(k + 1, n) if rowk[j]]
            for i in range(k + 1, n):
                rowi = a[i]
                if rowi[k]:
                    f = rowi[k] * inv
                    rowi[k] = f
                    for j in nzk:
                        rowi[j] -= f * rowk[j]
        self.n = n
        self._lu = a
        self._perm = perm

    def solve(self, b: Sequence) -> list[Fraction]:
        n, a = self.n, self._lu
        y = [Fraction(b[p]) for p in self._perm]
        for i in range(n):
            row = a[i]
            s = y[i]
            for j in range(i):
                if row[j]:
                    s -= row[j] * y[j]
            y[i] = s
        for i in range(n - 1, -1, -1):
            row = a[i]
            s = y[i]
            for j in range(i + 1, n):
                if row[j]:
                    s -= row[j] * y[j]
            y[i] = s / row[i]
        return y

    def inverse(self) -> RatMatrix:
        cols = [self.solve([int(i == j) for i in range(self.n)]) for j in range(self.n)]
        return RatMatrix(zip(*cols), self.n)
