"""Homogeneous polynomials in normalized barycentric monomials.

A :class:`BaryPoly` of degree ``k`` over a frame with vertices ``V_0..V_t``
stands for ``sum_alpha c_alpha * prod_i lambda_i**alpha_i / alpha_i!`` where
the lambdas are the barycentric coordinates of the frame.  Coefficients are
kept sparse (zero entries are dropped).

Identities used throughout:

* ``d/dlambda_i`` lowers ``alpha_i`` by one and keeps the coefficient;
* ``lambda_i * [[lambda]]^beta = (beta_i + 1) [[lambda]]^(beta + e_i)``;
* ``[[lambda]]^a * [[lambda]]^b = (a+b)!/(a! b!) [[lambda]]^(a+b)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Mapping, Sequence

from .errors import DegreeMismatch, FrameMismatch, NotASubsimplex, TargetTooLow
from .exact import factorial, multi_factorial
from .geometry import BarycentricMap, SplitSimplex, change_matrix
from .multiindex import enumerate_sigma


@dataclass(frozen=True)
class Frame:
    """Ordered vertex list of a simplex; ``name`` is a readable tag only."""

    points: tuple
    name: str = ""

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return len(self.points) - 1

    @cached_property
    def bary(self) -> BarycentricMap:
        return _bary(self.points)

    def sub(self, positions: Sequence[int], name: str = "") -> "Frame":
        return Frame(tuple(self.points[p] for p in positions), name)

    def __eq__(self, other):
        return isinstance(other, Frame) and self.points == other.points

    def __hash__(self):
        return hash(self.points)


@lru_cache(maxsize=None)
def _bary(points: tuple) -> BarycentricMap:
    return BarycentricMap.of(points)


def _clean(coeffs: Mapping) -> dict:
    return {a: Fraction(c) for a, c in coeffs.items() if c}


class BaryPoly:
    __slots__ = ("frame", "degree", "coeffs")

    def __init__(self, frame: Frame, degree: int, coeffs: Mapping | None = None):
        self.frame = frame
        self.degree = degree
        self.coeffs = _clean(coeffs or {})
        for a in self.coeffs:
            if len(a) != frame.size or sum(a) != degree or min(a) < 0:
                raise ValueError(f"index {a} does not fit degree {degree} over {frame.size} vertices")

    # construction ----------------------------------------------------------
    @classmethod
    def monomial(cls, frame: Frame, alpha: Sequence[int], coeff=1) -> "BaryPoly":
        alpha = tuple(alpha)
        return cls(frame, sum(alpha), {alpha: coeff})

    @classmethod
    def zero(cls, frame: Frame, degree: int) -> "BaryPoly":
        return cls(frame, degree)

    @classmethod
    def constant(cls, frame: Frame, value=1, degree: int = 0) -> "BaryPoly":
        p = cls(frame, 0, {(0,) * frame.size: value})
        return degree_raise(p, degree)

    # algebra ----------------------------------------------------------------
    def _check(self, other: "BaryPoly") -> None:
        if self.frame != other.frame:
            raise FrameMismatch("polynomials live in different frames")
        if self.degree != other.degree:
            raise DegreeMismatch(f"degrees {self.degree} and {other.degree} differ")

    def __add__(self, other: "BaryPoly") -> "BaryPoly":
        self._check(other)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, 0) + c
        return BaryPoly(self.frame, self.degree, out)

    def __neg__(self) -> "BaryPoly":
        return BaryPoly(self.frame, self.degree, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other: "BaryPoly") -> "BaryPoly":
        return self + (-other)

    def scale(self, s) -> "BaryPoly":
        s = Fraction(s)
        return BaryPoly(self.frame, self.degree, {a: s * c for a, c in self.coeffs.items()})

    def __rmul__(self, s) -> "BaryPoly":
        return self.scale(s)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BaryPoly)
            and self.frame == other.frame
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.frame, self.degree, tuple(sorted(self.coeffs.items()))))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        return f"BaryPoly(deg={self.degree}, terms={len(self.coeffs)}, frame={self.frame.name or self.frame.size})"

    # evaluation -------------------------------------------------------------
    def evaluate_bary(self, lam: Sequence) -> Fraction:
        total = Fraction(0)
        for a, c in self.coeffs.items():
            term = c
            for x, e in zip(lam, a):
                if e:
                    term *= Fraction(x) ** e / factorial(e)
            total += term
        return total

    def __call__(self, x: Sequence) -> Fraction:
        return self.evaluate_bary(self.frame.bary(x))

    def at_vertex(self, position: int) -> Fraction:
        alpha = tuple(self.degree if i == position else 0 for i in range(self.frame.size))
        return self.coeffs.get(alpha, Fraction(0)) / factorial(self.degree)

    def float_eval(self, x: Sequence[float]) -> float:
        grad, off = self.frame.bary.grad, self.frame.bary.offset
        lam = [sum(float(g) * xi for g, xi in zip(gr, x)) + float(o) for gr, o in zip(grad, off)]
        total = 0.0
        for a, c in self.coeffs.items():
            term = float(c)
            for v, e in zip(lam, a):
                if e:
                    term *= v**e / factorial(e)
            total += term
        return total


def to_bernstein(p: BaryPoly) -> dict:
    """Coefficients in the classical Bernstein basis ``|alpha|! [[lambda]]^alpha``."""
    f = factorial(p.degree)
    return {a: c / f for a, c in p.coeffs.items()}


def from_bernstein(frame: Frame, degree: int, coeffs: Mapping) -> BaryPoly:
    f = factorial(degree)
    return BaryPoly(frame, degree, {a: Fraction(c) * f for a, c in coeffs.items()})


def degree_raise(p: BaryPoly, target: int) -> BaryPoly:
    """Re-express ``p`` at degree ``target`` by multiplying with ``(sum lambda)^m = 1``."""
    if target < p.degree:
        raise TargetTooLow(f"cannot lower degree {p.degree} to {target}")
    coeffs = p.coeffs
    n = p.frame.size
    for _ in range(target - p.degree):
        out: dict = {}
        for a, c in coeffs.items():
            for i in range(n):
                b = a[:i] + (a[i] + 1,) + a[i + 1 :]
                out[b] = out.get(b, 0) + (a[i] + 1) * c
        coeffs = out
    return BaryPoly(p.frame, target, coeffs)


def partial_lambda(p: BaryPoly, i: int) -> BaryPoly:
    """Formal derivative with respect to ``lambda_i``."""
    out = {}
    for a, c in p.coeffs.items():
        if a[i]:
            out[a[:i] + (a[i] - 1,) + a[i + 1 :]] = c
    return BaryPoly(p.frame, max(p.degree - 1, 0), out)


def directional_from_weights(p: BaryPoly, weights: Sequence) -> BaryPoly:
    """``sum_i weights[i] * d p / d lambda_i``, weights being ``D_v lambda_i``."""
    if p.degree == 0:
        return BaryPoly(p.frame, 0)
    out: dict = {}
    for a, c in p.coeffs.items():
        for i, w in enumerate(weights):
            if w and a[i]:
                b = a[:i] + (a[i] - 1,) + a[i + 1 :]
                out[b] = out.get(b, 0) + w * c
    return BaryPoly(p.frame, p.degree - 1, out)


def directional_derivative(p: BaryPoly, v: Sequence) -> BaryPoly:
    """Derivative along the ambient vector ``v`` (chain rule through the frame)."""
    return directional_from_weights(p, p.frame.bary.directional(v))


def mixed_derivative(p: BaryPoly, directions: Sequence, theta: Sequence[int]) -> BaryPoly:
    """Apply ``D_{directions[i]}`` exactly ``theta[i]`` times, in slot order."""
    for v, times in zip(directions, theta):
        w = p.frame.bary.directional(v)
        for _ in range(times):
            p = directional_from_weights(p, w)
    return p


def restrict(p: BaryPoly, positions: Sequence[int], target: Frame | None = None) -> BaryPoly:
    """Restriction to the face spanned by the frame vertices at ``positions``."""
    positions = tuple(positions)
    n = p.frame.size
    if len(set(positions)) != len(positions) or any(q < 0 or q >= n for q in positions):
        raise NotASubsimplex(f"positions {positions} do not name a face of the frame")
    if list(positions) != sorted(positions):
        raise NotASubsimplex("face positions must be increasing")
    if target is None:
        target = p.frame.sub(positions)
    elif target.size != len(positions):
        raise NotASubsimplex("target frame size does not match the face")
    off = [q for q in range(n) if q not in positions]
    out = {}
    for a, c in p.coeffs.items():
        if all(a[q] == 0 for q in off):
            out[tuple(a[q] for q in positions)] = c
    return BaryPoly(target, p.degree, out)


@lru_cache(maxsize=256)
def _frame_change_images(source: tuple, target: tuple, degree: int) -> dict:
    """Images of every degree-``degree`` source monomial in the target frame."""
    M = change_matrix(source, target)
    n = len(source)
    images = {(0,) * n: {(0,) * n: Fraction(1)}}
    for deg in range(1, degree + 1):
        for alpha in enumerate_sigma(n, deg):
            i = next(q for q in range(n) if alpha[q])
            prev = images[alpha[:i] + (alpha[i] - 1,) + alpha[i + 1 :]]
            out: dict = {}
            inv = Fraction(1, alpha[i])
            for g, c in prev.items():
                for m, w in enumerate(M.rows[i]):
                    if w:
                        h = g[:m] + (g[m] + 1,) + g[m + 1 :]
                        out[h] = out.get(h, 0) + inv * w * (g[m] + 1) * c
            images[alpha] = {h: c for h, c in out.items() if c}
    return {a: images[a] for a in enumerate_sigma(n, degree)}


def change_frame(p: BaryPoly, target: Frame) -> BaryPoly:
    """Exact re-expansion of ``p`` in the barycentric coordinates of ``target``."""
    if target.size != p.frame.size:
        raise FrameMismatch("frames of different dimension")
    if target == p.frame:
        return p
    images = _frame_change_images(p.frame.points, target.points, p.degree)
    out: dict = {}
    for a, c in p.coeffs.items():
        for g, w in images[a].items():
            out[g] = out.get(g, 0) + c * w
    return BaryPoly(target, p.degree, out)


def product(p: BaryPoly, q: BaryPoly) -> BaryPoly:
    if p.frame != q.frame:
        raise FrameMismatch("product needs a common frame")
    out: dict = {}
    for a, c in p.coeffs.items():
        fa = multi_factorial(a)
        for b, e in q.coeffs.items():
            g = tuple(x + y for x, y in zip(a, b))
            w = Fraction(multi_factorial(g), fa * multi_factorial(b))
            out[g] = out.get(g, 0) + w * c * e
    return BaryPoly(p.frame, p.degree + q.degree, out)


def integrate_monomial(t: int, sigma: Sequence[int]) -> Fraction:
    """Mean over a t-simplex of ``[[lambda]]^sigma``: ``t! / (|sigma| + t)!``."""
    return Fraction(factorial(t), factorial(sum(sigma) + t))


def mean_value(p: BaryPoly) -> Fraction:
    """``(1/|F|) int_F p`` over the frame simplex."""
    return sum(p.coeffs.values(), Fraction(0)) * integrate_monomial(p.frame.dim, (p.degree,))


# ---------------------------------------------------------------------------
# piecewise polynomials on an Alfeld split


def cell_frame(split: SplitSimplex) -> Frame:
    return Frame(split.vertices, f"K{split.cell}")


def piece_frame(split: SplitSimplex, j: int) -> Frame:
    return Frame(split.pieces[j], f"K{split.cell}.{j}")


@dataclass(frozen=True)
class PiecewisePoly:
    """One degree-k polynomial per piece ``K_j``, each in the frame of ``K_j``."""

    split: SplitSimplex
    pieces: tuple

    def __post_init__(self):
        if len(self.pieces) != self.split.d + 1:
            raise ValueError("one polynomial per piece is required")
        degs = {p.degree for p in self.pieces}
        if len(degs) != 1:
            raise DegreeMismatch(f"pieces have degrees {sorted(degs)}")
        for j, p in enumerate(self.pieces):
            if p.frame != piece_frame(self.split, j):
                raise FrameMismatch(f"piece {j} is not expressed in the frame of K_{j}")

    @property
    def degree(self) -> int:
        return self.pieces[0].degree

    @classmethod
    def from_global(cls, split: SplitSimplex, p: BaryPoly) -> "PiecewisePoly":
        """The restriction of a single polynomial on K to every piece."""
        return cls(split, tuple(change_frame(p, piece_frame(split, j)) for j in range(split.d + 1)))

    @classmethod
    def zero(cls, split: SplitSimplex, degree: int) -> "PiecewisePoly":
        return cls(split, tuple(BaryPoly(piece_frame(split, j), degree) for j in range(split.d + 1)))

    def __add__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        return PiecewisePoly(self.split, tuple(a + b for a, b in zip(self.pieces, other.pieces)))

    def __sub__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        return PiecewisePoly(self.split, tuple(a - b for a, b in zip(self.pieces, other.pieces)))

    def scale(self, s) -> "PiecewisePoly":
        return PiecewisePoly(self.split, tuple(p.scale(s) for p in self.pieces))

    def __eq__(self, other) -> bool:
        return isinstance(other, PiecewisePoly) and self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def coefficient_vector(self) -> list[Fraction]:
        """Concatenated piece coefficients in lexicographic index order."""
        out = []
        n = self.split.d + 1
        for p in self.pieces:
            out.extend(p.coeffs.get(a, Fraction(0)) for a in enumerate_sigma(n, p.degree))
        return out

    @classmethod
    def from_vector(cls, split: SplitSimplex, degree: int, vec: Sequence) -> "PiecewisePoly":
        n = split.d + 1
        basis = enumerate_sigma(n, degree)
        m = len(basis)
        pieces = []
        for j in range(n):
            chunk = vec[j * m : (j + 1) * m]
            pieces.append(BaryPoly(piece_frame(split, j), degree, dict(zip(basis, chunk))))
        return cls(split, tuple(pieces))


def mean_product_over_cell(u: PiecewisePoly, w: PiecewisePoly) -> Fraction:
    """``(1/|K|) int_K u w`` computed piece by piece with weights ``|K_j|/|K| = mu_j``."""
    total = Fraction(0)
    for j, (a, b) in enumerate(zip(u.pieces, w.pieces)):
        total += u.split.mu[j] * mean_value(product(a, b))
    return total
