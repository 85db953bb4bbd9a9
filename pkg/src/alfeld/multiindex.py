"""Multi-index families, element parameters and the intrinsic decompositions.

A multi-index is a plain tuple of non-negative integers aligned with a sorted
index set: ``alpha[p]`` is the exponent of vertex ``index_set[p]``.  Over the
reference simplex the index set is ``(0, 1, ..., d)`` so positions and vertex
indices coincide.

All enumerations are lexicographic in the tuple order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .errors import (
    AssumptionViolation,
    CellMismatch,
    LengthMismatch,
    UnsupportedDimension,
)

MultiIndex = tuple


@lru_cache(maxsize=None)
def _compositions(parts: int, total: int) -> tuple:
    if parts == 0:
        return ((),) if total == 0 else ()
    if parts == 1:
        return ((total,),)
    out = []
    for first in range(total + 1):
        for rest in _compositions(parts - 1, total - first):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_sigma(index_set: Sequence[int] | int, total: int) -> list[MultiIndex]:
    """All multi-indices over ``index_set`` with entry sum ``total``.

    ``index_set`` may be an integer, meaning ``range(index_set)`` slots.
    """
    parts = index_set if isinstance(index_set, int) else len(index_set)
    if total < 0:
        return []
    return list(_compositions(parts, total))


def subsets_of_dim(index_set: Sequence[int], dim: int) -> list[tuple]:
    """Sorted ``(dim+1)``-element subsets; these label the ``dim``-faces."""
    return list(combinations(sorted(index_set), dim + 1))


def proper_faces(index_set: Sequence[int]) -> list[tuple]:
    """Every proper face of the simplex on ``index_set``, by dimension then lexicographically."""
    t = len(index_set) - 1
    out = []
    for dim in range(t):
        out.extend(subsets_of_dim(index_set, dim))
    return out


def partial_sum(alpha: MultiIndex, index_set: Sequence[int], subset: Iterable[int]) -> int:
    pos = {v: p for p, v in enumerate(index_set)}
    return sum(alpha[pos[v]] for v in subset)


def complement_sum(alpha: MultiIndex, index_set: Sequence[int], subset: Iterable[int]) -> int:
    """``|alpha|_{\\E}``: the sum over the index set minus the entries on ``subset``."""
    return sum(alpha) - partial_sum(alpha, index_set, subset)


def _face_bounds(index_set: Sequence[int], q: Sequence[int], faces_of: Sequence[int]):
    """Pairs (positions of E, max allowed |alpha|_E) for the constraint family.

    ``faces_of`` is the vertex set whose proper faces E are constrained; the
    bound is ``|alpha|_{\\E} >= q[t - t' - 1] + 1`` where ``t = len(faces_of)-1``.
    """
    pos = {v: p for p, v in enumerate(index_set)}
    t = len(faces_of) - 1
    out = []
    for E in proper_faces(faces_of):
        tp = len(E) - 1
        out.append((tuple(pos[v] for v in E), q[t - tp - 1] + 1))
    return out


def enumerate_sigma0(index_set: Sequence[int], q: Sequence[int], total: int) -> list[MultiIndex]:
    """Multi-indices sigma over the t-simplex ``index_set`` with ``|sigma| = total``
    and ``|sigma|_{\\E} >= q[t-t'] + 1`` for every proper t'-face E (1-based q)."""
    t = len(index_set) - 1
    if len(q) != t:
        raise LengthMismatch(f"continuity vector has length {len(q)}, expected {t}")
    bounds = _face_bounds(index_set, q, index_set)
    out = []
    for sigma in enumerate_sigma(len(index_set), total):
        if all(total - sum(sigma[p] for p in E) >= lo for E, lo in bounds):
            out.append(sigma)
    return out


def in_sigma0(sigma: MultiIndex, index_set: Sequence[int], q: Sequence[int]) -> bool:
    total = sum(sigma)
    return all(total - sum(sigma[p] for p in E) >= lo for E, lo in _face_bounds(index_set, q, index_set))


def in_sigma_fn(alpha: MultiIndex, d: int, F: Sequence[int], n: int, rbar: Sequence[int]) -> bool:
    """Membership in the layer set of face ``F`` at order ``n`` for continuity ``rbar``.

    The side conditions range over every face E of the whole simplex with
    ``dim E < dim F``, not only the faces of F.
    """
    full = tuple(range(d + 1))
    total = sum(alpha)
    if total - sum(alpha[v] for v in F) != n:
        return False
    t = len(F) - 1
    for tp in range(t):
        lo = rbar[d - tp - 1] + 1
        for E in combinations(full, tp + 1):
            if total - sum(alpha[v] for v in E) < lo:
                return False
    return True


def enumerate_sigma_fn(d: int, F: Sequence[int], n: int, rbar: Sequence[int], total: int) -> list[MultiIndex]:
    F = tuple(sorted(F))
    rest = tuple(v for v in range(d + 1) if v not in F)
    out = []
    # |alpha|_{\F} = n exactly, so split the mass between F and its complement.
    for outer in enumerate_sigma(len(rest), n):
        for inner in enumerate_sigma(len(F), total - n):
            alpha = [0] * (d + 1)
            for v, a in zip(rest, outer):
                alpha[v] = a
            for v, a in zip(F, inner):
                alpha[v] = a
            alpha = tuple(alpha)
            if in_sigma_fn(alpha, d, F, n, rbar):
                out.append(alpha)
    out.sort()
    return out


# ---------------------------------------------------------------------------
# element parameters


@dataclass(frozen=True)
class Verdict:
    valid: bool
    violated: str | None = None
    detail: str = ""

    def raise_if_invalid(self) -> None:
        if not self.valid:
            raise AssumptionViolation(self.violated, self.detail or None)


def _ceil_half(x: int) -> int:
    return -((-x) // 2)


def check_assumption(d: int, r: Sequence[int], k: int, b: int) -> Verdict:
    """Admissibility of ``(r, k, b)``; reports the first failing inequality.

    Checked in this order:
    ``1 <= ceil((3r1-1)/2)``, ``ceil((3r1-1)/2) <= r2``, ``r2 <= 2r1-1``,
    ``2 r_s <= r_{s+1}`` for s = 2..d-1, ``2 r_d + 1 <= k``,
    ``2r1 - r2 <= b``, ``b <= r2 - r1 + 1``.
    """
    r = tuple(int(x) for x in r)
    if len(r) != d:
        raise LengthMismatch(f"r has {len(r)} entries but d = {d}")
    if d < 2:
        raise UnsupportedDimension("the element is defined for d >= 2 only")
    if any(x < 0 for x in r) or k < 0 or b < 0:
        raise ValueError("parameters must be non-negative")
    r1, r2 = r[0], r[1]
    c = _ceil_half(3 * r1 - 1)
    checks = [
        ("1 <= ceil((3*r1-1)/2)", 1 <= c, f"ceil((3*{r1}-1)/2) = {c}"),
        ("ceil((3*r1-1)/2) <= r2", c <= r2, f"{c} > r2 = {r2}"),
        ("r2 <= 2*r1-1", r2 <= 2 * r1 - 1, f"r2 = {r2} > {2 * r1 - 1}"),
    ]
    for s in range(2, d):
        rs, rn = r[s - 1], r[s]
        checks.append((f"2*r{s} <= r{s + 1}", 2 * rs <= rn, f"2*{rs} > {rn}"))
    checks += [
        ("2*r_d+1 <= k", 2 * r[-1] + 1 <= k, f"2*{r[-1]}+1 > k = {k}"),
        ("2*r1-r2 <= b", 2 * r1 - r2 <= b, f"{2 * r1 - r2} > b = {b}"),
        ("b <= r2-r1+1", b <= r2 - r1 + 1, f"b = {b} > {r2 - r1 + 1}"),
    ]
    for name, ok, detail in checks:
        if not ok:
            return Verdict(False, name, f"assumption violated: {name} ({detail})")
    return Verdict(True)


def check_refined_assumption(rbar: Sequence[int], kbar: int) -> Verdict:
    """``2 rbar_s <= rbar_{s+1}`` for s = 1..d-1 and ``2 rbar_d + 1 <= kbar``."""
    rbar = tuple(rbar)
    for s in range(1, len(rbar)):
        if not 2 * rbar[s - 1] <= rbar[s]:
            name = f"2*rbar{s} <= rbar{s + 1}"
            return Verdict(False, name, f"assumption violated: {name}")
    if not 2 * rbar[-1] + 1 <= kbar:
        return Verdict(False, "2*rbar_d+1 <= kbar", "assumption violated: 2*rbar_d+1 <= kbar")
    return Verdict(True)


@dataclass(frozen=True)
class ElementConfig:
    """Element parameters ``(d, r, k, b)`` with ``rho = k - b``."""

    d: int
    r: tuple
    k: int
    b: int
    verdict: Verdict = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(int(x) for x in self.r))
        if self.d < 2:
            raise UnsupportedDimension("the element is defined for d >= 2 only")
        if len(self.r) != self.d:
            raise LengthMismatch(f"r has {len(self.r)} entries but d = {self.d}")
        object.__setattr__(self, "verdict", check_assumption(self.d, self.r, self.k, self.b))

    @classmethod
    def create(cls, d: int, r: Sequence[int], k: int, b: int | None = None, rho: int | None = None) -> "ElementConfig":
        if (b is None) == (rho is None):
            raise ValueError("give exactly one of b and rho")
        if b is None:
            b = k - rho
        return cls(d, tuple(r), k, b)

    @property
    def valid(self) -> bool:
        return self.verdict.valid

    def require_valid(self) -> "ElementConfig":
        self.verdict.raise_if_invalid()
        return self

    @property
    def rho(self) -> int:
        return self.k - self.b

    @property
    def r_boundary(self) -> tuple:
        return (self.b - 1,) + self.r[1:]

    @property
    def r_interior(self) -> tuple:
        return tuple(x - self.b for x in self.r)

    def r_of(self, s: int) -> int:
        """``r_s`` with 1-based index."""
        return self.r[s - 1]

    def q(self, t: int, n: int) -> tuple:
        """``q_{t,n} = (r_{d-t+1} - n, ..., r_d - n)``."""
        return tuple(self.r[s - 1] - n for s in range(self.d - t + 1, self.d + 1))

    def face_order(self, t: int) -> int:
        """Derivative order carried by a t-face: ``r_{d-t}``."""
        return self.r[self.d - t - 1]

    def as_dict(self) -> dict:
        return {"d": self.d, "r": list(self.r), "k": self.k, "b": self.b, "rho": self.rho}


# ---------------------------------------------------------------------------
# decompositions


@dataclass(frozen=True, order=True)
class DecompositionLabel:
    """Cell tag: ``Sigma0`` (interior) or ``SigmaFn`` for face ``F`` at layer ``n``.

    For the interior decomposition the facet cells carry the layer ``n - b`` of
    the degree-rho index set; the derivative order of the matching functional
    is ``n = layer + b``.
    """

    kind: str
    F: tuple | None = None
    n: int | None = None

    def as_dict(self) -> dict:
        return {"kind": self.kind, "F": list(self.F) if self.F is not None else None, "n": self.n}


@dataclass(frozen=True)
class Cell:
    label: DecompositionLabel
    indices: tuple

    def __len__(self):
        return len(self.indices)


def _fn_cells(d: int, rbar: Sequence[int], total: int, faces, orders) -> list[Cell]:
    cells = []
    for F in faces:
        t = len(F) - 1
        for n in orders(t):
            idx = enumerate_sigma_fn(d, F, n, rbar, total)
            cells.append(Cell(DecompositionLabel("SigmaFn", F, n), tuple(idx)))
    return cells


def refined_decomposition(d: int, rbar: Sequence[int], kbar: int) -> list[Cell]:
    """Partition of all degree-``kbar`` indices into face layers plus the interior cell."""
    rbar = tuple(rbar)
    if len(rbar) != d:
        raise LengthMismatch(f"rbar has {len(rbar)} entries but d = {d}")
    if d < 2:
        raise UnsupportedDimension("decompositions need d >= 2")
    check_refined_assumption(rbar, kbar).raise_if_invalid()
    full = tuple(range(d + 1))
    cells = _fn_cells(d, rbar, kbar, proper_faces(full), lambda t: range(rbar[d - t - 1] + 1))
    cells.append(Cell(DecompositionLabel("Sigma0"), tuple(enumerate_sigma0(full, rbar, kbar))))
    return cells


def interior_facet_cells(config: ElementConfig) -> list[Cell]:
    d, b = config.d, config.b
    full = tuple(range(d + 1))
    out = []
    for F in subsets_of_dim(full, d - 1):
        for n in range(b, config.r[0] + 1):
            idx = enumerate_sigma_fn(d, F, n - b, config.r_interior, config.rho)
            out.append(Cell(DecompositionLabel("SigmaFn", F, n - b), tuple(idx)))
    return out


def decomposition_pair(config: ElementConfig) -> tuple[list[Cell], list[Cell]]:
    """Boundary index cells (degree k) and interior index cells (degree rho)."""
    config.require_valid()
    d = config.d
    full = tuple(range(d + 1))
    rb = config.r_boundary
    boundary = _fn_cells(d, rb, config.k, proper_faces(full), lambda t: range(rb[d - t - 1] + 1))
    interior = [Cell(DecompositionLabel("Sigma0"), tuple(enumerate_sigma0(full, config.r_interior, config.rho)))]
    interior += interior_facet_cells(config)
    return boundary, interior


def check_partition(cells: Sequence[Cell], d: int, total: int) -> tuple[bool, bool]:
    """(disjoint, exhaustive) for cells against ``Sigma(I_d, total)``."""
    seen: set = set()
    disjoint = True
    for cell in cells:
        for a in cell.indices:
            if a in seen:
                disjoint = False
            seen.add(a)
    return disjoint, seen == set(enumerate_sigma(d + 1, total))


def bijection_boundary(alpha: MultiIndex, label: DecompositionLabel, rbar: Sequence[int]):
    """``alpha -> (theta, sigma)``: theta is alpha on the complement of F, sigma alpha on F.

    ``sigma`` is ``None`` for vertex cells.
    """
    d = len(alpha) - 1
    if label.kind != "SigmaFn" or not in_sigma_fn(alpha, d, label.F, label.n, rbar):
        raise CellMismatch(f"{alpha} is not in cell {label}")
    F = label.F
    theta = tuple(alpha[v] for v in range(d + 1) if v not in F)
    sigma = None if len(F) == 1 else tuple(alpha[v] for v in F)
    return theta, sigma


def boundary_preimage(theta: MultiIndex, sigma: MultiIndex | None, F: Sequence[int], d: int, total: int) -> MultiIndex:
    alpha = [0] * (d + 1)
    rest = [v for v in range(d + 1) if v not in F]
    for v, a in zip(rest, theta):
        alpha[v] = a
    if sigma is None:
        alpha[F[0]] = total - sum(theta)
    else:
        for v, a in zip(F, sigma):
            alpha[v] = a
    return tuple(alpha)


def bijection_interior_b(beta: MultiIndex, label: DecompositionLabel, config: ElementConfig):
    """``beta -> ((beta_j + b,), sigma)`` for a facet cell of the interior decomposition."""
    d = config.d
    if (
        label.kind != "SigmaFn"
        or label.F is None
        or len(label.F) != d
        or not in_sigma_fn(beta, d, label.F, label.n, config.r_interior)
    ):
        raise CellMismatch(f"{beta} is not in cell {label}")
    (j,) = [v for v in range(d + 1) if v not in label.F]
    return (beta[j] + config.b,), tuple(beta[v] for v in label.F)


def interior_preimage(theta: MultiIndex, sigma: MultiIndex, F: Sequence[int], config: ElementConfig) -> MultiIndex:
    d = config.d
    (j,) = [v for v in range(d + 1) if v not in F]
    beta = [0] * (d + 1)
    beta[j] = theta[0] - config.b
    for v, a in zip(F, sigma):
        beta[v] = a
    return tuple(beta)
