"""The layer-shifting operator from degree-rho polynomials to piecewise degree-k ones.

On piece ``K_j`` a polynomial ``p`` of degree ``rho = k - b`` is re-expanded in
the piece frame and every index is shifted by ``b`` in the slot of the split
point::

    Q([[lambda]]_j^beta)|_{K_j} = [[lambda]]_j^(beta + b e_j)

The image is exactly the set of piecewise polynomials whose coefficients with
``alpha_j < b`` vanish on every piece and whose unshifted pieces glue to one
polynomial of degree rho.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .barypoly import (
    BaryPoly,
    PiecewisePoly,
    cell_frame,
    change_frame,
    directional_from_weights,
    piece_frame,
)
from .errors import DegreeMismatch, NotInRange
from .exact import factorial
from .geometry import SplitSimplex, sub
from .multiindex import ElementConfig, enumerate_sigma


@dataclass(frozen=True)
class QImage:
    config: ElementConfig
    source: BaryPoly
    image: PiecewisePoly


def _shift(alpha: tuple, j: int, b: int) -> tuple:
    return alpha[:j] + (alpha[j] + b,) + alpha[j + 1 :]


def apply_q(config: ElementConfig, p: BaryPoly, split: SplitSimplex) -> PiecewisePoly:
    if p.degree != config.rho:
        raise DegreeMismatch(f"expected degree rho = {config.rho}, got {p.degree}")
    b = config.b
    pieces = []
    for j in range(split.d + 1):
        pj = change_frame(p, piece_frame(split, j))
        pieces.append(BaryPoly(pj.frame, config.k, {_shift(a, j, b): c for a, c in pj.coeffs.items()}))
    return PiecewisePoly(split, tuple(pieces))


def q_image(config: ElementConfig, p: BaryPoly, split: SplitSimplex) -> QImage:
    return QImage(config, p, apply_q(config, p, split))


def invert_q(config: ElementConfig, u: PiecewisePoly, split: SplitSimplex) -> BaryPoly:
    """Unique degree-rho preimage of ``u``; raises :class:`NotInRange` otherwise."""
    if u.degree != config.k:
        raise DegreeMismatch(f"expected degree k = {config.k}, got {u.degree}")
    b = config.b
    K = cell_frame(split)
    for j, piece in enumerate(u.pieces):
        low = [a for a in piece.coeffs if a[j] < b]
        if low:
            raise NotInRange("NonzeroLowLayer", (j,), f"coefficient at {min(low)} with alpha_{j} < {b}")
    candidates = []
    for j, piece in enumerate(u.pieces):
        down = {_shift(a, j, -b): c for a, c in piece.coeffs.items()}
        candidates.append(change_frame(BaryPoly(piece.frame, config.rho, down), K))
    for j in range(1, len(candidates)):
        if candidates[j] != candidates[0]:
            raise NotInRange("PreimageMismatch", (0, j))
    return candidates[0]


def monomial_image(config: ElementConfig, split: SplitSimplex, beta: Sequence[int]) -> PiecewisePoly:
    """``Q([[lambda]]^beta)`` for a monomial of the cell frame."""
    return apply_q(config, BaryPoly.monomial(cell_frame(split), beta), split)


# ---------------------------------------------------------------------------
# derivative scaling at the split point


def _jet_at_vertex(p: BaryPoly, weights: Sequence[tuple], n: int, position: int) -> dict:
    """All n-th mixed derivatives along the given weight vectors, evaluated at a frame vertex."""
    out = {}
    for theta in enumerate_sigma(len(weights), n):
        q = p
        for w, times in zip(weights, theta):
            for _ in range(times):
                q = directional_from_weights(q, w)
        out[theta] = q.at_vertex(position)
    return out


def _jet_at_point(p: BaryPoly, weights: Sequence[tuple], n: int, point) -> dict:
    out = {}
    for theta in enumerate_sigma(len(weights), n):
        q = p
        for w, times in zip(weights, theta):
            for _ in range(times):
                q = directional_from_weights(q, w)
        out[theta] = q(point)
    return out


def split_point_directions(split: SplitSimplex, j: int) -> list[tuple]:
    """``e_i = V_i - V_A`` for ``i != j``: the edge directions of K_j at the split point."""
    return [sub(split.vertices[i], split.split_point) for i in range(split.d + 1) if i != j]


def derivative_scaling_holds(config: ElementConfig, p: BaryPoly, split: SplitSimplex) -> bool:
    """Check ``D^theta (Q p)|_{K_j}(V_A) = (rho-n)!/(k-n)! D^theta p(V_A)`` for all n <= rho.

    Every mixed derivative along the piece edge directions ``e_i`` is compared
    exactly, on every piece.
    """
    u = apply_q(config, p, split)
    rho, k = config.rho, config.k
    K = cell_frame(split)
    for j in range(split.d + 1):
        dirs = split_point_directions(split, j)
        piece = u.pieces[j]
        wq = [piece.frame.bary.directional(v) for v in dirs]
        wp = [K.bary.directional(v) for v in dirs]
        for n in range(rho + 1):
            factor = Fraction(factorial(rho - n), factorial(k - n))
            lhs = _jet_at_vertex(piece, wq, n, j)
            rhs = _jet_at_point(p, wp, n, split.split_point)
            if any(lhs[t] != factor * rhs[t] for t in lhs):
                return False
    return True


# ---------------------------------------------------------------------------
# vanishing of derivatives on subsimplices


def poly_vanishes_on(p: BaryPoly, face: Sequence[int], order: int) -> bool:
    """All derivatives up to ``order`` vanish on the frame face at ``face`` positions.

    Coefficient criterion: ``c_alpha = 0`` whenever ``|alpha|_{\\F} <= order``.
    """
    face = set(face)
    for a, c in p.coeffs.items():
        if c and sum(x for i, x in enumerate(a) if i not in face) <= order:
            return False
    return True


def piecewise_vanishes_on(u: PiecewisePoly, face: Sequence[int], order: int) -> bool:
    """Vanishing on a face F of K: piece ``K_j`` meets F in the face ``F \\ {j}``."""
    for j, piece in enumerate(u.pieces):
        E = [v for v in face if v != j]
        if E and not poly_vanishes_on(piece, E, order):
            return False
    return True


def vanishing_transfer_check(
    config: ElementConfig, p: BaryPoly, face: Sequence[int], order: int, split: SplitSimplex
) -> tuple[bool, bool]:
    """(p vanishes to ``order`` on F, Q p vanishes to ``order + b`` on F)."""
    a = poly_vanishes_on(p, face, order)
    b = piecewise_vanishes_on(apply_q(config, p, split), face, order + config.b)
    return a, b
