"""Local and global degrees of freedom, and their exact evaluation.

Three families of functionals on a cell K with split point V_A:

* ``VertexDerivative``: ``D^theta u(V)`` along the standard basis, ``|theta| <= r_d``;
* ``FaceMoment``: ``(1/|F|) int_F (D_F^theta u) [[lambda_F]]^sigma`` for a t-face F,
  with ``theta`` over the face normals, ``|theta| = n <= r_{d-t}`` and
  ``sigma`` in ``Sigma_0^{q_{t,n}}(I_F, k - n)``;
* ``InteriorMoment``: ``(1/|K|) int_K u Q([[lambda]]^beta)`` for
  ``beta`` in ``Sigma_0^{r - b}(I_d, rho)``.

Boundary functionals are evaluated on the piece ``K_j`` with the smallest
``j`` outside the face.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .barypoly import BaryPoly, PiecewisePoly, mean_value, mixed_derivative, product, restrict
from .errors import NonConformingMesh, SiteNotInCell
from .exact import binomial
from .geometry import Mesh, SplitSimplex, face_frame
from .multiindex import (
    DecompositionLabel,
    ElementConfig,
    boundary_preimage,
    enumerate_sigma,
    enumerate_sigma0,
    interior_preimage,
)
from .qop import monomial_image

VERTEX = "VertexDerivative"
FACE = "FaceMoment"
INTERIOR = "InteriorMoment"


@dataclass(frozen=True)
class DofLabel:
    group: str  # "boundary" or "interior"
    cell: DecompositionLabel
    index: tuple

    def as_dict(self) -> dict:
        return {"group": self.group, "cell": self.cell.as_dict(), "index": list(self.index)}


@dataclass(frozen=True)
class DofFunctional:
    kind: str
    site: tuple  # global vertex ids; the cell's ids for interior moments
    n: int
    theta: tuple
    sigma: tuple | None = None
    beta: tuple | None = None
    label: DofLabel | None = None

    @property
    def key(self) -> tuple:
        """Mesh-wide identity: shared sites give equal keys from every cell."""
        return (len(self.site) - 1, self.site, self.kind, self.n, self.theta, self.sigma, self.beta)

    @property
    def site_dim(self) -> int:
        return len(self.site) - 1


@lru_cache(maxsize=4096)
def _theta_directions(mesh: Mesh, site: tuple) -> tuple:
    return face_frame(mesh, site).normals


def build_local_dofs(config: ElementConfig, mesh: Mesh, cell: int) -> list[DofFunctional]:
    """Ordered local DOFs of one cell: by site dimension and ids, then n, theta, sigma/beta."""
    config.require_valid()
    d, k = config.d, config.k
    ids = mesh.cells[cell]
    rb = config.r_boundary
    out: list[DofFunctional] = []
    for t in range(d):
        for local in combinations(range(d + 1), t + 1):
            site = tuple(ids[v] for v in local)
            rest = d - t
            for n in range(config.face_order(t) + 1):
                for theta in enumerate_sigma(rest, n):
                    if t == 0:
                        sigmas = [None]
                    else:
                        sigmas = enumerate_sigma0(tuple(range(t + 1)), config.q(t, n), k - n)
                    for sigma in sigmas:
                        label = _boundary_label(config, local, n, theta, sigma, rb)
                        kind = VERTEX if t == 0 else FACE
                        out.append(DofFunctional(kind, site, n, theta, sigma, None, label))
    full = tuple(range(d + 1))
    cell_label = DecompositionLabel("Sigma0")
    for beta in enumerate_sigma0(full, config.r_interior, config.rho):
        out.append(
            DofFunctional(INTERIOR, ids, sum(beta), (), None, beta, DofLabel("interior", cell_label, beta))
        )
    return out


def _boundary_label(config: ElementConfig, local: tuple, n: int, theta, sigma, rb) -> DofLabel:
    d = config.d
    t = len(local) - 1
    if n <= rb[d - t - 1]:
        alpha = boundary_preimage(theta, sigma, local, d, config.k)
        return DofLabel("boundary", DecompositionLabel("SigmaFn", local, n), alpha)
    # facet functionals with b <= n <= r_1
    beta = interior_preimage(theta, sigma, local, config)
    return DofLabel("interior", DecompositionLabel("SigmaFn", local, n - config.b), beta)


def local_dof_count(config: ElementConfig) -> int:
    """Closed count of the local DOFs on one cell (independent of geometry)."""
    d, k = config.d, config.k
    total = 0
    for t in range(d):
        per_face = 0
        for n in range(config.face_order(t) + 1):
            dirs = binomial(n + d - t - 1, d - t - 1)
            count = 1 if t == 0 else len(enumerate_sigma0(tuple(range(t + 1)), config.q(t, n), k - n))
            per_face += dirs * count
        total += binomial(d + 1, t + 1) * per_face
    return total + len(enumerate_sigma0(tuple(range(d + 1)), config.r_interior, config.rho))


@dataclass(frozen=True)
class GlobalDofs:
    dofs: tuple
    cell_maps: tuple  # per cell: global id of each local dof, in local order

    def __len__(self):
        return len(self.dofs)


def build_global_dofs(config: ElementConfig, mesh: Mesh) -> GlobalDofs:
    """One functional per (site, theta, sigma) mesh-wide, with local-to-global maps."""
    if mesh.d != config.d:
        raise NonConformingMesh(f"mesh dimension {mesh.d} does not match d = {config.d}")
    locals_ = [build_local_dofs(config, mesh, c) for c in range(len(mesh.cells))]
    keys = {}
    for dofs in locals_:
        for dof in dofs:
            keys.setdefault(dof.key, dof)
    ordered = sorted(keys)
    index = {key: i for i, key in enumerate(ordered)}
    maps = tuple(tuple(index[dof.key] for dof in dofs) for dofs in locals_)
    return GlobalDofs(tuple(keys[key] for key in ordered), maps)


# ---------------------------------------------------------------------------
# evaluation


def _check_site(dof: DofFunctional, split: SplitSimplex) -> tuple:
    if not set(dof.site) <= set(split.ids):
        raise SiteNotInCell(f"site {dof.site} is not a subsimplex of cell {split.ids}")
    return split.local_face(dof.site)


def evaluation_piece(split: SplitSimplex, local_face: Sequence[int]) -> int:
    return min(j for j in range(split.d + 1) if j not in local_face)


@lru_cache(maxsize=64)
def _interior_weights(config: ElementConfig, split: SplitSimplex, beta: tuple) -> PiecewisePoly:
    return monomial_image(config, split, beta)


def evaluate_dof(
    dof: DofFunctional,
    u: PiecewisePoly,
    mesh: Mesh,
    config: ElementConfig,
    piece: int | None = None,
) -> Fraction:
    """Exact value of ``dof`` on ``u``; ``piece`` overrides the evaluation piece."""
    split = u.split
    local = _check_site(dof, split)
    if dof.kind == INTERIOR:
        if tuple(dof.site) != tuple(split.ids):
            raise SiteNotInCell("interior moments belong to their own cell")
        w = _interior_weights(config, split, dof.beta)
        total = Fraction(0)
        for j in range(split.d + 1):
            total += split.mu[j] * mean_value(product(u.pieces[j], w.pieces[j]))
        return total
    j = evaluation_piece(split, local) if piece is None else piece
    if j in local:
        raise SiteNotInCell(f"piece {j} does not contain the site")
    dirs = _theta_directions(mesh, dof.site)
    p = mixed_derivative(u.pieces[j], dirs, dof.theta)
    if dof.kind == VERTEX:
        return p.at_vertex(local[0])
    f = restrict(p, local)
    s = BaryPoly.monomial(f.frame, dof.sigma)
    return mean_value(product(f, s))


def functional_row(dof: DofFunctional, split: SplitSimplex, mesh: Mesh, config: ElementConfig) -> dict:
    """Sparse row of ``dof`` against the concatenated piece coefficients."""
    k = config.k
    n = split.d + 1
    basis = enumerate_sigma(n, k)
    m = len(basis)
    local = _check_site(dof, split)
    pieces = range(n) if dof.kind == INTERIOR else [evaluation_piece(split, local)]
    row = {}
    zero = PiecewisePoly.zero(split, k)
    for j in pieces:
        for pos, alpha in enumerate(basis):
            unit = list(zero.pieces)
            unit[j] = BaryPoly(unit[j].frame, k, {alpha: 1})
            v = evaluate_dof(dof, PiecewisePoly(split, tuple(unit)), mesh, config)
            if v:
                row[j * m + pos] = v
    return row
