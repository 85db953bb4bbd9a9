"""The local shape space on an Alfeld split: constraints, basis, unisolvence, continuity.

Unknowns are the normalized-monomial coefficients of the d+1 pieces,
concatenated piece by piece in lexicographic index order.  Smoothness across a
subsimplex F is imposed pairwise: the second piece is re-expanded in the first
piece's frame, and the difference must have zero coefficients for all
``|alpha|_{\\F} <= order``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .barypoly import (
    BaryPoly,
    PiecewisePoly,
    _frame_change_images,
    cell_frame,
    change_frame,
    mixed_derivative,
    restrict,
)
from .dofs import (
    INTERIOR,
    DofFunctional,
    GlobalDofs,
    build_global_dofs,
    build_local_dofs,
    evaluate_dof,
    functional_row,
)
from .errors import AssemblyMismatch, DegreeMismatch, NonConformingMesh, SingularMatrix, SolveFailure
from .exact import Factorization, RatMatrix, determinant, nullspace, rank_and_nullity
from .geometry import Mesh, SplitSimplex, alfeld_split
from .multiindex import ElementConfig, decomposition_pair, enumerate_sigma, proper_faces, subsets_of_dim
from .qop import monomial_image


@dataclass(frozen=True)
class ConstraintRow:
    group: str  # "facet", "face", "split-point", "range", "boundary"
    pieces: tuple
    face: tuple
    index: tuple
    row: dict


@dataclass
class SmoothnessConstraintSystem:
    ncols: int
    rows: list = field(default_factory=list)

    def sparse(self) -> tuple[list[dict], int]:
        return [r.row for r in self.rows], self.ncols


@lru_cache(maxsize=None)
def _transposed_images(source: tuple, target: tuple, degree: int) -> dict:
    """``{target index: {source index: weight}}`` for the frame change source -> target."""
    images = _frame_change_images(source, target, degree)
    out: dict = {}
    for g, img in images.items():
        for a, w in img.items():
            out.setdefault(a, {})[g] = w
    return out


def _basis_position(n: int, degree: int) -> dict:
    return {a: i for i, a in enumerate(enumerate_sigma(n, degree))}


def _pair_rows(split: SplitSimplex, k: int, j: int, jp: int, face: tuple, order: int, group: str) -> list:
    """Rows forcing ``piece_j - piece_jp`` to vanish to ``order`` on ``face`` (frame K_j)."""
    n = split.d + 1
    pos = _basis_position(n, k)
    m = len(pos)
    images = _transposed_images(split.pieces[jp], split.pieces[j], k)
    fs = set(face)
    rows = []
    for a, i in pos.items():
        if sum(x for s, x in enumerate(a) if s not in fs) > order:
            continue
        row = {j * m + i: Fraction(1)}
        for g, w in images.get(a, {}).items():
            c = jp * m + pos[g]
            row[c] = row.get(c, 0) - w
        row = {c: v for c, v in row.items() if v}
        if row:
            rows.append(ConstraintRow(group, (j, jp), face, a, row))
    return rows


def constraint_system(
    config: ElementConfig,
    split: SplitSimplex,
    supersmoothness: bool = True,
    split_point: bool = True,
) -> SmoothnessConstraintSystem:
    """Homogeneous rows whose nullspace is the shape space.

    With both toggles off only the C^{r_1} conditions across the interior
    facets remain.
    """
    d, k = config.d, config.k
    n = d + 1
    m = len(enumerate_sigma(n, k))
    system = SmoothnessConstraintSystem(n * m)
    # interior facet between K_j and K_jp: V_jp is the opposite vertex in K_j
    for j in range(n):
        for jp in range(j + 1, n):
            facet = tuple(s for s in range(n) if s != jp)
            system.rows.extend(_pair_rows(split, k, j, jp, facet, config.r[0], "facet"))
    if supersmoothness:
        for t in range(d - 1):
            order = config.face_order(t)
            for F in subsets_of_dim(tuple(range(n)), t):
                owners = [j for j in range(n) if j not in F]
                for jp in owners[1:]:
                    system.rows.extend(_pair_rows(split, k, owners[0], jp, F, order, "face"))
    if split_point:
        for jp in range(1, n):
            system.rows.extend(_pair_rows(split, k, 0, jp, (0,), config.rho, "split-point"))
    return system


def _evaluate_row(row: dict, vec: Sequence) -> Fraction:
    return sum((v * vec[c] for c, v in row.items()), Fraction(0))


@dataclass(frozen=True)
class Membership:
    member: bool
    witness: ConstraintRow | None = None

    def __bool__(self):
        return self.member


def membership_test(config: ElementConfig, split: SplitSimplex, u: PiecewisePoly) -> Membership:
    if u.degree != config.k:
        raise DegreeMismatch(f"expected degree {config.k}, got {u.degree}")
    vec = u.coefficient_vector()
    for r in _cached_system(config, split).rows:
        if _evaluate_row(r.row, vec):
            return Membership(False, r)
    return Membership(True)


@lru_cache(maxsize=32)
def _cached_system(config: ElementConfig, split: SplitSimplex) -> SmoothnessConstraintSystem:
    return constraint_system(config, split)


def dimension_oracle(
    config: ElementConfig,
    split: SplitSimplex,
    supersmoothness: bool = True,
    split_point: bool = True,
) -> int:
    """Exact nullity of the constraint system."""
    system = constraint_system(config, split, supersmoothness, split_point)
    return rank_and_nullity(system.sparse())[1]


# ---------------------------------------------------------------------------
# the explicit basis


@dataclass(frozen=True)
class ShapeBasis:
    boundary: tuple  # ((alpha, PiecewisePoly), ...)
    interior: tuple  # ((beta, PiecewisePoly), ...)

    def __len__(self):
        return len(self.boundary) + len(self.interior)

    def members(self) -> list[PiecewisePoly]:
        return [u for _, u in self.boundary] + [u for _, u in self.interior]


def shape_basis(config: ElementConfig, split: SplitSimplex) -> ShapeBasis:
    boundary_cells, interior_cells = decomposition_pair(config)
    K = cell_frame(split)
    bnd = []
    for cell in boundary_cells:
        for alpha in cell.indices:
            bnd.append((alpha, PiecewisePoly.from_global(split, BaryPoly.monomial(K, alpha))))
    intr = []
    for cell in interior_cells:
        for beta in cell.indices:
            intr.append((beta, monomial_image(config, split, beta)))
    return ShapeBasis(tuple(bnd), tuple(intr))


# ---------------------------------------------------------------------------
# unisolvence


@dataclass(frozen=True)
class UnisolvenceReport:
    matrix_size: int
    nonsingular: bool
    rank: int
    boundary_block_nonsingular: bool
    interior_block_nonsingular: bool
    low_faces_annihilate: bool
    cross_block_zero: bool


class LocalElement:
    """DOFs, basis and the factorized pairing matrix of one cell."""

    def __init__(self, config: ElementConfig, mesh: Mesh, cell: int, split_point=None):
        config.require_valid()
        self.config = config
        self.mesh = mesh
        self.cell = cell
        self.split = alfeld_split(mesh, cell, split_point)
        self.dofs: list[DofFunctional] = build_local_dofs(config, mesh, cell)
        basis = shape_basis(config, self.split)
        if len(self.dofs) != len(basis):
            raise AssemblyMismatch(f"{len(self.dofs)} DOFs against {len(basis)} basis functions")
        by_label = {("boundary", a): u for a, u in basis.boundary}
        by_label.update({("interior", b): u for b, u in basis.interior})
        order = []
        for dof in self.dofs:
            key = (dof.label.group, dof.label.index)
            if key not in by_label:
                raise AssemblyMismatch(f"DOF label {key} has no basis function")
            order.append(key)
        if len(set(order)) != len(order):
            raise AssemblyMismatch("DOF labels are not distinct")
        self.basis = [by_label[key] for key in order]
        self.groups = [key[0] for key in order]
        self.rows = [functional_row(dof, self.split, mesh, config) for dof in self.dofs]
        self._vectors = [u.coefficient_vector() for u in self.basis]
        self.matrix = RatMatrix(
            [[_evaluate_row(row, vec) for vec in self._vectors] for row in self.rows], len(self.basis)
        )
        self._factor = None

    @property
    def size(self) -> int:
        return len(self.dofs)

    def factorization(self) -> Factorization:
        if self._factor is None:
            self._factor = Factorization(self.matrix)
        return self._factor

    def solve(self, values: Sequence) -> PiecewisePoly:
        """The shape function whose local DOF values are ``values``."""
        try:
            coeffs = self.factorization().solve(values)
        except SingularMatrix as exc:
            raise SolveFailure(str(exc)) from exc
        ncols = len(self._vectors[0])
        vec = [Fraction(0)] * ncols
        for c, v in zip(coeffs, self._vectors):
            if c:
                for i, x in enumerate(v):
                    if x:
                        vec[i] += c * x
        return PiecewisePoly.from_vector(self.split, self.config.k, vec)

    def evaluate(self, u: PiecewisePoly) -> list[Fraction]:
        vec = u.coefficient_vector()
        return [_evaluate_row(row, vec) for row in self.rows]


def _block(matrix: RatMatrix, rows: list[int], cols: list[int]) -> RatMatrix:
    return RatMatrix([[matrix[i, j] for j in cols] for i in rows], len(cols))


def unisolvence_check(config: ElementConfig, mesh: Mesh, cell: int = 0, split_point=None) -> UnisolvenceReport:
    el = LocalElement(config, mesh, cell, split_point)
    M = el.matrix
    det = determinant(M)
    rank = M.nrows if det else rank_and_nullity(M)[0]
    bnd = [i for i, g in enumerate(el.groups) if g == "boundary"]
    intr = [i for i, g in enumerate(el.groups) if g == "interior"]
    boundary_ok = determinant(_block(M, bnd, bnd)) != 0
    interior_ok = determinant(_block(M, intr, intr)) != 0
    low = [i for i in bnd if el.dofs[i].site_dim <= config.d - 2]
    annihilate = all(M[i, j] == 0 for i in low for j in intr)
    cross = all(M[i, j] == 0 for i in bnd for j in intr)
    return UnisolvenceReport(M.nrows, det != 0, rank, boundary_ok, interior_ok, annihilate, cross)


# ---------------------------------------------------------------------------
# range and boundary conditions


def _range_rows(config: ElementConfig, split: SplitSimplex) -> list[ConstraintRow]:
    """Rows cutting out the image of the layer-shifting operator."""
    d, k, b, rho = config.d, config.k, config.b, config.rho
    n = d + 1
    pos = _basis_position(n, k)
    m = len(pos)
    rows = []
    for j in range(n):
        for a, i in pos.items():
            if a[j] < b:
                rows.append(ConstraintRow("range", (j,), (j,), a, {j * m + i: Fraction(1)}))
    K = cell_frame(split).points
    tr = [_transposed_images(split.pieces[j], K, rho) for j in range(n)]
    for jp in range(1, n):
        for g in enumerate_sigma(n, rho):
            row: dict = {}
            for j, sign in ((0, 1), (jp, -1)):
                for beta, w in tr[j].get(g, {}).items():
                    shifted = beta[:j] + (beta[j] + b,) + beta[j + 1 :]
                    c = j * m + pos[shifted]
                    row[c] = row.get(c, 0) + sign * w
            row = {c: v for c, v in row.items() if v}
            if row:
                rows.append(ConstraintRow("range", (0, jp), (), g, row))
    return rows


def _boundary_rows(config: ElementConfig, split: SplitSimplex) -> list[ConstraintRow]:
    """Vanishing on every proper face F of K to the orders ``r^boundary_{d-t}``."""
    d, k = config.d, config.k
    n = d + 1
    pos = _basis_position(n, k)
    m = len(pos)
    rb = config.r_boundary
    rows = []
    for F in proper_faces(tuple(range(n))):
        order = rb[d - len(F)]
        for j in range(n):
            E = set(v for v in F if v != j)
            if not E:
                continue
            for a, i in pos.items():
                if sum(x for s, x in enumerate(a) if s not in E) <= order:
                    rows.append(ConstraintRow("boundary", (j,), tuple(sorted(E)), a, {j * m + i: Fraction(1)}))
    return rows


def boundary_condition_check(config: ElementConfig, split: SplitSimplex) -> tuple[int, int, int]:
    """(dim of constrained nullspace, rank of interior basis, rank of both stacked).

    Shape functions in the operator range with vanishing boundary traces are
    spanned by the interior basis iff all three numbers agree.
    """
    system = constraint_system(config, split)
    rows = [r.row for r in system.rows] + [r.row for r in _range_rows(config, split)]
    rows += [r.row for r in _boundary_rows(config, split)]
    null = nullspace((rows, system.ncols))
    interior = [u.coefficient_vector() for _, u in shape_basis(config, split).interior]
    ncols = system.ncols
    as_rows = lambda vs: [{c: v for c, v in enumerate(x) if v} for x in vs]
    r_int = rank_and_nullity((as_rows(interior), ncols))[0]
    r_both = rank_and_nullity((as_rows(interior + null), ncols))[0]
    return len(null), r_int, r_both


# ---------------------------------------------------------------------------
# global assembly and continuity


@dataclass(frozen=True)
class Jump:
    face: tuple
    order: int
    zero: bool

    def as_dict(self) -> dict:
        return {"face": list(self.face), "order": self.order, "zero": self.zero}


@dataclass
class GlobalSpace:
    config: ElementConfig
    mesh: Mesh
    dofs: GlobalDofs
    elements: list

    @classmethod
    def build(cls, config: ElementConfig, mesh: Mesh) -> "GlobalSpace":
        if len(mesh.cells) < 1:
            raise NonConformingMesh("empty mesh")
        g = build_global_dofs(config, mesh)
        elements = [LocalElement(config, mesh, c) for c in range(len(mesh.cells))]
        return cls(config, mesh, g, elements)

    def owner(self, gid: int) -> int:
        """Lowest cell that carries global DOF ``gid``."""
        return next(c for c, gids in enumerate(self.dofs.cell_maps) if gid in gids)

    def local_functions(self, values: Sequence, overrides: dict | None = None) -> list[PiecewisePoly]:
        """Per-cell shape functions matching the global DOF vector.

        ``overrides[(cell, global id)]`` replaces the value seen by one cell only.
        """
        overrides = overrides or {}
        out = []
        for c, el in enumerate(self.elements):
            local = [overrides.get((c, gid), values[gid]) for gid in self.dofs.cell_maps[c]]
            out.append(el.solve(local))
        return out

    def jumps(self, functions: Sequence[PiecewisePoly]) -> list[Jump]:
        """Exact derivative jumps on every shared subsimplex up to its continuity order."""
        mesh, config = self.mesh, self.config
        d = mesh.d
        std = tuple(tuple(Fraction(int(i == c)) for i in range(d)) for c in range(d))
        out = []
        for t in range(d):
            order = config.face_order(t)
            for F, owners in mesh.incidence(t).items():
                if len(owners) < 2:
                    continue
                # every piece of every owner that contains F, re-expressed in one frame
                ref = None
                polys = []
                for c in owners:
                    split = functions[c].split
                    local = split.local_face(F)
                    for j in range(d + 1):
                        if j in local:
                            continue
                        p = functions[c].pieces[j]
                        if ref is None:
                            ref = (p.frame, local)
                        polys.append(change_frame(p, ref[0]))
                frame, local = ref
                base = polys[0]
                diffs = [q - base for q in polys[1:]]
                for n in range(order + 1):
                    zero = True
                    for theta in enumerate_sigma(d, n):
                        for diff in diffs:
                            if not restrict(mixed_derivative(diff, std, theta), local).is_zero():
                                zero = False
                                break
                        if not zero:
                            break
                    out.append(Jump(F, n, zero))
        return out


@dataclass(frozen=True)
class ContinuityReport:
    trials: int
    jumps: tuple  # per trial: tuple of Jump
    all_zero: bool
    defect_detected: bool | None


def random_dof_vector(size: int, rng: random.Random) -> list[Fraction]:
    return [Fraction(rng.randint(-9, 9)) for _ in range(size)]


def continuity_check(
    config: ElementConfig, mesh: Mesh, trials: int = 5, seed: int = 0, plant_defect: bool = True
) -> ContinuityReport:
    if len(mesh.cells) < 2:
        raise NonConformingMesh("continuity needs at least two cells")
    space = GlobalSpace.build(config, mesh)
    rng = random.Random(seed)
    per_trial = []
    for _ in range(trials):
        values = random_dof_vector(len(space.dofs), rng)
        per_trial.append(tuple(space.jumps(space.local_functions(values))))
    all_zero = all(j.zero for trial in per_trial for j in trial)
    detected = None
    if plant_defect:
        values = random_dof_vector(len(space.dofs), rng)
        shared = _shared_dofs(space)
        gid = shared[rng.randrange(len(shared))]
        overrides = {(space.owner(gid), gid): values[gid] + 1}
        jumps = space.jumps(space.local_functions(values, overrides))
        detected = not all(j.zero for j in jumps)
    return ContinuityReport(trials, tuple(per_trial), all_zero, detected)


def _shared_dofs(space: GlobalSpace) -> list[int]:
    seen: dict = {}
    for c, gids in enumerate(space.dofs.cell_maps):
        for g in gids:
            seen.setdefault(g, []).append(c)
    return sorted(g for g, cs in seen.items() if len(cs) > 1)


def dual_basis_check(config: ElementConfig, mesh: Mesh) -> tuple[bool, int]:
    """Each global DOF's dual function evaluates to the identity on all global DOFs.

    Boundary functionals are evaluated from every cell and every piece that
    contains their site, so the check also covers cross-piece agreement.
    """
    space = GlobalSpace.build(config, mesh)
    size = len(space.dofs)
    ok = True
    for gid in range(size):
        values = [Fraction(int(i == gid)) for i in range(size)]
        funcs = space.local_functions(values)
        for c, (el, u) in enumerate(zip(space.elements, funcs)):
            for dof, g in zip(el.dofs, space.dofs.cell_maps[c]):
                if dof.kind == INTERIOR:
                    pieces = [None]
                else:
                    local = el.split.local_face(dof.site)
                    pieces = [j for j in range(config.d + 1) if j not in local]
                for j in pieces:
                    if evaluate_dof(dof, u, mesh, config, piece=j) != values[g]:
                        ok = False
    return ok, size
