"""Simplices with rational vertices, meshes, the Alfeld split and direction frames."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Sequence

from .errors import (
    DegenerateCell,
    MeshFormatError,
    NonConformingMesh,
    SplitPointNotInterior,
)
from .exact import Factorization, RatMatrix, determinant, factorial, format_rational, parse_rational

Point = tuple


def as_point(coords: Sequence) -> Point:
    return tuple(Fraction(c) for c in coords)


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def sub(u: Sequence, v: Sequence) -> Point:
    return tuple(a - b for a, b in zip(u, v))


def signed_volume(points: Sequence[Point]) -> Fraction:
    """Signed d-volume of a d-simplex embedded in R^d."""
    d = len(points) - 1
    base = points[0]
    rows = [sub(p, base) for p in points[1:]]
    return determinant(RatMatrix(rows, d)) / factorial(d)


def squared_volume(points: Sequence[Point]) -> Fraction:
    """Squared t-volume of a t-simplex in R^d, from the Gram determinant."""
    t = len(points) - 1
    if t == 0:
        return Fraction(1)
    base = points[0]
    edges = [sub(p, base) for p in points[1:]]
    gram = RatMatrix([[dot(a, b) for b in edges] for a in edges], t)
    return determinant(gram) / factorial(t) ** 2


@dataclass(frozen=True)
class BarycentricMap:
    """Affine coordinates ``lambda_i(x) = grad[i] . x + offset[i]`` of a d-simplex."""

    grad: tuple
    offset: tuple

    @classmethod
    def of(cls, points: Sequence[Point]) -> "BarycentricMap":
        d = len(points) - 1
        # columns (P_m, 1); lambda = A^{-1} (x, 1)
        A = RatMatrix([[points[m][i] for m in range(d + 1)] for i in range(d)] + [[1] * (d + 1)], d + 1)
        inv = Factorization(A).inverse()
        grad = tuple(tuple(inv[i, c] for c in range(d)) for i in range(d + 1))
        offset = tuple(inv[i, d] for i in range(d + 1))
        return cls(grad, offset)

    def __call__(self, x: Sequence) -> tuple:
        return tuple(dot(g, x) + o for g, o in zip(self.grad, self.offset))

    def directional(self, v: Sequence) -> tuple:
        """``D_v lambda_i`` for every i."""
        return tuple(dot(g, v) for g in self.grad)


def change_matrix(source: Sequence[Point], target: Sequence[Point]) -> RatMatrix:
    """``M[i][m] = lambda^source_i(target vertex m)``.

    Barycentric coordinates of ``source`` are affine, so on the affine hull
    ``lambda^source_i = sum_m M[i][m] lambda^target_m``.
    """
    bmap = BarycentricMap.of(source)
    cols = [bmap(p) for p in target]
    n = len(source)
    return RatMatrix([[cols[m][i] for m in range(len(target))] for i in range(n)], len(target))


class Mesh:
    """Conforming simplicial mesh with rational vertices.

    Cells are stored as sorted vertex-id tuples; every subsimplex is a sorted
    tuple of global vertex ids.
    """

    def __init__(self, d: int, vertices: Sequence[Sequence], cells: Sequence[Sequence[int]]):
        if d < 1:
            raise ValueError("dimension must be positive")
        self.d = d
        self.vertices = tuple(as_point(v) for v in vertices)
        for i, v in enumerate(self.vertices):
            if len(v) != d:
                raise ValueError(f"vertex {i} has {len(v)} coordinates, expected {d}")
        out = []
        for c, cell in enumerate(cells):
            ids = tuple(int(i) for i in cell)
            if len(ids) != d + 1:
                raise ValueError(f"cell {c} has {len(ids)} vertices, expected {d + 1}")
            if len(set(ids)) != len(ids):
                raise ValueError(f"cell {c} repeats a vertex id")
            if any(i < 0 or i >= len(self.vertices) for i in ids):
                raise ValueError(f"cell {c} references a missing vertex")
            ids = tuple(sorted(ids))
            if signed_volume(self.points(ids)) == 0:
                raise DegenerateCell(f"cell {c} {ids} has zero volume")
            out.append(ids)
        self.cells = tuple(out)
        self._check_conforming()

    def points(self, ids: Sequence[int]) -> tuple:
        return tuple(self.vertices[i] for i in ids)

    def _check_conforming(self) -> None:
        if len(set(self.cells)) != len(self.cells):
            raise NonConformingMesh("duplicate cells")
        for facet, owners in self.incidence(self.d - 1).items():
            if len(owners) > 2:
                raise NonConformingMesh(f"facet {facet} is shared by {len(owners)} cells")
            if len(owners) == 2:
                # the two opposite vertices must lie on different sides of the facet
                sides = []
                for c in owners:
                    (apex,) = [v for v in self.cells[c] if v not in facet]
                    sides.append(signed_volume(self.points(facet + (apex,))) > 0)
                if sides[0] == sides[1]:
                    raise NonConformingMesh(f"cells {owners} overlap across facet {facet}")

    @cached_property
    def _faces(self) -> dict:
        faces: dict[int, dict] = {t: {} for t in range(self.d + 1)}
        for c, cell in enumerate(self.cells):
            for t in range(self.d + 1):
                for F in combinations(cell, t + 1):
                    faces[t].setdefault(F, []).append(c)
        return {t: {F: tuple(cs) for F, cs in sorted(fs.items())} for t, fs in faces.items()}

    def faces(self, t: int) -> list[tuple]:
        return list(self._faces[t])

    def incidence(self, t: int) -> dict:
        """Map each t-face to the tuple of cell ids containing it."""
        return self._faces[t]

    def face_counts(self) -> tuple:
        """``(N_0, ..., N_d)``."""
        return tuple(len(self._faces[t]) for t in range(self.d + 1))

    def shared_faces(self) -> list[tuple]:
        """Faces of dimension < d that belong to at least two cells, by dimension."""
        out = []
        for t in range(self.d):
            out.extend(F for F, cs in self._faces[t].items() if len(cs) > 1)
        return out

    def __repr__(self):
        return f"Mesh(d={self.d}, vertices={len(self.vertices)}, cells={len(self.cells)})"


@dataclass(frozen=True)
class SplitSimplex:
    """Alfeld split of one mesh cell.

    ``pieces[j]`` lists the vertices of K_j in local order, with the split point
    in slot ``j``.
    """

    cell: int
    ids: tuple
    vertices: tuple
    split_point: Point
    mu: tuple
    pieces: tuple

    @property
    def d(self) -> int:
        return len(self.ids) - 1

    @cached_property
    def volume(self) -> Fraction:
        return abs(signed_volume(self.vertices))

    def piece_volume(self, j: int) -> Fraction:
        return abs(signed_volume(self.pieces[j]))

    @cached_property
    def bary(self) -> BarycentricMap:
        return BarycentricMap.of(self.vertices)

    @cached_property
    def piece_bary(self) -> tuple:
        return tuple(BarycentricMap.of(p) for p in self.pieces)

    def local_index(self, vertex_id: int) -> int:
        return self.ids.index(vertex_id)

    def local_face(self, global_face: Sequence[int]) -> tuple:
        return tuple(sorted(self.local_index(v) for v in global_face))


def alfeld_split(mesh: Mesh, cell: int, split_point: Sequence | None = None) -> SplitSimplex:
    ids = mesh.cells[cell]
    verts = mesh.points(ids)
    d = mesh.d
    if split_point is None:
        va = tuple(sum((p[c] for p in verts), Fraction(0)) / (d + 1) for c in range(d))
    else:
        va = as_point(split_point)
    bmap = BarycentricMap.of(verts)
    mu = bmap(va)
    if any(m <= 0 for m in mu):
        raise SplitPointNotInterior(f"split point has barycentric coordinates {mu}")
    pieces = tuple(tuple(va if i == j else verts[i] for i in range(d + 1)) for j in range(d + 1))
    return SplitSimplex(cell, ids, verts, va, tuple(mu), pieces)


def piece_coordinates(split: SplitSimplex, j: int) -> RatMatrix:
    """Matrix ``T`` with ``lambda_{j,i} = sum_m T[i][m] lambda_m``.

    ``lambda_{j,j} = lambda_j / mu_j`` and ``lambda_{j,i} = lambda_i - (mu_i/mu_j) lambda_j``.
    """
    mu = split.mu
    n = split.d + 1
    rows = []
    for i in range(n):
        row = [Fraction(0)] * n
        if i == j:
            row[j] = 1 / mu[j]
        else:
            row[i] = Fraction(1)
            row[j] = -mu[i] / mu[j]
        rows.append(row)
    return RatMatrix(rows, n)


@dataclass(frozen=True)
class FaceFrame:
    face: tuple
    tangents: tuple
    normals: tuple


def _gram_schmidt_step(v: Point, basis: Sequence[Point]) -> Point:
    for w in basis:
        c = dot(v, w) / dot(w, w)
        if c:
            v = tuple(a - c * b for a, b in zip(v, w))
    return v


def face_frame(mesh: Mesh, face: Sequence[int]) -> FaceFrame:
    """Tangents from the lowest-id vertex; normals by Gram-Schmidt of e_1..e_d.

    Vertices get the standard basis as their direction set.
    """
    face = tuple(sorted(face))
    d = mesh.d
    pts = mesh.points(face)
    tangents = tuple(sub(p, pts[0]) for p in pts[1:])
    basis: list[Point] = []
    for v in tangents:
        w = _gram_schmidt_step(v, basis)
        if any(w):
            basis.append(w)
    want = d - (len(face) - 1)
    normals = []
    for c in range(d):
        e = tuple(Fraction(int(i == c)) for i in range(d))
        if len(face) == 1:
            normals.append(e)
            continue
        w = _gram_schmidt_step(e, basis)
        if any(w):
            basis.append(w)
            normals.append(w)
        if len(normals) == want:
            break
    return FaceFrame(face, tangents, tuple(normals))


def canonical_frames(mesh: Mesh) -> dict:
    """Direction frames for every face of dimension < d, keyed by global vertex ids."""
    return {F: face_frame(mesh, F) for t in range(mesh.d) for F in mesh.faces(t)}


# ---------------------------------------------------------------------------
# builtin meshes and the text format

BUILTIN_MESHES = {
    "unit-triangle": (2, [(0, 0), (1, 0), (0, 1)], [(0, 1, 2)]),
    "two-triangles": (2, [(0, 0), (1, 0), (0, 1), (1, 1)], [(0, 1, 2), (1, 2, 3)]),
    "unit-tet": (3, [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], [(0, 1, 2, 3)]),
    "two-tets": (
        3,
        [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)],
        [(0, 1, 2, 3), (1, 2, 3, 4)],
    ),
}


def builtin_mesh(name: str) -> Mesh:
    try:
        d, verts, cells = BUILTIN_MESHES[name]
    except KeyError:
        raise ValueError(f"unknown builtin mesh {name!r}; choose from {sorted(BUILTIN_MESHES)}") from None
    return Mesh(d, verts, cells)


def reference_simplex(d: int) -> Mesh:
    verts = [tuple(int(i == c) for c in range(d)) for i in range(-1, d)]
    return Mesh(d, verts, [tuple(range(d + 1))])


def parse_mesh(text: str) -> Mesh:
    """Read ``d``, the vertex block and the cell block; blank lines are ignored."""
    lines = [(n + 1, ln.strip()) for n, ln in enumerate(text.splitlines())]
    lines = [(n, ln) for n, ln in lines if ln]
    pos = 0

    def take(what: str):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 0
            raise MeshFormatError(last + 1, f"unexpected end of file, expected {what}")
        item = lines[pos]
        pos += 1
        return item

    def integer(lineno: int, tok: str, what: str) -> int:
        try:
            return int(tok)
        except ValueError:
            raise MeshFormatError(lineno, f"expected integer {what}, got {tok!r}") from None

    n, ln = take("dimension")
    d = integer(n, ln, "dimension")
    if d < 1:
        raise MeshFormatError(n, "dimension must be positive")
    n, ln = take("vertex count")
    nv = integer(n, ln, "vertex count")
    verts = []
    for _ in range(nv):
        n, ln = take("vertex coordinates")
        toks = ln.split()
        if len(toks) != d:
            raise MeshFormatError(n, f"expected {d} coordinates, got {len(toks)}")
        try:
            verts.append(tuple(parse_rational(t) for t in toks))
        except (ValueError, ZeroDivisionError):
            raise MeshFormatError(n, f"bad rational in {ln!r}") from None
    n, ln = take("cell count")
    nc = integer(n, ln, "cell count")
    cells = []
    for _ in range(nc):
        n, ln = take("cell vertex ids")
        toks = ln.split()
        if len(toks) != d + 1:
            raise MeshFormatError(n, f"expected {d + 1} vertex ids, got {len(toks)}")
        ids = [integer(n, t, "vertex id") for t in toks]
        if len(set(ids)) != len(ids):
            raise MeshFormatError(n, "duplicate vertex id in cell")
        if any(i < 0 or i >= nv for i in ids):
            raise MeshFormatError(n, "vertex id out of range")
        if signed_volume([verts[i] for i in ids]) == 0:
            raise MeshFormatError(n, "degenerate cell")
        cells.append(ids)
    if pos != len(lines):
        raise MeshFormatError(lines[pos][0], "trailing content after the cell block")
    return Mesh(d, verts, cells)


def load_mesh(path: str | Path) -> Mesh:
    return parse_mesh(Path(path).read_text(encoding="utf-8"))


def format_mesh(mesh: Mesh) -> str:
    out = [str(mesh.d), str(len(mesh.vertices))]
    out += [" ".join(format_rational(c) for c in v) for v in mesh.vertices]
    out.append(str(len(mesh.cells)))
    out += [" ".join(str(i) for i in c) for c in mesh.cells]
    return "\n".join(out) + "\n"
