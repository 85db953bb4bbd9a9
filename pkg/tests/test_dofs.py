from collections import Counter
from fractions import Fraction as Q

import pytest

from alfeld.barypoly import BaryPoly, PiecewisePoly, cell_frame, change_frame
from alfeld.dimension import dim_shape, dim_superspline
from alfeld.dofs import (
    FACE,
    INTERIOR,
    VERTEX,
    DofFunctional,
    build_global_dofs,
    build_local_dofs,
    evaluate_dof,
    evaluation_piece,
    local_dof_count,
)
from alfeld.errors import NonConformingMesh, SiteNotInCell
from alfeld.geometry import alfeld_split, builtin_mesh, reference_simplex
from alfeld.multiindex import ElementConfig, decomposition_pair
from alfeld.spline_space import shape_basis

CT = ElementConfig(2, (1, 1), 3, 1)
QUINTIC = ElementConfig(3, (1, 1, 2), 5, 1)
SEPTIC = ElementConfig(2, (2, 3), 7, 1)


def per_site(dofs):
    by_site = Counter(d.site for d in dofs)
    return {dim: sorted({c for s, c in by_site.items() if len(s) - 1 == dim}) for dim in {len(s) - 1 for s in by_site}}


def test_clough_tocher_breakdown():
    dofs = build_local_dofs(CT, reference_simplex(2), 0)
    assert len(dofs) == 12
    assert per_site(dofs) == {0: [3], 1: [1]}


def test_quintic_breakdown():
    dofs = build_local_dofs(QUINTIC, builtin_mesh("unit-tet"), 0)
    assert len(dofs) == 65
    assert per_site(dofs) == {0: [10], 1: [2], 2: [3], 3: [1]}


@pytest.mark.parametrize("config, size", [(CT, 12), (SEPTIC, 40), (QUINTIC, 65)])
def test_count_identities(config, size):
    boundary, interior = decomposition_pair(config)
    card = sum(len(c) for c in boundary) + sum(len(c) for c in interior)
    assert local_dof_count(config) == card == dim_shape(config)[0] == size


def test_labels_cover_decomposition_once():
    for config, mesh in ((CT, reference_simplex(2)), (SEPTIC, reference_simplex(2))):
        dofs = build_local_dofs(config, mesh, 0)
        boundary, interior = decomposition_pair(config)
        want = {("boundary", a) for c in boundary for a in c.indices}
        want |= {("interior", b) for c in interior for b in c.indices}
        got = [(d.label.group, d.label.index) for d in dofs]
        assert len(set(got)) == len(got)
        assert set(got) == want


def test_order_is_deterministic_and_grouped():
    dofs = build_local_dofs(SEPTIC, reference_simplex(2), 0)
    dims = [d.site_dim for d in dofs]
    assert dims == sorted(dims)
    assert dofs == build_local_dofs(SEPTIC, reference_simplex(2), 0)
    assert {d.kind for d in dofs} == {VERTEX, FACE, INTERIOR}


def test_two_triangle_global_count():
    mesh = builtin_mesh("two-triangles")
    g = build_global_dofs(CT, mesh)
    assert len(g) == 17
    assert dim_superspline(CT, mesh.face_counts()) == (17, 17)
    assert [len(m) for m in g.cell_maps] == [12, 12]
    shared = set(g.cell_maps[0]) & set(g.cell_maps[1])
    assert len(shared) == 7


def test_two_tets_global_count_matches_formula():
    mesh = builtin_mesh("two-tets")
    g = build_global_dofs(QUINTIC, mesh)
    assert len(g) == dim_superspline(QUINTIC, mesh.face_counts())[0]


def test_single_cell_global_matches_local():
    mesh = reference_simplex(2)
    local = build_local_dofs(CT, mesh, 0)
    g = build_global_dofs(CT, mesh)
    assert sorted(d.key for d in local) == [d.key for d in g.dofs]


def test_global_rejects_wrong_dimension():
    with pytest.raises(NonConformingMesh):
        build_global_dofs(QUINTIC, builtin_mesh("two-triangles"))


def test_values_on_constant():
    mesh = reference_simplex(2)
    split = alfeld_split(mesh, 0)
    one = PiecewisePoly.from_global(split, BaryPoly.constant(cell_frame(split), 1, 3))
    v = DofFunctional(VERTEX, (0,), 0, (0, 0))
    assert evaluate_dof(v, one, mesh, CT) == 1
    f = DofFunctional(FACE, (0, 1), 0, (0,), (1, 1))
    assert evaluate_dof(f, one, mesh, CT) == Q(1, 6)


def test_site_not_in_cell():
    mesh = builtin_mesh("two-triangles")
    split = alfeld_split(mesh, 0)
    u = PiecewisePoly.zero(split, 3)
    with pytest.raises(SiteNotInCell):
        evaluate_dof(DofFunctional(VERTEX, (3,), 0, (0, 0)), u, mesh, CT)
    with pytest.raises(SiteNotInCell):
        evaluate_dof(DofFunctional(VERTEX, (0,), 0, (0, 0)), u, mesh, CT, piece=0)


def test_evaluation_piece_is_smallest_free_slot():
    split = alfeld_split(reference_simplex(3), 0)
    assert evaluation_piece(split, (0, 1)) == 2
    assert evaluation_piece(split, (1, 2, 3)) == 0


@pytest.mark.parametrize("config", [CT, SEPTIC])
def test_all_containing_pieces_agree_on_shape_functions(config):
    mesh = reference_simplex(2)
    split = alfeld_split(mesh, 0, (Q(1, 3), Q(1, 5)))
    basis = shape_basis(config, split)
    for dof in build_local_dofs(config, mesh, 0):
        if dof.kind == INTERIOR:
            continue
        local = split.local_face(dof.site)
        for u in basis.members():
            vals = {evaluate_dof(dof, u, mesh, config, piece=j) for j in range(3) if j not in local}
            assert len(vals) == 1


def test_shared_dofs_agree_across_cells():
    mesh = builtin_mesh("two-triangles")
    frame_pts = mesh.points((0, 1, 2))
    p = BaryPoly(cell_frame(alfeld_split(mesh, 0)), 3, {(1, 1, 1): 2, (3, 0, 0): -1, (0, 2, 1): 5})
    assert cell_frame(alfeld_split(mesh, 0)).points == frame_pts
    u0 = PiecewisePoly.from_global(alfeld_split(mesh, 0), p)
    s1 = alfeld_split(mesh, 1)
    u1 = PiecewisePoly.from_global(s1, change_frame(p, cell_frame(s1)))
    g = build_global_dofs(CT, mesh)
    for gid in set(g.cell_maps[0]) & set(g.cell_maps[1]):
        dof = g.dofs[gid]
        assert evaluate_dof(dof, u0, mesh, CT) == evaluate_dof(dof, u1, mesh, CT)
