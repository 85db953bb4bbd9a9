from fractions import Fraction as Q

import pytest

from alfeld.errors import DegenerateCell, MeshFormatError, NonConformingMesh, SplitPointNotInterior
from alfeld.geometry import (
    Mesh,
    alfeld_split,
    builtin_mesh,
    change_matrix,
    dot,
    face_frame,
    format_mesh,
    parse_mesh,
    piece_coordinates,
    reference_simplex,
    signed_volume,
)


def test_split_weights_and_volumes_triangle():
    mesh = reference_simplex(2)
    split = alfeld_split(mesh, 0, (Q(1, 2), Q(1, 4)))
    assert split.mu == (Q(1, 4), Q(1, 2), Q(1, 4))
    vols = [split.piece_volume(j) for j in range(3)]
    assert sum(vols) == split.volume == Q(1, 2)
    assert [v / split.volume for v in vols] == list(split.mu)


def test_barycenter_split_of_tet():
    split = alfeld_split(builtin_mesh("unit-tet"), 0)
    assert split.volume == Q(1, 6)
    assert all(split.piece_volume(j) == Q(1, 24) for j in range(4))
    assert split.mu == (Q(1, 4),) * 4
    for j, piece in enumerate(split.pieces):
        assert piece[j] == split.split_point


def test_split_point_must_be_interior():
    with pytest.raises(SplitPointNotInterior):
        alfeld_split(reference_simplex(2), 0, (Q(1, 2), Q(1, 2)))


def test_piece_coordinates_match_barycentric_maps():
    split = alfeld_split(reference_simplex(2), 0, (Q(1, 5), Q(2, 5)))
    x = (Q(1, 7), Q(3, 11))
    lam = split.bary(x)
    for j in range(3):
        T = piece_coordinates(split, j)
        want = split.piece_bary[j](x)
        got = tuple(sum(T[i, m] * lam[m] for m in range(3)) for i in range(3))
        assert got == want


def test_change_matrix_is_barycentric_of_targets():
    src = ((Q(0), Q(0)), (Q(2), Q(0)), (Q(0), Q(3)))
    tgt = ((Q(1, 2), Q(1, 2)), (Q(2), Q(0)), (Q(0), Q(3)))
    M = change_matrix(src, tgt)
    for m, p in enumerate(tgt):
        lam = (1 - p[0] / 2 - p[1] / 3, p[0] / 2, p[1] / 3)
        assert tuple(M[i, m] for i in range(3)) == lam


def test_face_frames_are_orthogonal_complements():
    mesh = builtin_mesh("two-tets")
    for t in range(mesh.d):
        for F in mesh.faces(t):
            fr = face_frame(mesh, F)
            assert len(fr.normals) == mesh.d - t
            for n in fr.normals:
                assert all(dot(n, tv) == 0 for tv in fr.tangents) or t == 0
            for a in range(len(fr.normals)):
                for c in range(a):
                    assert dot(fr.normals[a], fr.normals[c]) == 0


def test_edge_normals_example():
    fr = face_frame(builtin_mesh("unit-tet"), (0, 1))
    assert fr.normals == ((0, 1, 0), (0, 0, 1))
    fr = face_frame(builtin_mesh("unit-triangle"), (1, 2))
    assert fr.normals == ((Q(1, 2), Q(1, 2)),)
    fr = face_frame(builtin_mesh("unit-tet"), (1, 2))
    assert fr.normals == ((Q(1, 2), Q(1, 2), 0), (0, 0, 1))


def test_vertex_frames_use_standard_basis():
    fr = face_frame(builtin_mesh("unit-triangle"), (2,))
    assert fr.normals == ((1, 0), (0, 1))


def test_face_counts_and_sharing():
    mesh = builtin_mesh("two-triangles")
    assert mesh.face_counts() == (4, 5, 2)
    assert mesh.shared_faces() == [(1,), (2,), (1, 2)]
    assert builtin_mesh("two-tets").face_counts() == (5, 9, 7, 2)


def test_parse_and_format_round_trip():
    text = "2\n4\n0 0\n1 0\n0 1\n1 1\n2\n0 1 2\n1 2 3\n"
    mesh = parse_mesh(text)
    assert format_mesh(mesh) == text
    assert parse_mesh("\n2\n\n3\n0 0\n1/2 0\n0 1\n1\n0 1 2\n").vertices[1] == (Q(1, 2), 0)


@pytest.mark.parametrize(
    "text, line",
    [
        ("2\n3\n0 0\n1 0\n0\n1\n0 1 2\n", 5),
        ("2\n3\n0 0\n1 0\n0 1\n1\n0 1 5\n", 7),
        ("2\n3\n0 0\n1 0\n0 x\n1\n0 1 2\n", 5),
        ("2\nthree\n", 2),
        ("2\n3\n0 0\n1 0\n0 1\n1\n0 1 2\nextra\n", 8),
        ("2\n3\n0 0\n1 0\n2 0\n1\n0 1 2\n", 7),
        ("2\n3\n0 0\n1 0\n", 5),
    ],
)
def test_parse_errors_report_line(text, line):
    with pytest.raises(MeshFormatError) as err:
        parse_mesh(text)
    assert err.value.line == line


def test_nonconforming_meshes_rejected():
    verts = [(0, 0), (1, 0), (0, 1), (Q(1, 2), Q(1, 2))]
    with pytest.raises(NonConformingMesh):
        Mesh(2, verts, [(0, 1, 2), (0, 1, 2)])
    # both apexes on the same side of the shared edge
    with pytest.raises(NonConformingMesh):
        Mesh(2, [(0, 0), (1, 0), (0, 1), (Q(1, 4), Q(1, 4))], [(0, 1, 2), (0, 1, 3)])
    with pytest.raises(DegenerateCell):
        Mesh(2, [(0, 0), (1, 0), (2, 0)], [(0, 1, 2)])


def test_cells_are_sorted_and_volumes_signed():
    mesh = Mesh(2, [(0, 0), (1, 0), (0, 1)], [(2, 0, 1)])
    assert mesh.cells == ((0, 1, 2),)
    assert signed_volume(mesh.points((0, 1, 2))) == Q(1, 2)
    assert signed_volume(mesh.points((1, 0, 2))) == -Q(1, 2)
