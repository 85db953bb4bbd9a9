from fractions import Fraction as Q
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from alfeld.barypoly import BaryPoly, PiecewisePoly, cell_frame, mixed_derivative, restrict
from alfeld.errors import DegreeMismatch, NotInRange
from alfeld.geometry import alfeld_split, builtin_mesh, reference_simplex
from alfeld.multiindex import ElementConfig, decomposition_pair, enumerate_sigma
from alfeld.qop import (
    apply_q,
    derivative_scaling_holds,
    invert_q,
    monomial_image,
    poly_vanishes_on,
    vanishing_transfer_check,
)
from alfeld.spline_space import membership_test

CT = ElementConfig(2, (1, 1), 3, 1)
SEPTIC = ElementConfig(2, (2, 3), 7, 1)
SPLIT2 = alfeld_split(reference_simplex(2), 0, (Q(1, 5), Q(2, 7)))
SPLIT3 = alfeld_split(builtin_mesh("unit-tet"), 0)


def random_poly(frame, degree, draw):
    idx = enumerate_sigma(frame.size, degree)
    vals = draw(st.lists(st.integers(-4, 4), min_size=len(idx), max_size=len(idx)))
    return BaryPoly(frame, degree, dict(zip(idx, vals)))


def test_shift_of_monomial_on_each_piece():
    u = monomial_image(CT, SPLIT2, (0, 0, 2))
    assert u.degree == 3
    for j, piece in enumerate(u.pieces):
        assert all(a[j] >= 1 for a in piece.coeffs)


@given(st.data())
def test_round_trip_ct(data):
    p = random_poly(cell_frame(SPLIT2), CT.rho, data.draw)
    assert invert_q(CT, apply_q(CT, p, SPLIT2), SPLIT2) == p


@given(st.data())
def test_linearity(data):
    K = cell_frame(SPLIT2)
    p = random_poly(K, SEPTIC.rho, data.draw)
    q = random_poly(K, SEPTIC.rho, data.draw)
    assert apply_q(SEPTIC, p + q, SPLIT2) == apply_q(SEPTIC, p, SPLIT2) + apply_q(SEPTIC, q, SPLIT2)
    assert apply_q(SEPTIC, p.scale(Q(2, 3)), SPLIT2) == apply_q(SEPTIC, p, SPLIT2).scale(Q(2, 3))


def test_degree_checks():
    with pytest.raises(DegreeMismatch):
        apply_q(CT, BaryPoly.monomial(cell_frame(SPLIT2), (1, 0, 0)), SPLIT2)
    with pytest.raises(DegreeMismatch):
        invert_q(CT, PiecewisePoly.zero(SPLIT2, 2), SPLIT2)


def test_not_in_range_low_layer():
    u = PiecewisePoly.zero(SPLIT2, 3)
    pieces = list(u.pieces)
    pieces[1] = BaryPoly.monomial(pieces[1].frame, (3, 0, 0))
    with pytest.raises(NotInRange) as err:
        invert_q(CT, PiecewisePoly(SPLIT2, tuple(pieces)), SPLIT2)
    assert err.value.reason == "NonzeroLowLayer" and err.value.pieces == (1,)


def test_not_in_range_mismatch():
    u = PiecewisePoly.zero(SPLIT2, 3)
    pieces = list(u.pieces)
    pieces[2] = BaryPoly.monomial(pieces[2].frame, (1, 0, 2))
    with pytest.raises(NotInRange) as err:
        invert_q(CT, PiecewisePoly(SPLIT2, tuple(pieces)), SPLIT2)
    assert err.value.reason == "PreimageMismatch" and err.value.pieces == (0, 2)


@pytest.mark.parametrize("config, split", [(CT, SPLIT2), (SEPTIC, SPLIT2), (ElementConfig(3, (1, 1, 2), 5, 1), SPLIT3)])
def test_derivative_scaling_on_monomials(config, split):
    K = cell_frame(split)
    for beta in enumerate_sigma(K.size, config.rho):
        assert derivative_scaling_holds(config, BaryPoly.monomial(K, beta), split)


def vanishes_by_derivatives(p, positions, order):
    """Independent route: every standard-direction derivative up to ``order`` restricts to zero."""
    d = p.frame.dim
    dirs = [tuple(int(i == c) for i in range(d)) for c in range(d)]
    for n in range(order + 1):
        if n > p.degree:
            break
        for theta in enumerate_sigma(d, n):
            q = mixed_derivative(p, dirs, theta)
            if not restrict(q, positions).is_zero():
                return False
    return True


@given(st.data())
def test_coefficient_criterion_matches_derivatives(data):
    K = cell_frame(SPLIT2)
    deg = data.draw(st.integers(1, 4))
    support = data.draw(st.lists(st.sampled_from(enumerate_sigma(3, deg)), min_size=1, max_size=3))
    p = BaryPoly(K, deg, {a: 1 for a in support})
    face = data.draw(st.sampled_from([(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]))
    order = data.draw(st.integers(0, deg))
    assert poly_vanishes_on(p, face, order) == vanishes_by_derivatives(p, face, order)


def test_vanishing_transfer_exhaustive_on_monomials():
    K = cell_frame(SPLIT2)
    for beta in enumerate_sigma(3, SEPTIC.rho):
        p = BaryPoly.monomial(K, beta)
        for t in (1, 2):
            for F in combinations(range(3), t):
                for n in range(SEPTIC.rho + 1):
                    a, b = vanishing_transfer_check(SEPTIC, p, F, n, SPLIT2)
                    assert a == b


@pytest.mark.parametrize("config, split", [(CT, SPLIT2), (SEPTIC, SPLIT2), (ElementConfig(3, (1, 1, 2), 5, 1), SPLIT3)])
def test_interior_images_are_splines(config, split):
    _, interior = decomposition_pair(config)
    for cell in interior:
        for beta in cell.indices:
            assert membership_test(config, split, monomial_image(config, split, beta)).member


def test_generic_image_need_not_be_a_spline():
    p = BaryPoly.monomial(cell_frame(SPLIT2), (SEPTIC.rho, 0, 0))
    result = membership_test(SEPTIC, SPLIT2, apply_q(SEPTIC, p, SPLIT2))
    assert not result.member and result.witness is not None
