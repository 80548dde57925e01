# coding=utf-8
from fractions import Fraction

import pytest


@pytest.fixture
def numfield():
    from pysqrlat import numfield

    return numfield


@pytest.fixture
def q8(numfield):
    return numfield.make_quadratic_field(8)


@pytest.fixture
def cubic(numfield):
    return numfield.make_monogenic_field(numfield.parse_polynomial('1,0,-4,-1'))


@pytest.mark.parametrize('D, expected', [(5, True), (8, True), (12, True), (9, False), (20, False), (7, False), (1, False)])
def test_fundamental_discriminants(numfield, D, expected):
    assert numfield.is_fundamental_discriminant(D) is expected


def test_quadratic_field_invariants(numfield, q8):
    assert q8.degree == 2
    assert q8.discriminant == 8
    assert numfield.quadratic_data(q8) == (8, 14, 8)
    assert abs(float(q8.covolume()) - 8 ** 0.5) < 1e-12


def test_non_fundamental_discriminant_is_rejected(numfield):
    with pytest.raises(numfield.NotFundamentalError):
        numfield.make_quadratic_field(9)


def test_sqrt_disc_squares_to_discriminant(numfield, q8):
    root = numfield.sqrt_disc(q8)

    assert root * root == 8
    assert root.signs() == (1, -1)


def test_arithmetic_is_exact(q8):
    x = q8.element([3, -1])

    assert x * x.inverse() == 1
    assert (x / 2) * 2 == x
    assert x ** -2 == (x * x).inverse()
    assert 1 - x == -(x - 1)


def test_trace_and_norm(numfield, q8):
    w = q8.basis_element(1)

    assert numfield.trace_norm(w) == (Fraction(8), Fraction(14))


def test_elements_of_different_fields_do_not_mix(numfield, q8):
    other = numfield.make_quadratic_field(5)

    with pytest.raises(TypeError):
        q8.one + other.one


def test_fundamental_unit_of_q5_is_golden_ratio(numfield):
    field = numfield.make_quadratic_field(5)

    u = numfield.fundamental_unit(field)

    assert abs(u.norm()) == 1
    assert abs(u.embed()[0] - (1 + 5 ** 0.5) / 2) < 1e-12


def test_fundamental_unit_of_q8(numfield, q8):
    u = numfield.fundamental_unit(q8)

    assert abs(u.embed()[0] - (1 + 2 ** 0.5)) < 1e-12
    assert u.norm() == -1


def test_signs_are_certified_near_zero(numfield, q8):
    u = numfield.fundamental_unit(q8) ** 31

    conjugate = u.embed_mp(50)[1]

    assert -1e-10 < conjugate < 0
    assert u.signs() == (1, -1)


def test_totally_positive(numfield, q8):
    x = q8.one * 3 + numfield.sqrt_disc(q8)

    assert numfield.is_totally_positive(x)
    assert not numfield.is_totally_positive(numfield.sqrt_disc(q8))
    assert numfield.is_totally_nonnegative(q8.zero)


def test_unit_search_finds_congruent_unit(numfield, q8):
    u = numfield.search_units(q8, 5)

    assert u != 1
    assert abs(u.norm()) == 1
    assert numfield.is_congruent_one(u, 5)


def test_unit_search_respects_budget(numfield, q8):
    with pytest.raises(numfield.UnitSearchError):
        numfield.search_units(q8, 1000003, power_budget=2)


def test_monogenic_cubic(cubic):
    assert cubic.degree == 3
    assert cubic.discriminant == 229
    assert cubic.gen.trace() == 0
    assert cubic.gen.norm() == 1


def test_cubic_embeddings_are_ascending(cubic):
    values = cubic.gen.embed()

    assert values[0] < values[1] < values[2]
    assert all(abs(v ** 3 - 4 * v - 1) < 1e-9 for v in values)


def test_cubic_unit_search(numfield, cubic):
    u = numfield.search_units(cubic, 2)

    assert abs(u.norm()) == 1
    assert numfield.is_congruent_one(u, 2)


@pytest.mark.parametrize('text, error', [
    ('1,0,-4', 'ReduciblePolynomialError'),
    ('1,0,0,-2', 'NotTotallyRealError'),
    ('1,0,-2', 'NonSquarefreeDiscriminantError'),
    ('2,0,-1', 'InvalidInputError'),
])
def test_monogenic_field_rejections(numfield, text, error):
    with pytest.raises(getattr(numfield, error)):
        numfield.make_monogenic_field(numfield.parse_polynomial(text))


def test_malformed_polynomial(numfield):
    with pytest.raises(numfield.InvalidInputError):
        numfield.parse_polynomial('1,x,2')


def test_floats_are_not_exact(numfield):
    with pytest.raises(TypeError):
        numfield.to_fraction(0.5)


def test_q17_generator_embeddings(numfield):
    field = numfield.make_quadratic_field(17)

    omega = field.basis_element(1)

    assert numfield.trace_norm(omega) == (17, 68)
    assert abs(omega.embed()[0] - 10.5616) < 1e-4
    assert abs(omega.embed()[1] - 6.4384) < 1e-4


def test_power_basis_presentation_of_q17(numfield):
    field = numfield.make_monogenic_field([1, -1, -4])

    assert field.discriminant == 17


def test_cubic_with_square_discriminant_is_rejected(numfield):
    with pytest.raises(numfield.NonSquarefreeDiscriminantError):
        numfield.make_monogenic_field([1, -1, -2, 1])


def test_sqrt2_trace_and_norm(numfield, q8):
    root2 = numfield.sqrt_disc(q8) / 2

    assert numfield.trace_norm(root2) == (0, -2)
    assert numfield.invert(root2 + 1) == root2 - 1


def test_totally_positive_unit_mod_four(numfield, q8):
    root2 = numfield.sqrt_disc(q8) / 2

    u = numfield.search_units(q8, 4, require_totally_positive=True)

    assert u == root2 * 12 + 17


def test_unit_mod_three(numfield, q8):
    root2 = numfield.sqrt_disc(q8) / 2

    assert numfield.search_units(q8, 3) == root2 * 408 + 577
