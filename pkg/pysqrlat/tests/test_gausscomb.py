# coding=utf-8
import numpy as np
import pytest
from scipy import integrate


@pytest.fixture
def gausscomb():
    from pysqrlat import gausscomb

    return gausscomb


@pytest.fixture
def line(gausscomb):
    return gausscomb.GaussianCombo(
        [1], terms=[(1.0, (0.2 + 0.7j,)), (-0.5j, (1.5j,))]
    )


def _integrate(func, lower, upper):
    real, _ = integrate.quad(lambda x: func(x).real, lower, upper, limit=200, epsabs=1e-13)
    imag, _ = integrate.quad(lambda x: func(x).imag, lower, upper, limit=200, epsabs=1e-13)
    return real + 1j * imag


def test_parameters_must_lie_in_half_plane(gausscomb):
    from pysqrlat.common import InvalidInputError

    with pytest.raises(InvalidInputError):
        gausscomb.GaussianCombo([2], terms=[(1.0, (0.5 - 0.1j,))])
    assert len(gausscomb.GaussianCombo([2], [-1], terms=[(1.0, (0.5 - 0.1j,))])) == 1


def test_bad_signs_are_rejected(gausscomb):
    from pysqrlat.common import InvalidInputError

    with pytest.raises(InvalidInputError):
        gausscomb.GaussianCombo([1, 2], [1, 0])


def test_value_at_origin_is_coefficient_sum(line):
    assert abs(line([0.0]) - (1.0 - 0.5j)) < 1e-15


def test_evaluation_is_vectorized(line):
    values = line(np.array([[0.0], [0.4], [1.1]]))

    assert values.shape == (3,)
    assert abs(values[1] - line([0.4])) < 1e-15


def test_fourier_transform_matches_quadrature(gausscomb, line):
    transformed = gausscomb.fourier(line)

    for xi in (0.0, 0.3, 0.8):
        expected = _integrate(
            lambda x: line([x]) * np.cos(2 * np.pi * x * xi), -12.0, 12.0
        )
        assert abs(transformed([xi]) - expected) < 1e-8


def test_fourier_transform_is_an_involution_on_radial_functions(gausscomb):
    combo = gausscomb.GaussianCombo([3, 1], terms=[(2.0, (0.1 + 1.2j, 0.7j)), (1j, (-0.3 + 0.5j, 2.0j))])

    twice = gausscomb.fourier(gausscomb.fourier(combo))

    assert gausscomb.relative_residual(twice, combo) < 1e-12


def test_plancherel_norm_matches_quadrature(gausscomb):
    combo = gausscomb.GaussianCombo([2], terms=[(1.0, (0.3 + 0.9j,)), (0.5, (-0.2 + 1.4j,))])

    expected, _ = integrate.quad(
        lambda r: 2 * np.pi * r * abs(combo([r])) ** 2, 0.0, 12.0, limit=200, epsabs=1e-13
    )

    assert abs(gausscomb.plancherel_norm(combo) - np.sqrt(expected)) < 1e-8


def test_plancherel_norm_is_preserved_by_fourier(gausscomb, line):
    before = gausscomb.plancherel_norm(line)
    after = gausscomb.plancherel_norm(gausscomb.fourier(line))

    assert abs(before - after) < 1e-12 * before


def test_simplify_merges_equal_parameters(gausscomb):
    combo = gausscomb.GaussianCombo(
        [1], terms=[(1.0, (1j,)), (2.0, (1j,)), (1e-20, (2j,)), (0.5, (0.5j,))]
    )

    simple = gausscomb.simplify(combo)

    assert len(simple) == 2
    assert simple.terms[1] == (3.0, (1j,))


def test_difference_of_equal_combos_vanishes(gausscomb, line):
    assert gausscomb.relative_residual(line, line * 1.0) == 0.0
    assert gausscomb.relative_residual(line, line * 2.0) == pytest.approx(0.5)


def test_combos_on_different_spaces_do_not_add(gausscomb, line):
    from pysqrlat.common import InvalidInputError

    other = gausscomb.GaussianCombo([2], terms=[(1.0, (1j,))])

    with pytest.raises(InvalidInputError):
        line + other


def test_json_form(gausscomb, line):
    data = gausscomb.to_json(line)

    assert data['dims'] == [1]
    assert data['terms'][1] == {'c': [0.0, -0.5], 'z': [[0.0, 1.5]]}
    assert len(gausscomb.from_json(data)) == 2
