# coding=utf-8
import io
import math
from fractions import Fraction

import numpy as np
import pytest


@pytest.fixture
def idlat():
    from pysqrlat import idlat

    return idlat


@pytest.fixture
def q5():
    from pysqrlat.numfield import make_quadratic_field

    return make_quadratic_field(5)


def test_ring_of_integers_has_norm_one(idlat, q5):
    ring = idlat.ring_of_integers(q5)

    assert ring.norm == 1
    assert ring.is_module()


def test_inverse_different_norm(idlat, q5):
    dual = idlat.inverse_different(q5)

    assert dual.norm == Fraction(1, 5)
    assert dual.is_module()


def test_duality_is_an_involution(idlat, q5):
    a = idlat.principal_ideal(q5.element([2, 1]))

    assert idlat.dual_ideal(idlat.dual_ideal(a)) == a


def test_principal_ideal_norm(idlat, q5):
    assert idlat.principal_ideal(q5.one * 2).norm == 4


def test_zero_is_not_an_ideal(idlat, q5):
    from pysqrlat.common import InvalidInputError

    with pytest.raises(InvalidInputError):
        idlat.principal_ideal(q5.zero)


def test_ideal_product(idlat, q5):
    ring = idlat.ring_of_integers(q5)
    two = idlat.principal_ideal(q5.one * 2)

    assert idlat.ideal_product(ring, ring) == ring
    assert idlat.ideal_product(two, two) == idlat.principal_ideal(q5.one * 4)


def test_membership(idlat, q5):
    ring = idlat.ring_of_integers(q5)

    assert idlat.membership(ring, q5.basis_element(1))
    assert not idlat.membership(ring, q5.one / 2)


def test_trace_one_element(idlat, q5):
    dual = idlat.inverse_different(q5)

    x = idlat.trace_one_element(dual)

    assert x.trace() == 1
    assert idlat.membership(dual, x)


def test_trace_one_element_needs_surjective_trace(idlat, q5):
    from pysqrlat.common import PreconditionError

    with pytest.raises(PreconditionError):
        idlat.trace_one_element(idlat.principal_ideal(q5.one * 2))


def test_negative_trace_slice_is_empty(idlat, q5):
    assert idlat.enumerate_trace_slice(idlat.inverse_different(q5), -1) == []


def test_sqrt_points_lie_on_spheres(idlat, q5):
    points = idlat.sqrt_points(idlat.inverse_different(q5), 6)

    assert points.count(0) == 1
    for m, level in points.levels.items():
        if len(level):
            assert np.allclose(np.sum(level ** 2, axis=1), m)


def test_sqrt_points_match_witnesses(idlat, q5):
    points = idlat.sqrt_points(idlat.inverse_different(q5), 4)

    for m in points.levels:
        for point, x in zip(points.levels[m], points.witnesses[m]):
            assert np.allclose(point ** 2, x.embed())


def test_sqrt_points_are_symmetric(idlat, q5):
    points = idlat.sqrt_points(idlat.inverse_different(q5), 5)
    cloud = points.all_points()

    for p in cloud:
        assert np.min(np.max(np.abs(cloud + p), axis=1)) < 1e-9


def test_threaded_enumeration_agrees(idlat, q5):
    dual = idlat.inverse_different(q5)

    single = idlat.sqrt_points(dual, 6)
    threaded = idlat.sqrt_points(dual, 6, threads=3)

    assert np.array_equal(single.all_points(), threaded.all_points())


def test_ellipsoid_needs_hecke_square(idlat, q5):
    from pysqrlat.common import PreconditionError

    with pytest.raises(PreconditionError):
        idlat.ellipsoid_points(q5.one, idlat.ring_of_integers(q5), 3.0)


def test_ellipsoid_points_lie_on_levels(idlat, q5):
    from pysqrlat.numfield import sqrt_disc

    c = sqrt_disc(q5).inverse()
    ring = idlat.ring_of_integers(q5)

    points = idlat.ellipsoid_points(c, ring, 6.0)
    scale = points.metadata['level_scale']

    assert idlat.check_hecke_square(c, ring)
    assert abs(scale - 1 / math.sqrt(5)) < 1e-15
    for key, level in points.levels.items():
        assert np.allclose(np.sum(level ** 2, axis=1), scale * float(key))


def test_asymptotic_count(idlat, q5):
    dual = idlat.inverse_different(q5)

    assert abs(idlat.asymptotic_count(dual, 3) - 4 * 3 / (0.2 * math.sqrt(5))) < 1e-12


def test_count_table_has_one_row_per_level(idlat, q5):
    rows = idlat.count_vs_asymptotic(idlat.inverse_different(q5), 4)

    assert [row[0] for row in rows] == [0, 1, 2, 3, 4]
    assert rows[0][1] == 1
    assert rows[0][3] is None


def test_points_csv(idlat, q5):
    points = idlat.sqrt_points(idlat.inverse_different(q5), 2)
    handle = io.StringIO()

    idlat.write_points_csv(points, handle)
    lines = handle.getvalue().splitlines()

    assert lines[0] == 'm,x1,x2'
    assert len(lines) == 1 + len(points)
    assert lines[1] == '0,0,0'


def test_ellipsoid_csv_is_keyed_by_sum_of_squares(idlat, q5):
    from pysqrlat.numfield import sqrt_disc

    points = idlat.ellipsoid_points(sqrt_disc(q5).inverse(), idlat.ring_of_integers(q5), 6.0)
    handle = io.StringIO()

    idlat.write_points_csv(points, handle)
    rows = [[float(v) for v in line.split(',')] for line in handle.getvalue().splitlines()[1:]]

    assert len(rows) == len(points)
    assert any(row[0] > 0 for row in rows)
    for m, x1, x2 in rows:
        assert abs(m - (x1 * x1 + x2 * x2)) < 1e-9 * max(1.0, m)
