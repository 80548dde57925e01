# coding=utf-8
import math

import numpy as np
import pytest


@pytest.fixture
def grouplab():
    from pysqrlat import grouplab

    return grouplab


@pytest.fixture
def field():
    from pysqrlat import numfield

    return numfield.make_quadratic_field(8)


@pytest.fixture
def beta(field):
    from pysqrlat import numfield

    u = numfield.search_units(field, 5)
    return (u - 1) / 5


def is_plus_minus_identity(blocks):
    return np.allclose(blocks, np.eye(2), atol=1e-9) or np.allclose(blocks, -np.eye(2), atol=1e-9)


def test_relation_holds_for_unit_congruent_one_mod_five(grouplab, field, beta):
    assert beta.is_integral()
    assert grouplab.verify_relation(field, beta)


def test_relation_holds_for_trivial_beta(grouplab, field):
    assert grouplab.verify_relation(field, field.zero)


def test_relation_requires_unit(grouplab, field):
    from pysqrlat.common import PreconditionError

    with pytest.raises(PreconditionError):
        grouplab.verify_relation(field, field.one)


def test_relation_requires_integral_beta(grouplab, field):
    from pysqrlat.common import PreconditionError

    with pytest.raises(PreconditionError):
        grouplab.verify_relation(field, field.one / 5)


def test_relation_word_has_six_alternating_syllables(grouplab, beta):
    word = grouplab.relation_word(beta)

    assert [kind for kind, _ in word] == ['T', 'V', 'T', 'V', 'T', 'V']
    assert grouplab.evaluate_word(word) == grouplab.evaluate_word(word[3:] + word[:3])


def test_ideal_lattices_have_property_one(grouplab, field):
    from pysqrlat import idlat

    lattice = grouplab.Lattice.from_ideal(idlat.ring_of_integers(field), 2)

    assert lattice.exact
    assert grouplab.has_property_I(lattice) == (True, None)


def test_square_lattice_has_axis_vector(grouplab):
    holds, vector = grouplab.has_property_I(grouplab.Lattice.from_basis(np.eye(2)))

    assert not holds
    assert np.count_nonzero(vector) == 1


def test_irrational_lattice_has_no_small_axis_vector(grouplab):
    lattice = grouplab.Lattice.from_basis([[1.0, math.sqrt(2)], [math.sqrt(3), 1.0]])

    assert grouplab.has_property_I(lattice, radius=5) == (True, 5)


def test_singular_basis_is_rejected(grouplab):
    from pysqrlat.common import PreconditionError

    with pytest.raises(PreconditionError):
        grouplab.Lattice.from_basis([[1.0, 2.0], [2.0, 4.0]])


def test_commutators_with_square_lattices_are_trivial(grouplab):
    square = grouplab.Lattice.from_basis(np.eye(2))
    pair = grouplab.LatticePair(square, square)

    sequence = grouplab.commutator_sequence(pair, [0, 1], 5)

    assert [k for k, _, _ in sequence] == [1, 2, 3, 4, 5]
    for k, y, dist in sequence:
        assert dist == 0.0
        assert abs(y[1]) <= 1.0 / k


def test_commutators_tend_to_identity(grouplab):
    square = grouplab.Lattice.from_basis(np.eye(2))
    skew = grouplab.Lattice.from_basis([[1.0, math.sqrt(2)], [0.0, 1.0]])
    pair = grouplab.LatticePair(square, skew)

    sequence = grouplab.commutator_sequence(pair, [0, 1], 8)

    for k, y, dist in sequence:
        assert np.any(y != 0)
        assert abs(y[0]) <= 1 + k * 4 * skew.covolume() + 1e-9
        assert abs(y[1]) <= 1.0 / k + 1e-12
        assert dist <= 3.0 / k
    assert sequence[-1][2] < sequence[0][2]


@pytest.mark.slow
def test_commutator_distance_drops_below_one_percent(grouplab):
    square = grouplab.Lattice.from_basis(np.eye(2))
    skew = grouplab.Lattice.from_basis([[1.0, math.sqrt(2)], [0.0, 1.0]])
    pair = grouplab.LatticePair(square, skew)

    dist = [d for _, _, d in grouplab.commutator_sequence(pair, [0, 1], 100)]

    assert len(dist) == 100
    assert all(d > 0.0 for d in dist)
    assert dist[99] < 1e-2
    assert dist[99] < dist[9] < dist[0]
    assert max(dist[50:]) <= dist[9]


def test_commutators_need_axis_vector(grouplab, field):
    from pysqrlat import idlat
    from pysqrlat.common import PreconditionError

    ideal = grouplab.Lattice.from_ideal(idlat.ring_of_integers(field))
    pair = grouplab.LatticePair(ideal, ideal)

    with pytest.raises(PreconditionError):
        grouplab.commutator_sequence(pair, [0, 1], 3)


def test_commutators_reject_x0_without_zero_coordinate(grouplab):
    from pysqrlat.common import PreconditionError

    square = grouplab.Lattice.from_basis(np.eye(2))

    with pytest.raises(PreconditionError):
        grouplab.commutator_sequence(grouplab.LatticePair(square, square), [1, 1], 3)


def test_probe_finds_relation_from_seeded_generators(grouplab, field, beta):
    from pysqrlat import idlat

    lattice = grouplab.Lattice.from_ideal(idlat.ring_of_integers(field), 2)
    pair = grouplab.LatticePair(lattice, lattice)
    word = grouplab.relation_word(beta)
    seeds = ([e for k, e in word if k == 'T'], [e for k, e in word if k == 'V'])

    found = grouplab.free_product_probe(pair, 6, generator_box=seeds)

    assert found is not None
    assert len(found) == 6
    assert grouplab.evaluate_word(found) == grouplab.evaluate_word(word)


def test_probe_finds_relation_in_integer_lattice(grouplab):
    integers = grouplab.Lattice.from_basis([[1.0]])
    pair = grouplab.LatticePair(integers, integers)

    found = grouplab.free_product_probe(pair, 6, generator_box=2)

    assert found is not None
    assert len(found) == 5
    product = np.eye(2)[None]
    for kind, e in found:
        product = np.einsum('nij,njk->nik', product, grouplab.upper(e) if kind == 'T' else grouplab.lower(e))
    assert is_plus_minus_identity(product[0])


def test_probe_finds_nothing_for_free_lattice(grouplab):
    wide = grouplab.Lattice.from_basis([[3.0]])
    pair = grouplab.LatticePair(wide, wide)

    assert grouplab.free_product_probe(pair, 8, generator_box=2) is None


def test_single_syllable_is_never_a_relation(grouplab):
    integers = grouplab.Lattice.from_basis([[1.0]])

    assert grouplab.free_product_probe(grouplab.LatticePair(integers, integers), 1) is None


def test_probe_report_lists_syllables_and_commutators(grouplab):
    report = grouplab.probe_report([('T', np.array([3.0])), ('V', np.array([-3.0]))], 4, [(1, np.array([2.0, 0.0]), 0.0)])

    assert report['depth'] == 4
    assert report['relation_found'] == [
        {'kind': 'T', 'exponent': [3.0]},
        {'kind': 'V', 'exponent': [-3.0]},
    ]
    assert report['commutators'] == [{'k': 1, 'y': [2.0, 0.0], 'dist': 0.0}]
