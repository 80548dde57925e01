# coding=utf-8
import importlib
import numpy as np
import pytest


@pytest.fixture
def theta():
    theta = importlib.import_module('pysqrlat.hilbert.theta')

    return theta


@pytest.fixture
def field():
    from pysqrlat import numfield

    return numfield.make_quadratic_field(8)


@pytest.fixture
def ctx(theta, field):
    from pysqrlat import numfield

    c = field.one / numfield.sqrt_disc(field)
    return theta.ThetaContext(c)


def random_points(count, seed=7):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield rng.uniform(-0.5, 0.5, 2) + 1j * np.array([1.0, -1.0]) * rng.uniform(0.6, 1.6, 2)


def test_context_signs_follow_c(ctx):
    assert ctx.delta == (1, -1)


def test_context_rejects_wrong_square(theta, field):
    from pysqrlat.common import PreconditionError

    with pytest.raises(PreconditionError):
        theta.ThetaContext(field.one)


def test_theta_tends_to_one_high_up(theta, ctx):
    value = theta.theta(ctx, [50j, -50j])

    assert abs(value - 1) < 1e-12


def test_theta_rejects_points_outside_domain(theta, ctx):
    from pysqrlat.common import PreconditionError

    with pytest.raises(PreconditionError):
        theta.theta(ctx, [1j, 1j])
    with pytest.raises(PreconditionError):
        theta.theta(ctx, [0.01j, -1j])


def test_series_is_invariant_under_even_translations(ctx, field):
    shift = 2 * field.basis_element(1).embed()

    for z in random_points(5):
        first, _ = ctx.series(z)
        second, _ = ctx.series(z + shift)
        assert abs(first - second) < 1e-12 * max(1.0, abs(first))


def test_series_satisfies_poisson_functional_equation(ctx):
    from pysqrlat.common import power_over_i

    delta = np.array(ctx.delta)
    for z in random_points(20, seed=11):
        left, _ = ctx.series(z)
        right, _ = ctx.series(-1.0 / z)
        right *= np.prod(power_over_i(delta * z, -0.5))
        assert abs(left - right) < 1e-10 * max(1.0, abs(left))


def test_reduction_preserves_theta(ctx):
    z = np.array([0.37 + 0.08j, -0.21 - 0.11j])

    factor, w = ctx.reduce(z)
    direct, _ = ctx.series(z)
    reduced, _ = ctx.series(w)

    assert np.prod(np.abs(w.imag)) >= np.prod(np.abs(z.imag))
    assert abs(direct - factor * reduced) < 1e-9 * max(1.0, abs(direct))


def test_j_theta_of_even_translation_is_one(theta, ctx, field):
    from pysqrlat.hilbert import matrices

    g = matrices.T(2 * field.basis_element(1))
    for z in random_points(3):
        assert abs(theta.j_theta(ctx, g, z) - 1) < 1e-12


def test_j_theta_of_s_at_fixed_point_is_one(theta, ctx, field):
    from pysqrlat.hilbert import matrices

    value = theta.j_theta(ctx, matrices.S(field), [1j, -1j])

    assert abs(value - 1) < 1e-12
    assert abs(theta.j_theta_s(ctx, [1j, -1j]) - 1) < 1e-15


def test_j_theta_of_s_matches_generator_value(theta, ctx, field):
    from pysqrlat.hilbert import matrices

    s = matrices.S(field)
    for z in random_points(5, seed=3):
        assert abs(theta.j_theta(ctx, s, z) - theta.j_theta_s(ctx, z)) < 1e-10


def test_j_theta_is_a_cocycle_on_generator_words(theta, ctx, field):
    from pysqrlat import numfield
    from pysqrlat.hilbert import matrices

    eps = numfield.fundamental_unit(field)
    w = field.basis_element(1)
    generators = [
        matrices.S(field),
        matrices.T(2 * w),
        matrices.T(field.one * -2),
        matrices.M(eps),
        matrices.M(eps.inverse()),
    ]
    rng = np.random.default_rng(5)
    for z in random_points(10, seed=13):
        first = matrices.identity(field)
        second = matrices.identity(field)
        for _ in range(2):
            first = first * generators[rng.integers(len(generators))]
            second = second * generators[rng.integers(len(generators))]
        product = theta.j_theta(ctx, first * second, z)
        split = theta.j_theta(ctx, first, second.act(z)) * theta.j_theta(ctx, second, z)
        assert abs(product - split) < 1e-10 * max(1.0, abs(product))


def test_budget_exhaustion_is_reported(theta, field):
    from pysqrlat import numfield
    from pysqrlat.common import Config

    c = field.one / numfield.sqrt_disc(field)
    ctx = theta.ThetaContext(c, config=Config(theta_budget=10))

    with pytest.raises(theta.ThetaBudgetError):
        ctx.series(np.array([0.1j, -0.1j]))
