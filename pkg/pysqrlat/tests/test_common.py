# coding=utf-8
import io
import logging

import numpy as np
import pytest


@pytest.fixture
def common():
    from pysqrlat import common

    return common


def test_config_defaults(common):
    config = common.Config()

    assert config.y_min == 0.05
    assert config.threads == 1
    assert config.unit_power_budget == 64
    assert config.as_dict()['theta_budget'] == 200000


def test_config_overrides_known_keys(common):
    config = common.Config(threads=4, tau_z=1e-9)

    assert config.threads == 4
    assert config.tau_z == 1e-9


def test_config_rejects_unknown_keys(common):
    with pytest.raises(common.InvalidInputError):
        common.Config(colour='blue')


def test_precision_defaults_without_environment(common, monkeypatch):
    monkeypatch.delenv(common.PRECISION_ENV, raising=False)

    assert common.working_precision() == common.DEFAULT_PRECISION


def test_precision_is_read_from_environment(common, monkeypatch):
    monkeypatch.setenv(common.PRECISION_ENV, '50')

    assert common.working_precision() == 50


@pytest.mark.parametrize('value', ['fifty', '10'])
def test_bad_precision_is_invalid_input(common, monkeypatch, value):
    monkeypatch.setenv(common.PRECISION_ENV, value)

    with pytest.raises(common.InvalidInputError):
        common.working_precision()


def test_precondition_error_is_invalid_input(common):
    assert issubclass(common.PreconditionError, common.InvalidInputError)
    assert issubclass(common.SearchBudgetError, common.SqrlatError)
    assert not issubclass(common.VerificationError, common.InvalidInputError)


def test_power_over_i_on_imaginary_axis(common):
    assert abs(common.power_over_i(2j, 3) - 8.0) < 1e-12
    assert abs(common.power_over_i(1j, 4.5) - 1.0) < 1e-12


def test_power_over_i_uses_principal_branch(common):
    w = -1.0 + 1e-3j

    value = common.power_over_i(w, 0.5)

    # w/i is close to i, so the square root lies near exp(i pi/4)
    assert abs(value - np.exp(0.25j * np.pi)) < 1e-3


def test_power_over_i_vectorizes(common):
    values = common.power_over_i(np.array([1j, 2j]), 2)

    assert np.allclose(values, [1.0, 4.0])


def test_parallel_map_keeps_order(common):
    assert common.parallel_map(lambda x: x * x, range(10), threads=3) == [x * x for x in range(10)]


def test_parallel_map_reraises_first_error(common):
    def func(x):
        if x in (4, 7):
            raise ValueError(x)
        return x

    with pytest.raises(ValueError) as info:
        common.parallel_map(func, range(10), threads=2)

    assert info.value.args == (4,)


def test_setup_logging_sets_level(common):
    stream = io.StringIO()

    logger = common.setup_logging(1, stream)
    logging.getLogger('pysqrlat.test').info('hello')
    logging.getLogger('pysqrlat.test').debug('hidden')

    assert logger.level == logging.INFO
    assert 'INFO pysqrlat.test: hello' in stream.getvalue()
    assert 'hidden' not in stream.getvalue()
    common.setup_logging(0)
