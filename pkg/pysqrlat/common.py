# coding=utf-8
import logging
import os
import sys
import threading

import numpy as np

log = logging.getLogger(__name__)

PRECISION_ENV = 'SQRLAT_PRECISION'
DEFAULT_PRECISION = 30  # decimal digits


class SqrlatError(Exception):
    pass


class InvalidInputError(SqrlatError):
    pass


class PreconditionError(InvalidInputError):
    pass


class SearchBudgetError(SqrlatError):
    pass


class VerificationError(SqrlatError):
    pass


def working_precision():
    value = os.environ.get(PRECISION_ENV, '')
    if not value:
        return DEFAULT_PRECISION
    try:
        dps = int(value)
    except ValueError:
        raise InvalidInputError('%s must be an integer, got %r' % (PRECISION_ENV, value))
    if dps < 15:
        raise InvalidInputError('%s must be at least 15 digits' % PRECISION_ENV)
    return dps


class Config(object):
    """Tolerances and budgets shared by all pipelines."""

    def __init__(self, **kwargs):
        self.tau_z = 1e-12
        self.tau_c = 1e-12
        self.tau_sep = 1e-6
        self.theta_min = 1e-6
        self.y_min = 0.05
        self.precision = working_precision()
        self.unit_power_budget = 64
        self.unit_box = 50
        self.theta_budget = 200000
        self.threads = 1
        for key, value in kwargs.items():
            if not hasattr(self, key):
                raise InvalidInputError('unknown configuration key %r' % key)
            setattr(self, key, value)

    def as_dict(self):
        return dict(self.__dict__)

    def __repr__(self):
        items = ', '.join('%s=%r' % kv for kv in sorted(self.__dict__.items()))
        return 'Config(%s)' % items


default_config = Config()


def power_over_i(w, k):
    """Principal branch of (w/i)**k for w in the upper half-plane.

    w/i lies in the right half-plane, where the principal logarithm is
    continuous. Works on scalars and numpy arrays alike.
    """
    w = np.asarray(w, dtype=complex)
    return np.exp(k * np.log(w / 1j))


def setup_logging(verbose=0, stream=None):
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    root = logging.getLogger('pysqrlat')
    root.handlers[:] = [handler]
    root.setLevel(level)
    return root


def parallel_map(func, items, threads=1):
    """Apply func to every item; results come back in input order.

    With threads > 1 the items are split round-robin over worker threads.
    """
    items = list(items)
    if threads is None or threads <= 1 or len(items) < 2:
        return [func(item) for item in items]

    results = {}
    errors = []
    lock = threading.Lock()

    def worker(offset):
        for index in range(offset, len(items), threads):
            try:
                value = func(items[index])
            except Exception as e:  # re-raised in the caller thread
                with lock:
                    errors.append((index, e))
                return
            with lock:
                results[index] = value

    workers = [threading.Thread(target=worker, args=(i,)) for i in range(threads)]
    for thread in workers:
        thread.daemon = True
        thread.start()
    for thread in workers:
        thread.join()
    if errors:
        raise min(errors, key=lambda pair: pair[0])[1]
    return [results[i] for i in range(len(items))]
