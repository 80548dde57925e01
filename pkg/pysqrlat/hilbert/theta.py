# coding=utf-8
"""Theta series of a fractional ideal and the automorphic factor j_theta."""
import itertools
import logging
import math

import numpy as np

from ..common import (
    PreconditionError,
    SearchBudgetError,
    VerificationError,
    default_config,
    power_over_i,
)
from ..idlat import check_hecke_square, ring_of_integers
from ..numfield import fundamental_unit, small_units

log = logging.getLogger(__name__)

TAIL_TARGET = 1e-16


class ThetaZeroError(VerificationError):
    pass


class ThetaBudgetError(SearchBudgetError):
    pass


class ThetaContext(object):
    """theta(z) = sum over alpha in a of exp(pi i sum_j z_j sigma_j(c alpha^2)).

    Requires c a^2 to be the inverse different; the signs of c fix the
    product of half-planes H_delta the series lives on.
    """

    def __init__(self, c, a=None, config=None):
        field = c.field
        self.field = field
        self.c = c
        self.a = a if a is not None else ring_of_integers(field)
        self.config = config or default_config
        if not check_hecke_square(c, self.a):
            raise PreconditionError('c * a^2 is not the inverse different')
        self.delta = tuple(int(s) for s in c.signs())
        self.weights = np.abs(c.embed())
        self.radius = 8.0
        self.precision = self.config.precision
        self._lattice = self.a.embedded_basis()
        self._translations = 2.0 * field.basis_embedding
        self._units = self._balancing_units()

    def __repr__(self):
        return 'ThetaContext(%s, c=%r, delta=%s)' % (self.field.name, self.c, self.delta)

    def _balancing_units(self):
        field = self.field
        if field.degree == 2:
            units = [fundamental_unit(field)]
        else:
            units = small_units(field, 2)[: 2 * field.degree]
        return [np.log(np.abs(u.embed())) * 2.0 for u in units]

    def in_domain(self, z, y_min=0.0):
        z = np.asarray(z, dtype=complex)
        return bool(np.all(np.array(self.delta) * z.imag > y_min))

    def _balance(self, z):
        """Apply M(u) for units u while that evens out the log-heights."""
        if not self._units:
            return z
        heights = np.log(np.abs(z.imag))
        for _ in range(200):
            spread = heights - heights.mean()
            best, best_norm = None, float(np.sum(spread ** 2))
            for shift in self._units:
                for sign in (1.0, -1.0):
                    trial = spread + sign * shift
                    norm = float(np.sum((trial - trial.mean()) ** 2))
                    if norm < best_norm - 1e-12:
                        best, best_norm = sign * shift, norm
            if best is None:
                break
            heights = heights + best
            z = z * np.exp(best)
        return z

    def _translate(self, z):
        """Subtract the translate 2 sigma(beta) minimizing prod |z_j|."""
        x = z.real
        coords = np.linalg.solve(self._translations.T, x)
        base = np.round(coords)
        best, best_value = z, float(np.prod(np.abs(z)))
        n = len(x)
        for offset in itertools.product((-1.0, 0.0, 1.0), repeat=n):
            shift = (base + np.array(offset)) @ self._translations
            trial = z - shift
            value = float(np.prod(np.abs(trial)))
            if value < best_value:
                best, best_value = trial, value
        return best

    def reduce(self, z):
        """(factor, w) with theta(z) = factor * theta(w) and w of larger height.

        Uses theta(z + 2 sigma(beta)) = theta(z), theta(sigma(u)^2 z) = theta(z)
        and theta(z) = prod (delta_j z_j/i)^(-1/2) theta(-1/z).
        """
        z = np.asarray(z, dtype=complex)
        delta = np.array(self.delta)
        factor = 1.0 + 0.0j
        for _ in range(500):
            z = self._translate(self._balance(z))
            if float(np.prod(np.abs(z))) >= 1.0 - 1e-12:
                break
            factor *= complex(np.prod(power_over_i(delta * z, -0.5)))
            z = -1.0 / z
        return factor, z

    def series(self, z):
        """Direct lattice sum with a Gaussian tail bound; returns (value, terms)."""
        z = np.asarray(z, dtype=complex)
        heights = np.array(self.delta) * z.imag * self.weights
        if np.any(heights <= 0):
            raise PreconditionError('point %r outside H_delta' % (z,))
        A = self._lattice
        gram = (A * heights) @ A.T
        smallest = float(np.linalg.eigvalsh(gram)[0])
        inverse = np.linalg.inv(gram)
        n = len(z)
        exponents = 1j * np.pi * z * self.c.embed()
        radius = self.radius
        while True:
            bounds = np.floor(np.sqrt(radius * np.diag(inverse))).astype(np.int64)
            size = int(np.prod(2 * bounds + 1))
            if size > self.config.theta_budget:
                raise ThetaBudgetError(
                    'theta truncation needs %d lattice points at %r' % (size, z)
                )
            axes = [np.arange(-b, b + 1) for b in bounds]
            grid = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, n)
            sigma = grid.astype(float) @ A
            quad = np.einsum('ij,j,ij->i', sigma, heights, sigma)
            keep = quad <= radius
            value = complex(np.sum(np.exp((sigma[keep] ** 2) @ exponents)))
            tail = math.exp(-math.pi * radius / 2.0) * (1.0 + math.sqrt(2.0 / smallest)) ** n
            if tail < TAIL_TARGET * max(abs(value), 1e-300):
                return value, int(np.count_nonzero(keep))
            radius *= 2.0

    def theta(self, z):
        factor, w = self.reduce(z)
        value, terms = self.series(w)
        log.debug('theta at %s: %d terms after reduction', z, terms)
        return factor * value


def theta(ctx, z):
    z = np.asarray(z, dtype=complex)
    if not ctx.in_domain(z, ctx.config.y_min - 1e-15):
        raise PreconditionError(
            'point %r is outside H_delta or below height %g' % (z, ctx.config.y_min)
        )
    return ctx.theta(z)


def j_theta_s(ctx, z):
    """Generator value j_theta(S, z) = prod (delta_j z_j/i)^(1/2)."""
    z = np.asarray(z, dtype=complex)
    return complex(np.prod(power_over_i(np.array(ctx.delta) * z, 0.5)))


def j_theta(ctx, gamma, z, theta_z=None):
    """The ratio theta(gamma z)/theta(z)."""
    z = np.asarray(z, dtype=complex)
    if not ctx.in_domain(z):
        raise PreconditionError('point %r outside H_delta' % (z,))
    if theta_z is None:
        theta_z = ctx.theta(z)
    if abs(theta_z) <= ctx.config.theta_min:
        raise ThetaZeroError('|theta(z)| = %.3g is too small at %r' % (abs(theta_z), z))
    return ctx.theta(gamma.act(z)) / theta_z
