# coding=utf-8
"""2x2 matrices over O_K acting on products of half-planes."""
import logging

import numpy as np

from ..common import InvalidInputError, VerificationError
from ..numfield import FieldElement, search_units

log = logging.getLogger(__name__)


class KeyEquationError(InvalidInputError):
    pass


class Mat2K(object):
    """(a b; c d) with entries in K and determinant one.

    Equality is projective: a matrix and its negative compare equal.
    """

    __slots__ = ('field', 'a', 'b', 'c', 'd')

    def __init__(self, field, entries, check=True):
        self.field = field
        self.a, self.b, self.c, self.d = (field(v) for v in entries)
        if check and self.det() != 1:
            raise InvalidInputError('determinant of %r is not 1' % (self,))

    def __repr__(self):
        return 'Mat2K(%s, %s; %s, %s)' % (self.a, self.b, self.c, self.d)

    @property
    def entries(self):
        return self.a, self.b, self.c, self.d

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def __mul__(self, other):
        return Mat2K(
            self.field,
            (
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            ),
            check=False,
        )

    def __neg__(self):
        return Mat2K(self.field, [-e for e in self.entries], check=False)

    def inverse(self):
        return Mat2K(self.field, (self.d, -self.b, -self.c, self.a), check=False)

    def __pow__(self, exponent):
        base = self if exponent >= 0 else self.inverse()
        result = identity(self.field)
        for _ in range(abs(int(exponent))):
            result = result * base
        return result

    def normalized(self):
        """Representative of {g, -g} whose first nonzero coordinate is positive."""
        for e in self.entries:
            for v in e.coords:
                if v:
                    return self if v > 0 else -self
        return self

    def same_as(self, other):
        """Exact equality as matrices, without the sign identification."""
        return self.entries == other.entries

    def __eq__(self, other):
        if not isinstance(other, Mat2K):
            return NotImplemented
        return self.normalized().entries == other.normalized().entries

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.normalized().entries)

    def is_integral(self):
        return all(e.is_integral() for e in self.entries)

    def embed(self):
        """Array of shape (n, 2, 2); entry j is the real matrix under sigma_j."""
        a, b, c, d = (e.embed() for e in self.entries)
        return np.stack([np.stack([a, b], axis=-1), np.stack([c, d], axis=-1)], axis=-2)

    def act(self, z):
        """Moebius action coordinate-wise on z in a product of half-planes."""
        z = np.asarray(z, dtype=complex)
        a, b, c, d = (e.embed() for e in self.entries)
        return (a * z + b) / (c * z + d)

    def automorphy(self, z):
        """The vector (sigma_j(c) z_j + sigma_j(d))_j."""
        z = np.asarray(z, dtype=complex)
        return self.c.embed() * z + self.d.embed()


def identity(field):
    return Mat2K(field, (1, 0, 0, 1))


def S(field):
    return Mat2K(field, (0, -1, 1, 0))


def T(beta):
    return Mat2K(beta.field, (1, beta, 0, 1))


def V(beta):
    """Lower unipotent matrix (1 0; beta 1)."""
    return Mat2K(beta.field, (1, 0, beta, 1))


def M(unit):
    if abs(unit.norm()) != 1 or not unit.is_integral():
        raise InvalidInputError('%r is not a unit' % (unit,))
    return Mat2K(unit.field, (unit, 0, 0, unit.inverse()))


def check_key_equation(a, b, x, y):
    """Raise KeyEquationError unless (1+4a)(1+4x) = 1 = (1-3b)(1-3y), axby != 0."""
    for name, e in zip('abxy', (a, b, x, y)):
        if not isinstance(e, FieldElement):
            raise KeyEquationError('%s must be a field element' % name)
        if not e.is_integral():
            raise KeyEquationError('%s = %r is not in O_K' % (name, e))
        if e.is_zero():
            raise KeyEquationError('%s must be nonzero' % name)
    if (1 + 4 * a) * (1 + 4 * x) != 1:
        raise KeyEquationError('(1+4a)(1+4x) != 1')
    if (1 - 3 * b) * (1 - 3 * y) != 1:
        raise KeyEquationError('(1-3b)(1-3y) != 1')


def bottom_rows(a, b, x, y):
    """(c_r, d_r) for r = 0..7; gamma_r has rows r-1 and r."""
    u = 1 + 4 * a
    w = 1 + 4 * x
    return [
        (0, 1),
        (-1, 2 * a),
        (2, -u),
        ((1 - 4 * b) / u, 2 * b),
        (2 * y, (1 - 4 * y) / w),
        (-w, 2),
        (2 * x, -1),
        (1, 0),
    ]


def gamma_matrices(a, b, x, y):
    """The eight matrices gamma_0..gamma_7 and the translations beta_r.

    S gamma_r = T^(2 beta_r) gamma_(r-1) holds exactly for every r.
    """
    check_key_equation(a, b, x, y)
    field = a.field
    rows = [tuple(field(v) for v in row) for row in bottom_rows(a, b, x, y)]
    matrices = []
    for r in range(8):
        upper, lower = rows[r - 1], rows[r]
        gamma = Mat2K(field, upper + lower, check=False)
        if gamma.det() != 1:
            raise VerificationError('det gamma_%d = %r' % (r, gamma.det()))
        if not gamma.is_integral():
            raise VerificationError('gamma_%d has non-integral entries' % r)
        matrices.append(gamma)

    betas = []
    s = S(field)
    for r in range(8):
        c_prev, d_prev = rows[r - 1]
        c_r, d_r = rows[r]
        c_back, d_back = rows[r - 2]
        if not c_prev.is_zero():
            beta = -(c_r + c_back) / (2 * c_prev)
        else:
            beta = -(d_r + d_back) / (2 * d_prev)
        if not beta.is_integral():
            raise VerificationError('beta_%d = %r is not integral' % (r, beta))
        if not (s * matrices[r]).same_as(T(2 * beta) * matrices[r - 1]):
            raise VerificationError('S gamma_%d != T^(2 beta) gamma_%d' % (r, r - 1))
        betas.append(beta)
    log.debug('gamma matrices certified for %s', field.name)
    return matrices, betas


def unit_data(field, power_budget=None):
    """(a, b, x, y) from totally positive units u = 1 mod 4 and v = 1 mod 3."""
    u = search_units(field, 4, require_totally_positive=True, power_budget=power_budget)
    v = search_units(field, 3, require_totally_positive=True, power_budget=power_budget)
    a = (u - 1) / 4
    x = (u.inverse() - 1) / 4
    b = (1 - v) / 3
    y = (1 - v.inverse()) / 3
    check_key_equation(a, b, x, y)
    log.info('unit data for %s: u=%r v=%r', field.name, u, v)
    return a, b, x, y
