# coding=utf-8
"""Exact arithmetic in totally real number fields.

Elements are stored as exact rational coordinates with respect to an
integral basis. Embeddings are ordered by ascending root value, except for
real quadratic fields where the first embedding sends sqrt(D) to the
positive root.
"""
import logging
import math
import threading
from fractions import Fraction

import mpmath
import numpy as np
import sympy

from .common import (
    InvalidInputError,
    SearchBudgetError,
    SqrlatError,
    default_config,
    working_precision,
)

log = logging.getLogger(__name__)

_X = sympy.Symbol('x')

# mpmath.iv precision is global state
_iv_lock = threading.Lock()


class NotFundamentalError(InvalidInputError):
    pass


class ReduciblePolynomialError(InvalidInputError):
    pass


class NotTotallyRealError(InvalidInputError):
    pass


class NonSquarefreeDiscriminantError(InvalidInputError):
    pass


class DegreeError(InvalidInputError):
    pass


class UnitSearchError(SearchBudgetError):
    pass


def to_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    raise TypeError('cannot convert %r to an exact rational' % (value,))


def to_rational(value):
    value = to_fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def parse_polynomial(text):
    """Parse "1,0,-4,-1" (highest degree first) into a list of ints."""
    try:
        coeffs = [int(c) for c in text.replace(' ', '').split(',') if c != '']
    except ValueError:
        raise InvalidInputError('malformed polynomial %r' % text)
    if len(coeffs) < 2:
        raise InvalidInputError('polynomial %r has degree < 1' % text)
    return coeffs


def _is_squarefree(value):
    value = abs(int(value))
    if value == 0:
        return False
    return all(e == 1 for e in sympy.factorint(value).values())


class NumberField(object):
    def __init__(self, coeffs, basis=None, descending=False, name=''):
        coeffs = [int(c) for c in coeffs]
        poly = sympy.Poly(coeffs, _X, domain='ZZ')
        if poly.degree() < 1:
            raise DegreeError('defining polynomial must have positive degree')
        if not poly.is_irreducible:
            raise ReduciblePolynomialError('%s is reducible over Q' % poly.as_expr())
        if poly.count_roots() != poly.degree():
            raise NotTotallyRealError('%s has non-real roots' % poly.as_expr())

        self.name = name or str(poly.as_expr())
        self.poly = poly
        self.coeffs = coeffs
        self.degree = n = poly.degree()
        if basis is None:
            basis = [[int(i == k) for k in range(n)] for i in range(n)]
        self.basis = [tuple(to_fraction(v) for v in row) for row in basis]
        self._basis_matrix = sympy.Matrix(
            [[to_rational(v) for v in row] for row in self.basis]
        )
        if self._basis_matrix.det() == 0:
            raise InvalidInputError('integral basis is singular')
        self._basis_inverse = [
            [to_fraction(v) for v in self._basis_matrix.inv().row(i)]
            for i in range(n)
        ]

        self._mul = self._structure_constants()
        one = self._from_power([Fraction(1)] + [Fraction(0)] * (n - 1))
        if not all(c.denominator == 1 for c in one):
            raise InvalidInputError('integral basis does not contain 1')
        self.one = FieldElement(self, one)
        self.zero = FieldElement(self, [0] * n)
        self.gen = FieldElement(self, self._from_power([0, 1] + [0] * (n - 2)))
        self._basis_traces = [
            sum(self._mul[i][j][j] for j in range(n)) for i in range(n)
        ]
        gram = [
            [to_rational((self.basis_element(i) * self.basis_element(j)).trace()) for j in range(n)]
            for i in range(n)
        ]
        self.trace_gram = sympy.Matrix(gram)
        self.discriminant = int(self.trace_gram.det())

        # root isolation; intervals come back in ascending order
        self._intervals = [iv for iv, _ in poly.intervals()]
        self._order = list(range(n))
        if descending:
            self._order.reverse()
        self._interval_lock = threading.Lock()
        self._roots_lock = threading.Lock()
        self._roots_cache = {}
        self.precision = working_precision()
        self.basis_embedding = np.array(
            [[float(v) for v in row] for row in self.embedding_matrix()]
        )

    def __repr__(self):
        return 'NumberField(%s, disc=%d)' % (self.name, self.discriminant)

    def __call__(self, value):
        if isinstance(value, FieldElement):
            return value
        return self.one * value

    # construction helpers
    def element(self, coords):
        return FieldElement(self, coords)

    def basis_element(self, i):
        return FieldElement(self, [int(i == k) for k in range(self.degree)])

    def from_power_basis(self, coeffs):
        """Element sum coeffs[k] alpha**k (lowest degree first)."""
        coeffs = list(coeffs) + [0] * (self.degree - len(coeffs))
        return FieldElement(self, self._from_power(coeffs))

    def _from_power(self, coeffs):
        n = self.degree
        coeffs = [to_fraction(c) for c in coeffs]
        return [
            sum((coeffs[k] * self._basis_inverse[k][i] for k in range(n)), Fraction(0))
            for i in range(n)
        ]

    def to_power_basis(self, coords):
        n = self.degree
        return [
            sum((coords[i] * self.basis[i][k] for i in range(n)), Fraction(0))
            for k in range(n)
        ]

    def _structure_constants(self):
        n = self.degree
        polys = [
            sympy.Poly(
                [to_rational(v) for v in reversed(row)], _X, domain='QQ'
            )
            for row in self.basis
        ]
        modulus = self.poly.set_domain('QQ')
        table = []
        for i in range(n):
            row = []
            for j in range(n):
                product = (polys[i] * polys[j]).rem(modulus)
                power = [Fraction(0)] * n
                for (k,), c in product.terms():
                    power[k] = to_fraction(c)
                row.append(self._from_power(power))
            table.append(row)
        return table

    # embeddings
    def roots(self, dps=None):
        """Real roots in embedding order, as mpmath numbers at ``dps`` digits."""
        dps = dps or working_precision()
        with self._roots_lock:
            if dps not in self._roots_cache:
                with mpmath.workdps(dps):
                    found = mpmath.polyroots(
                        self.coeffs, maxsteps=200, extraprec=4 * dps
                    )
                    if not isinstance(found, list):
                        found = [found]
                    found = sorted(mpmath.re(r) for r in found)
                self._roots_cache[dps] = [found[k] for k in self._order]
            return list(self._roots_cache[dps])

    def embedding_matrix(self, dps=None):
        """Entry [i][j] is sigma_j of the i-th basis element."""
        dps = dps or working_precision()
        roots = self.roots(dps)
        n = self.degree
        with mpmath.workdps(dps):
            return [
                [
                    sum(
                        mpmath.mpf(self.basis[i][k].numerator)
                        / self.basis[i][k].denominator
                        * roots[j] ** k
                        for k in range(n)
                    )
                    for j in range(n)
                ]
                for i in range(n)
            ]

    def covolume(self, dps=None):
        dps = dps or working_precision()
        with mpmath.workdps(dps):
            return abs(mpmath.det(mpmath.matrix(self.embedding_matrix(dps))))

    def root_interval(self, j):
        with self._interval_lock:
            return self._intervals[self._order[j]]

    def _refine_root_interval(self, j):
        with self._interval_lock:
            r = self._order[j]
            s, t = self._intervals[r]
            s, t = self.poly.refine_root(s, t, eps=(t - s) / 2 ** 16)
            self._intervals[r] = (s, t)
            return s, t

    # sign certification
    def signs(self, x):
        n = self.degree
        if x.is_zero():
            return (0,) * n
        coords = np.array([float(c) for c in x.coords])
        values = coords @ self.basis_embedding
        scale = np.abs(coords) @ np.abs(self.basis_embedding)
        power = None
        out = []
        for j in range(n):
            if abs(values[j]) > 1e-9 * scale[j]:
                out.append(1 if values[j] > 0 else -1)
                continue
            if power is None:
                power = self.to_power_basis(x.coords)
            out.append(self._certified_sign(power, j))
        return tuple(out)

    def _certified_sign(self, power, j):
        # x != 0 so sigma_j(x) != 0; interval evaluation terminates
        iv = mpmath.iv
        s, t = self.root_interval(j)
        prec = 64
        for _ in range(400):
            with _iv_lock:
                saved = iv.prec
                iv.prec = prec
                try:
                    lo = iv.mpf(int(s.p)) / int(s.q)
                    hi = iv.mpf(int(t.p)) / int(t.q)
                    enclosure = lo + (hi - lo) * iv.mpf([0, 1])
                    acc = iv.mpf(0)
                    for c in reversed(power):
                        acc = acc * enclosure + iv.mpf(c.numerator) / c.denominator
                    certain = 0 not in acc
                    positive = acc.mid > 0
                finally:
                    iv.prec = saved
            if certain:
                return 1 if positive else -1
            s, t = self._refine_root_interval(j)
            prec += 32
        raise SqrlatError('sign certification did not terminate')


class FieldElement(object):
    __slots__ = ('field', 'coords')

    def __init__(self, field, coords):
        if len(coords) != field.degree:
            raise InvalidInputError(
                'expected %d coordinates, got %d' % (field.degree, len(coords))
            )
        self.field = field
        self.coords = tuple(to_fraction(c) for c in coords)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise TypeError('elements of different fields')
            return other
        if isinstance(other, (int, Fraction, np.integer, sympy.Rational)):
            return self.field.one * to_fraction(other)
        return NotImplemented

    def __repr__(self):
        return 'FieldElement(%s)' % ', '.join(str(c) for c in self.coords)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.coords == other.coords

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.coords)

    def __neg__(self):
        return FieldElement(self.field, [-c for c in self.coords])

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, [a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, np.integer, sympy.Rational)):
            scalar = to_fraction(other)
            return FieldElement(self.field, [c * scalar for c in self.coords])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = self.field.degree
        table = self.field._mul
        out = [Fraction(0)] * n
        for i, a in enumerate(self.coords):
            if not a:
                continue
            for j, b in enumerate(other.coords):
                if not b:
                    continue
                ab = a * b
                for k, m in enumerate(table[i][j]):
                    if m:
                        out[k] += ab * m
        return FieldElement(self.field, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, np.integer, sympy.Rational)):
            scalar = to_fraction(other)
            if not scalar:
                raise ZeroDivisionError('division of field element by zero')
            return FieldElement(self.field, [c / scalar for c in self.coords])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, exponent):
        exponent = int(exponent)
        base = self
        if exponent < 0:
            base = self.inverse()
            exponent = -exponent
        result = self.field.one
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def is_zero(self):
        return not any(self.coords)

    def is_integral(self):
        return all(c.denominator == 1 for c in self.coords)

    def multiplication_matrix(self):
        """Rows are the coordinates of self times each basis element."""
        n = self.field.degree
        table = self.field._mul
        rows = []
        for i in range(n):
            row = [Fraction(0)] * n
            for j, a in enumerate(self.coords):
                if a:
                    for k, m in enumerate(table[j][i]):
                        row[k] += a * m
            rows.append(row)
        return rows

    def trace(self):
        return sum(
            (c * t for c, t in zip(self.coords, self.field._basis_traces)), Fraction(0)
        )

    def norm(self):
        matrix = sympy.Matrix(
            [[to_rational(v) for v in row] for row in self.multiplication_matrix()]
        )
        return to_fraction(matrix.det(method='bareiss'))

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError('zero has no inverse')
        matrix = sympy.Matrix(
            [[to_rational(v) for v in row] for row in self.multiplication_matrix()]
        )
        one = sympy.Matrix([[to_rational(v) for v in self.field.one.coords]])
        coords = one * matrix.inv()
        return FieldElement(self.field, [to_fraction(v) for v in coords])

    def embed(self):
        coords = np.array([float(c) for c in self.coords])
        return coords @ self.field.basis_embedding

    def embed_mp(self, dps=None):
        dps = dps or working_precision()
        matrix = self.field.embedding_matrix(dps)
        n = self.field.degree
        with mpmath.workdps(dps):
            return [
                sum(
                    mpmath.mpf(c.numerator) / c.denominator * matrix[i][j]
                    for i, c in enumerate(self.coords)
                )
                for j in range(n)
            ]

    def signs(self):
        return self.field.signs(self)


def trace_norm(x):
    return x.trace(), x.norm()


def invert(x):
    return x.inverse()


def is_totally_positive(x):
    return all(s > 0 for s in x.signs())


def is_totally_nonnegative(x):
    return x.is_zero() or is_totally_positive(x)


def is_fundamental_discriminant(D):
    D = int(D)
    if D <= 1:
        return False
    if D % 4 == 1:
        return _is_squarefree(D)
    if D % 4 == 0:
        d = D // 4
        return d % 4 in (2, 3) and _is_squarefree(d)
    return False


def make_quadratic_field(D):
    """Q(sqrt(D)) with integral basis {1, omega}, omega = (D + sqrt(D))/2."""
    if not is_fundamental_discriminant(D):
        raise NotFundamentalError('%r is not a positive fundamental discriminant' % (D,))
    D = int(D)
    return NumberField([1, -D, (D * D - D) // 4], descending=True, name='Q(sqrt(%d))' % D)


def make_monogenic_field(coeffs):
    coeffs = [int(c) for c in coeffs]
    if coeffs[0] != 1:
        raise InvalidInputError('polynomial must be monic')
    if len(coeffs) < 3:
        raise DegreeError('monogenic fields need degree >= 2')
    poly = sympy.Poly(coeffs, _X, domain='ZZ')
    if not poly.is_irreducible:
        raise ReduciblePolynomialError('%s is reducible over Q' % poly.as_expr())
    if poly.count_roots() != poly.degree():
        raise NotTotallyRealError('%s has non-real roots' % poly.as_expr())
    disc = int(sympy.discriminant(poly.as_expr(), _X))
    if not _is_squarefree(disc):
        raise NonSquarefreeDiscriminantError(
            'discriminant %d of %s is not squarefree' % (disc, poly.as_expr())
        )
    return NumberField(coeffs)


def quadratic_data(field):
    """(s, t, D) with the second basis element a root of x^2 - s x + t."""
    if field.degree != 2:
        raise DegreeError('field %s is not quadratic' % field.name)
    if field.one.coords != (1, 0):
        raise InvalidInputError('quadratic basis must start with 1')
    w = field.basis_element(1)
    s, t = w.trace(), w.norm()
    return int(s), int(t), int(s * s - 4 * t)


def sqrt_disc(field):
    """The element sqrt(D) of a quadratic field, positive in the first embedding."""
    s, _, _ = quadratic_data(field)
    root = field.basis_element(1) * 2 - s
    if root.signs()[0] < 0:
        root = -root
    return root


def fundamental_unit(field, max_steps=100000):
    s, t, D = quadratic_data(field)
    r = math.isqrt(D)
    # continued fraction of theta = (P + sqrt(D))/Q, the larger root
    P, Q = s, 2
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    for _ in range(max_steps):
        if Q > 0:
            a = (P + r) // Q
        else:
            a = (P + r + 1) // Q
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        if abs(h * h - s * h * k + t * k * k) == 1:
            break
        P = a * Q - P
        Q = (D - P * P) // Q
    else:
        raise UnitSearchError('no unit found in %d continued fraction steps' % max_steps)

    w = field.basis_element(1)
    u = field.one * h - w * k
    for candidate in (u, -u, u.inverse(), -u.inverse()):
        if (candidate - 1).signs()[0] > 0:
            log.debug('fundamental unit of %s: %r', field.name, candidate)
            return candidate
    raise SqrlatError('unit normalization failed')


def is_congruent_one(u, modulus):
    return ((u - 1) / modulus).is_integral()


def small_units(field, box):
    n = field.degree
    axis = np.arange(-box, box + 1)
    grid = np.stack(np.meshgrid(*([axis] * n), indexing='ij'), axis=-1).reshape(-1, n)
    norms = np.prod(grid.astype(float) @ field.basis_embedding, axis=1)
    candidates = grid[np.abs(np.abs(norms) - 1.0) < 1e-6]
    units = []
    for coords in candidates:
        u = field.element([int(c) for c in coords])
        if u == 1 or u == -1:
            continue
        if abs(u.norm()) == 1:
            units.append(u)
    units.sort(key=lambda v: (float(np.max(np.abs(np.log(np.abs(v.embed()))))), v.coords))
    return units


def search_units(field, modulus, require_totally_positive=False, power_budget=None, box=None):
    """A unit u != 1 with u = 1 mod modulus*O_K (totally positive if requested)."""
    if field.degree < 2:
        raise DegreeError('unit search needs degree >= 2')
    power_budget = power_budget or default_config.unit_power_budget
    if field.degree == 2:
        bases = [fundamental_unit(field)]
    else:
        box = box or (default_config.unit_box if field.degree == 3 else 8)
        bases = small_units(field, box)
        if not bases:
            raise UnitSearchError('no units in coordinate box %d' % box)
    for k in range(1, power_budget + 1):
        for base in bases:
            u = base ** k
            if not is_congruent_one(u, modulus):
                continue
            if require_totally_positive and not is_totally_positive(u):
                continue
            log.info('unit search mod %r: exponent %d', modulus, k)
            return u
    raise UnitSearchError(
        'no unit = 1 mod %r within %d powers' % (modulus, power_budget)
    )
