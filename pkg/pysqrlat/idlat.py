# coding=utf-8
"""Fractional ideals as embedded lattices and their square-root point sets."""
import csv
import itertools
import logging
import math
from fractions import Fraction

import numpy as np
import sympy
from sympy.matrices.normalforms import hermite_normal_form
from sympy.core.intfunc import igcdex

from .common import InvalidInputError, PreconditionError, parallel_map
from .numfield import FieldElement, is_totally_nonnegative, to_fraction, to_rational

log = logging.getLogger(__name__)


def _lcm(values):
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


class FractionalIdeal(object):
    """Z-lattice in K given by generators; stored as a canonical HNF basis.

    Rows of ``basis`` are integral-basis coordinates of a Z-basis.
    """

    def __init__(self, field, generators):
        self.field = field
        n = field.degree
        rows = []
        for g in generators:
            coords = g.coords if isinstance(g, FieldElement) else g
            rows.append([to_fraction(c) for c in coords])
        if not rows:
            raise InvalidInputError('an ideal needs at least one generator')
        denominator = _lcm(c.denominator for row in rows for c in row)
        scaled = sympy.Matrix([[int(c * denominator) for c in row] for row in rows])
        if scaled.rank() < n:
            raise InvalidInputError('generators do not span a full-rank lattice')
        hnf = hermite_normal_form(scaled.T).T
        self.basis = tuple(
            tuple(Fraction(int(hnf[i, j]), denominator) for j in range(n))
            for i in range(hnf.rows)
        )
        self._matrix = sympy.Matrix([[to_rational(c) for c in row] for row in self.basis])
        self._inverse = self._matrix.inv()
        self.norm = abs(to_fraction(self._matrix.det()))

    def __repr__(self):
        return 'FractionalIdeal(%s, norm=%s)' % (
            [[str(c) for c in row] for row in self.basis],
            self.norm,
        )

    def __eq__(self, other):
        return (
            isinstance(other, FractionalIdeal)
            and other.field is self.field
            and other.basis == self.basis
        )

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.basis)

    @property
    def elements(self):
        return [FieldElement(self.field, row) for row in self.basis]

    @property
    def matrix(self):
        return self._matrix

    def coefficients(self, x):
        """Coordinates of x with respect to the ideal basis."""
        row = sympy.Matrix([[to_rational(c) for c in x.coords]]) * self._inverse
        return [to_fraction(v) for v in row]

    def embedded_basis(self):
        """Float matrix whose i-th row is sigma of the i-th basis element."""
        b = np.array([[float(c) for c in row] for row in self.basis])
        return b @ self.field.basis_embedding

    def covolume(self):
        return float(self.norm) * float(self.field.covolume())

    def traces(self):
        return [e.trace() for e in self.elements]

    def is_module(self):
        for b in range(self.field.degree):
            unit = self.field.basis_element(b)
            for e in self.elements:
                if not membership(self, unit * e):
                    return False
        return True

    def scaled(self, x):
        return FractionalIdeal(self.field, [x * e for e in self.elements])


def ring_of_integers(field):
    return FractionalIdeal(field, [field.basis_element(i) for i in range(field.degree)])


def principal_ideal(x):
    field = x.field
    if x.is_zero():
        raise InvalidInputError('the zero ideal is not a fractional ideal')
    return FractionalIdeal(field, [x * field.basis_element(i) for i in range(field.degree)])


def ideal_product(a, b):
    return FractionalIdeal(a.field, [x * y for x in a.elements for y in b.elements])


def dual_ideal(a):
    """Dual lattice with respect to the trace pairing."""
    gram = a.field.trace_gram
    dual = (a.matrix * gram).T.inv()
    rows = [[to_fraction(dual[i, j]) for j in range(dual.cols)] for i in range(dual.rows)]
    return FractionalIdeal(a.field, rows)


def inverse_different(field):
    return dual_ideal(ring_of_integers(field))


def membership(a, x):
    return all(c.denominator == 1 for c in a.coefficients(x))


def trace_one_element(a):
    field = a.field
    if a == inverse_different(field):
        # dual-basis partner of 1
        partner = field.trace_gram.inv() * sympy.Matrix(
            [to_rational(c) for c in field.one.coords]
        )
        partner = FieldElement(field, [to_fraction(v) for v in partner])
        if partner.trace() == 1:
            return partner
    coeffs, g = _integer_combination(_integer_traces(a))
    if g != 1:
        raise PreconditionError('trace of %r has image %dZ, not Z' % (a, g))
    return _combine(a, coeffs)


def _integer_traces(a):
    traces = a.traces()
    if not all(t.denominator == 1 for t in traces):
        raise PreconditionError('ideal has non-integral traces')
    return [int(t) for t in traces]


def _integer_combination(values):
    """Coefficients c with sum c_i v_i = g = gcd(values), g >= 0."""
    coeffs = [0] * len(values)
    g = 0
    for i, v in enumerate(values):
        x, y, h = igcdex(g, v)
        coeffs = [int(x) * c for c in coeffs]
        coeffs[i] = int(y)
        g = int(h)
    if g < 0:
        coeffs = [-c for c in coeffs]
        g = -g
    return coeffs, g


def _combine(a, coeffs):
    field = a.field
    out = field.zero
    for c, e in zip(coeffs, a.elements):
        if c:
            out = out + e * int(c)
    return out


def _trace_kernel(traces):
    """Unimodular column reduction of the trace vector.

    Returns (v0, kernel) with traces . v0 = gcd and kernel spanning the
    integer solutions of traces . w = 0.
    """
    n = len(traces)
    vecs = [[int(i == j) for j in range(n)] for i in range(n)]
    vals = list(traces)
    while sum(1 for v in vals if v) > 1:
        p = min((i for i in range(n) if vals[i]), key=lambda i: abs(vals[i]))
        for q in range(n):
            if q != p and vals[q]:
                m = vals[q] // vals[p]
                vals[q] -= m * vals[p]
                vecs[q] = [a - m * b for a, b in zip(vecs[q], vecs[p])]
    p = next(i for i in range(n) if vals[i])
    if vals[p] < 0:
        vals[p] = -vals[p]
        vecs[p] = [-a for a in vecs[p]]
    kernel = [vecs[i] for i in range(n) if i != p]
    return vecs[p], vals[p], kernel


def _elements_from_coefficients(a, coefficient_rows):
    denominator = _lcm(c.denominator for row in a.basis for c in row)
    scaled = np.array(
        [[int(c * denominator) for c in row] for row in a.basis], dtype=object
    )
    out = []
    for k in coefficient_rows:
        coords = np.dot(np.array([int(v) for v in k], dtype=object), scaled)
        out.append(
            FieldElement(a.field, [Fraction(int(v), denominator) for v in coords])
        )
    return out


def _box_grid(lower, upper):
    axes = [np.arange(lo, hi + 1) for lo, hi in zip(lower, upper)]
    if not axes:
        return np.zeros((1, 0), dtype=np.int64)
    mesh = np.meshgrid(*axes, indexing='ij')
    return np.stack(mesh, axis=-1).reshape(-1, len(axes))


def enumerate_trace_slice(a, m):
    """Totally nonnegative elements of a with trace m, sorted by coordinates."""
    field = a.field
    m = int(m)
    if m < 0:
        return []
    if m == 0:
        return [field.zero]
    n = field.degree
    v0, g, kernel = _trace_kernel(_integer_traces(a))
    if m % g:
        return []
    base = [c * (m // g) for c in v0]
    A = a.embedded_basis()
    p0 = np.array(base, dtype=float) @ A
    if n == 1:
        candidates = [base]
    else:
        W = np.array(kernel, dtype=float) @ A
        vertices = []
        for j in range(n):
            target = -p0.copy()
            target[j] += m
            s, _, _, _ = np.linalg.lstsq(W.T, target, rcond=None)
            vertices.append(s)
        vertices = np.array(vertices)
        lower = np.floor(vertices.min(axis=0)).astype(np.int64) - 1
        upper = np.ceil(vertices.max(axis=0)).astype(np.int64) + 1
        grid = _box_grid(lower, upper)
        sig = p0 + grid.astype(float) @ W
        keep = np.all(sig >= -1e-9 * max(1.0, m), axis=1)
        grid = grid[keep]
        kernel_arr = np.array(kernel, dtype=np.int64)
        candidates = np.array(base, dtype=np.int64) + grid @ kernel_arr
    found = [
        x
        for x in _elements_from_coefficients(a, candidates)
        if is_totally_nonnegative(x)
    ]
    found.sort(key=lambda x: x.coords)
    return found


class PointSet(object):
    """Points of a square-root set grouped by level.

    ``levels[key]`` is an array of points; ``witnesses[key]`` lists the
    exact element behind each point, in the same order.
    """

    def __init__(self, kind, field, metadata=None):
        self.kind = kind
        self.field = field
        self.levels = {}
        self.witnesses = {}
        self.metadata = dict(metadata or {})

    def add_level(self, key, points, witnesses):
        self.levels[key] = np.array(points, dtype=float).reshape(-1, self.field.degree)
        self.witnesses[key] = list(witnesses)

    def __len__(self):
        return sum(len(p) for p in self.levels.values())

    def count(self, key):
        return len(self.levels.get(key, ()))

    def all_points(self):
        if not self.levels:
            return np.zeros((0, self.field.degree))
        return np.concatenate([self.levels[k] for k in sorted(self.levels)])

    def level(self, key):
        """sum_j x_j^2 of the points stored under key."""
        scale = self.metadata.get('level_scale')
        if self.kind == 'ellipsoid' and scale is not None:
            return scale * float(key)
        return key

    def rows(self):
        for key in sorted(self.levels):
            for point in self.levels[key]:
                yield key, point


def _sign_expand(values):
    """All sign choices over the nonzero coordinates of a nonnegative vector."""
    roots = np.sqrt(np.maximum(values, 0.0))
    nonzero = [j for j, v in enumerate(values) if v != 0.0]
    out = []
    for signs in itertools.product((1.0, -1.0), repeat=len(nonzero)):
        point = roots.copy()
        for j, s in zip(nonzero, signs):
            point[j] *= s
        out.append(point)
    return out


def _expand(elements, weights=None):
    points, witnesses = [], []
    for x in elements:
        if x.is_zero():
            values = np.zeros(x.field.degree)
        else:
            values = x.embed()
            if weights is not None:
                values = values * weights
        for p in _sign_expand(values):
            points.append(p)
            witnesses.append(x)
    return points, witnesses


def sqrt_points(a, m_max, threads=1, levels=None):
    """Sign-expanded square roots of totally nonnegative elements, by trace."""
    levels = list(range(int(m_max) + 1)) if levels is None else list(levels)
    slices = parallel_map(lambda m: enumerate_trace_slice(a, m), levels, threads)
    out = PointSet('sphere', a.field, {'ideal': a, 'm_max': m_max})
    for m, elements in zip(levels, slices):
        points, witnesses = _expand(elements)
        out.add_level(m, points, witnesses)
    return out


def check_hecke_square(c, a):
    """True iff c * a^2 equals the inverse different."""
    target = inverse_different(c.field)
    return ideal_product(a, a).scaled(c) == target


def _rational_square(c):
    square = c * c
    rational = c.field.one * (square.trace() / c.field.degree)
    if square == rational:
        return square.trace() / c.field.degree
    return None


def ellipsoid_points(c, a, level_max, threads=1):
    """Points x with x_j^2 = |sigma_j(c)| sigma_j(alpha), alpha in a^2, by level."""
    if not check_hecke_square(c, a):
        raise PreconditionError('c * a^2 is not the inverse different')
    field = c.field
    n = field.degree
    a2 = ideal_product(a, a)
    weights = np.abs(c.embed())
    level_max = float(level_max)
    A = a2.embedded_basis()
    A_inv = np.linalg.inv(A)
    vertices = [np.zeros(n)] + [level_max / weights[j] * np.eye(n)[j] @ A_inv for j in range(n)]
    vertices = np.array(vertices)
    lower = np.floor(vertices.min(axis=0)).astype(np.int64) - 1
    upper = np.ceil(vertices.max(axis=0)).astype(np.int64) + 1
    grid = _box_grid(lower, upper)
    sig = grid.astype(float) @ A
    tol = 1e-9 * max(1.0, level_max)
    keep = np.all(sig >= -tol, axis=1) & (sig @ weights <= level_max + tol)
    elements = [
        x
        for x in _elements_from_coefficients(a2, grid[keep])
        if is_totally_nonnegative(x)
    ]

    square = _rational_square(c)
    scale = math.sqrt(abs(float(square))) if square is not None else None
    grouped = {}
    for x in elements:
        if scale is not None:
            key = x.trace()
            if scale * float(key) > level_max + tol:
                continue
        else:
            level = float(x.embed() @ weights)
            if level > level_max + tol:
                continue
            key = round(level, 12)
        grouped.setdefault(key, []).append(x)

    out = PointSet(
        'ellipsoid',
        field,
        {'c': c, 'ideal': a, 'level_max': level_max, 'level_scale': scale},
    )
    keys = sorted(grouped)
    expanded = parallel_map(lambda k: _expand(sorted(grouped[k], key=lambda e: e.coords), weights), keys, threads)
    for key, (points, witnesses) in zip(keys, expanded):
        out.add_level(key, points, witnesses)
    return out


def asymptotic_count(a, m):
    """Leading term 2^n m^(n-1) / ((n-1)! Nr(a) sqrt|disc|)."""
    field = a.field
    n = field.degree
    disc = abs(field.discriminant)
    return (
        2 ** n * float(m) ** (n - 1) / (math.factorial(n - 1) * float(a.norm) * math.sqrt(disc))
    )


def count_vs_asymptotic(a, m_max, levels=None, threads=1):
    """Rows (m, count, asymptotic, ratio); ratio is None where the term vanishes."""
    points = sqrt_points(a, m_max, threads=threads, levels=levels)
    table = []
    for m in sorted(points.levels):
        count = points.count(m)
        lead = asymptotic_count(a, m)
        ratio = count / lead if lead > 0 else None
        table.append((m, count, lead, ratio))
    return table


def write_points_csv(points, path_or_file):
    n = points.field.degree
    header = ['m'] + ['x%d' % (j + 1) for j in range(n)]

    def _write(handle):
        writer = csv.writer(handle)
        writer.writerow(header)
        for key, point in points.rows():
            m = points.level(key)
            m = str(m) if points.kind == 'sphere' else '%.17g' % m
            writer.writerow([m] + ['%.17g' % v for v in point])

    if hasattr(path_or_file, 'write'):
        _write(path_or_file)
    else:
        with open(path_or_file, 'w', newline='') as handle:
            _write(handle)
