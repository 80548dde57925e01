# coding=utf-8
"""Groups generated by upper and lower unipotent matrices with lattice exponents.

For lattices L1, L2 in R^n the group Gamma(L1, L2) is generated by
T^x = (1 x; 0 1), x in L1, and V^y = (1 0; y 1), y in L2, acting in each
of the n coordinates. Ideal lattices are handled exactly over K, numeric
lattices in floating point.
"""
import itertools
import logging

import numpy as np

from .common import PreconditionError, VerificationError, parallel_map
from .hilbert.matrices import T, V, identity
from .idlat import FractionalIdeal

log = logging.getLogger(__name__)

AXIS_TOLERANCE = 1e-12
NUMERIC_TOLERANCE = 1e-12


class MinkowskiError(VerificationError):
    pass


class Lattice(object):
    """A full-rank lattice in R^n, either an embedded ideal or a numeric basis."""

    def __init__(self, basis, elements=None, field=None):
        self.basis = np.array(basis, dtype=float)
        if self.basis.ndim != 2 or self.basis.shape[0] != self.basis.shape[1]:
            raise PreconditionError('lattice basis must be a square matrix')
        if abs(np.linalg.det(self.basis)) < 1e-300:
            raise PreconditionError('lattice basis is singular')
        self.n = self.basis.shape[0]
        self.elements = elements
        self.field = field
        self._inverse = np.linalg.inv(self.basis)

    @classmethod
    def from_ideal(cls, ideal, scale=1):
        if not isinstance(ideal, FractionalIdeal):
            raise PreconditionError('expected a fractional ideal')
        elements = [e * scale for e in ideal.elements]
        basis = np.array([e.embed() for e in elements])
        return cls(basis, elements, ideal.field)

    @classmethod
    def from_basis(cls, basis):
        return cls(basis)

    @property
    def exact(self):
        return self.elements is not None

    def __repr__(self):
        kind = 'ideal' if self.exact else 'numeric'
        return 'Lattice(%s, n=%d)' % (kind, self.n)

    def covolume(self):
        return float(abs(np.linalg.det(self.basis)))

    def vector(self, coefficients):
        """Lattice vector with the given integer coefficients."""
        coefficients = [int(c) for c in coefficients]
        if self.exact:
            out = self.field.zero
            for c, e in zip(coefficients, self.elements):
                if c:
                    out = out + e * c
            return out
        return np.array(coefficients, dtype=float) @ self.basis

    def embed(self, vector):
        if self.exact:
            return vector.embed()
        return np.asarray(vector, dtype=float)

    def coefficients(self, point):
        return np.asarray(point, dtype=float) @ self._inverse

    def contains(self, point, tol=1e-9):
        k = self.coefficients(point)
        return bool(np.all(np.abs(k - np.round(k)) <= tol))

    def box_vectors(self, radius):
        """Nonzero vectors with coefficients in [-radius, radius], in lexicographic order."""
        out = []
        for k in itertools.product(range(-radius, radius + 1), repeat=self.n):
            if any(k):
                out.append(self.vector(k))
        return out


def has_property_I(lattice, radius=10):
    """(holds, certificate): whether no nonzero vector has a zero coordinate.

    Exact for ideal lattices (every nonzero element has nonzero embeddings);
    for numeric lattices the certificate is an axis vector or the searched radius.
    """
    if lattice.exact:
        return True, None
    for k in itertools.product(range(-radius, radius + 1), repeat=lattice.n):
        if not any(k):
            continue
        v = np.array(k, dtype=float) @ lattice.basis
        scale = max(1.0, float(np.max(np.abs(v))))
        if np.min(np.abs(v)) <= AXIS_TOLERANCE * scale:
            return False, v
    return True, radius


class LatticePair(object):
    def __init__(self, L1, L2):
        if L1.n != L2.n:
            raise PreconditionError('lattices live in different dimensions')
        self.L1 = L1
        self.L2 = L2
        self.n = L1.n
        self._property = {}

    def has_property_I(self, which, radius=10):
        if which not in self._property:
            lattice = self.L1 if which == 1 else self.L2
            self._property[which] = has_property_I(lattice, radius)
        return self._property[which]

    @property
    def exact(self):
        return self.L1.exact and self.L2.exact


def upper(x):
    """Numeric T^x as an array of shape (n, 2, 2)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((len(x), 2, 2))
    out[:, 0, 0] = out[:, 1, 1] = 1.0
    out[:, 0, 1] = x
    return out


def lower(y):
    y = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.zeros((len(y), 2, 2))
    out[:, 0, 0] = out[:, 1, 1] = 1.0
    out[:, 1, 0] = y
    return out


def distance_from_identity(g):
    """max over coordinates of min ||g_j -+ 1||_F, for arrays of shape (n, 2, 2)."""
    g = np.asarray(g, dtype=float)
    eye = np.eye(2)
    plus = np.sqrt(np.sum((g - eye) ** 2, axis=(1, 2)))
    minus = np.sqrt(np.sum((g + eye) ** 2, axis=(1, 2)))
    return float(np.max(np.minimum(plus, minus)))


def relation_word(beta):
    """Syllables of T^(-2b/u) V^2 T^2 V^(2b) T^(-2/u) V^(-2u) with u = 1 + 5b."""
    u = 1 + 5 * beta
    inv = u.inverse()
    return [
        ('T', -2 * beta * inv),
        ('V', beta.field.one * 2),
        ('T', beta.field.one * 2),
        ('V', 2 * beta),
        ('T', -2 * inv),
        ('V', -2 * u),
    ]


def evaluate_word(word):
    """Exact product of the syllables of a word over K."""
    field = word[0][1].field
    out = identity(field)
    for kind, exponent in word:
        out = out * (T(exponent) if kind == 'T' else V(exponent))
    return out


def verify_relation(field, beta):
    """True iff the six-syllable relation attached to beta is the identity in PSL_2(K)."""
    beta = field(beta)
    if not beta.is_integral():
        raise PreconditionError('beta = %r is not in O_K' % (beta,))
    u = 1 + 5 * beta
    if abs(u.norm()) != 1:
        raise PreconditionError('1 + 5 beta = %r is not a unit' % (u,))
    return evaluate_word(relation_word(beta)) == identity(field)


def _minkowski_box(pair, zero_index, k):
    n = pair.n
    half = np.full(n, 1.0 / k)
    half[zero_index] = 1.0 + k ** (n - 1) * 2 ** n * pair.L2.covolume()
    return half


def _box_points(lattice, half):
    """Nonzero lattice vectors in the box |t_j| <= half_j."""
    bounds = np.floor(np.abs(lattice._inverse).T @ half + 1e-9).astype(np.int64)
    axes = [np.arange(-b, b + 1) for b in bounds]
    grid = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, lattice.n)
    grid = grid[np.any(grid != 0, axis=1)]
    points = grid.astype(float) @ lattice.basis
    inside = np.all(np.abs(points) <= half * (1 + 1e-12), axis=1)
    return points[inside]


def commutator_sequence(pair, x0, k_max):
    """(k, y_k, dist([T^x0, V^y_k], 1)) for k = 1..k_max.

    x0 is a vector of L1 with a zero coordinate; y_k is a nonzero vector of
    L2 in the box C_k that is large only in that coordinate.
    """
    if pair.L1.exact:
        raise PreconditionError('property (I) holds, no axis vector')
    x0 = np.asarray(x0, dtype=float)
    if not np.any(x0) or not pair.L1.contains(x0):
        raise PreconditionError('x0 must be a nonzero vector of L1')
    scale = float(np.max(np.abs(x0)))
    zeros = np.flatnonzero(np.abs(x0) <= AXIS_TOLERANCE * scale)
    if not len(zeros):
        raise PreconditionError('x0 has no zero coordinate')
    zero_index = int(zeros[0])
    others = [j for j in range(pair.n) if j != zero_index]

    t = upper(x0)
    t_inv = upper(-x0)
    out = []
    for k in range(1, int(k_max) + 1):
        half = _minkowski_box(pair, zero_index, k)
        candidates = _box_points(pair.L2, half)
        if not len(candidates):
            raise MinkowskiError('no nonzero vector of L2 in C_%d' % k)
        small = np.max(np.abs(candidates[:, others]), axis=1) if others else np.zeros(len(candidates))
        best = min(
            range(len(candidates)),
            key=lambda i: (
                round(float(small[i]), 12),
                abs(float(candidates[i, zero_index])),
                tuple(-candidates[i]),
            ),
        )
        y = candidates[best]
        commutator = np.einsum('nij,njk,nkl,nlm->nim', t, lower(y), t_inv, lower(-y))
        out.append((k, y, distance_from_identity(commutator)))
    log.debug('commutator distances: %s', [round(d, 6) for _, _, d in out])
    return out


def _generators(lattice, box):
    if isinstance(box, int):
        return lattice.box_vectors(box)
    return list(box)


def _matrix(kind, exponent, exact):
    if exact:
        return T(exponent) if kind == 'T' else V(exponent)
    return upper(exponent) if kind == 'T' else lower(exponent)


def _search(first, length, tables, exact):
    """First relation of the given length starting with syllable `first`, in order."""
    kinds = ('T', 'V')
    numeric = tables['numeric']

    def visit(word, product, size):
        if len(word) == length:
            if distance_from_identity(product) <= tables['tolerance'] * size:
                if not exact:
                    return list(word)
                exact_product = identity(tables['field'])
                for kind, index in word:
                    exact_product = exact_product * tables['exact'][kind][index]
                if exact_product == identity(tables['field']):
                    return list(word)
            return None
        kind = kinds[1 - kinds.index(word[-1][0])]
        for index, g in enumerate(numeric[kind]):
            word.append((kind, index))
            step = np.einsum('nij,njk->nik', product, g)
            found = visit(word, step, max(size, float(np.max(np.abs(step)))))
            word.pop()
            if found is not None:
                return found
        return None

    kind, index = first
    start = numeric[kind][index]
    return visit([first], start, max(1.0, float(np.max(np.abs(start)))))


def free_product_probe(pair, depth, generator_box=2, threads=1):
    """First alternating word V^y1 T^x1 ... of at most `depth` syllables equal to +-1.

    generator_box is a coefficient radius, or a pair (xs, ys) of explicit
    exponents from L1 and L2. Words are searched by length, then
    lexicographically in generator indices. Returns a list of
    (kind, exponent) syllables, or None.
    """
    exact = pair.exact
    if isinstance(generator_box, int):
        xs = _generators(pair.L1, generator_box)
        ys = _generators(pair.L2, generator_box)
    else:
        xs, ys = (list(v) for v in generator_box)
    exponents = {'T': xs, 'V': ys}
    numeric = {
        kind: [_matrix(kind, pair.L1.embed(e) if kind == 'T' else pair.L2.embed(e), False) for e in values]
        for kind, values in exponents.items()
    }
    tables = {
        'numeric': numeric,
        'exact': {kind: [_matrix(kind, e, True) for e in values] for kind, values in exponents.items()} if exact else None,
        'field': pair.L1.field,
        'tolerance': 1e-8 if exact else NUMERIC_TOLERANCE,
    }
    firsts = [('T', i) for i in range(len(xs))] + [('V', i) for i in range(len(ys))]
    firsts.sort(key=lambda s: (s[0] != 'V', s[1]))
    for length in range(1, int(depth) + 1):
        found = parallel_map(lambda f: _search(f, length, tables, exact), firsts, threads)
        for word in found:
            if word is not None:
                log.info('relation of length %d found', length)
                return [(kind, exponents[kind][index]) for kind, index in word]
    return None


def probe_report(word, depth, commutators=()):
    def exponent_json(e):
        if hasattr(e, 'coords'):
            return [str(c) for c in e.coords]
        return [float(v) for v in np.atleast_1d(e)]

    return {
        'relation_found': None if word is None else [
            {'kind': kind, 'exponent': exponent_json(e)} for kind, e in word
        ],
        'depth': depth,
        'commutators': [
            {'k': k, 'y': [float(v) for v in y], 'dist': d} for k, y, d in commutators
        ],
    }

