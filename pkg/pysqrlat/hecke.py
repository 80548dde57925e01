# coding=utf-8
"""Radial interpolation from Poincare-type series over Gamma(lam).

Gamma(lam) is the free group generated by T^lam and V^lam (lam >= 2). With
phi_r(z) = exp(pi i r^2 z) and the weight-k slash action of the Hecke group
H(lam) = <S, T^lam>,

    F(z, r)  = -sum_{g in V_lam} (phi_r |_k g)(z)
    Ft(z, r) =  sum_{g in V_lam + {1}} (phi_r |_k gS)(z)

are lam-periodic in z and satisfy F(z) + (z/i)^-k Ft(-1/z) = phi_r(z). Their
Fourier coefficients a_n(r), at_n(r) are the weights of the interpolation
formula with nodes sqrt(2n/lam).

Words of V_lam are enumerated breadth first by number of syllables and
pruned once c^2 + d^2 exceeds a threshold; both entries only grow when a
word is extended on the right.
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
    PreconditionError,
    SearchBudgetError,
    default_config,
    parallel_map,
    power_over_i,
)
from .gausscomb import GaussianCombo, evaluate, fourier
from .pipeline import PipelineBase

log = logging.getLogger(__name__)

CHUNK = 1 << 20  # complex entries per evaluation block
LEMMA_BLOCK = 2048
LEMMA_TOLERANCE = 1e-9
INTERPOLATION_TOLERANCE = 1e-4

_LAMBDA = sympy.Symbol('lam')

_tables = {}
_tables_lock = threading.Lock()


class QuadratureError(SearchBudgetError):
    pass


class SeriesTailError(SearchBudgetError):
    pass


class HeckeWord(object):
    """V^(e1 lam) T^(f1 lam) ... V^(en lam) T^(fn lam); the empty word is 1."""

    __slots__ = ('syllables',)

    def __init__(self, syllables=()):
        syllables = tuple((int(e), int(f)) for e, f in syllables)
        for i, (e, f) in enumerate(syllables):
            if e == 0:
                raise InvalidInputError('exponent e_%d must be nonzero' % (i + 1))
            if f == 0 and i < len(syllables) - 1:
                raise InvalidInputError('exponent f_%d must be nonzero' % (i + 1))
        self.syllables = syllables

    def __repr__(self):
        return 'HeckeWord(%r)' % (list(self.syllables),)

    def __len__(self):
        return len(self.syllables)

    def __iter__(self):
        return iter(self.syllables)

    def __eq__(self, other):
        return isinstance(other, HeckeWord) and other.syllables == self.syllables

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.syllables)

    @property
    def in_r(self):
        """Representative of V_lam modulo <T^lam>."""
        return bool(self.syllables) and self.syllables[-1][1] == 0

    @property
    def in_r_tilde(self):
        """Representative of (V_lam + {1}) modulo <V^lam>."""
        return not self.syllables or self.syllables[-1][1] != 0


class SeriesConfig(object):
    """Weight, lambda and truncation of the series, and quadrature settings.

    max_exponent caps every |e_i| and |f_i|; with None the exponents are
    limited by the threshold on c^2 + d^2 alone.
    """

    def __init__(
        self,
        k=4.0,
        lam=2.5,
        max_syllables=10,
        max_exponent=None,
        threshold=1e6,
        quadrature_points=64,
        quadrature_budget=4096,
        y=None,
        tolerance=1e-8,
        tail_tolerance=None,
        threads=1,
    ):
        if not k > 2:
            raise PreconditionError('weight k = %r must exceed 2' % (k,))
        if not lam >= 2:
            raise PreconditionError('lambda = %r must be at least 2' % (lam,))
        if max_syllables < 1:
            raise InvalidInputError('max_syllables must be positive')
        if max_exponent is not None and max_exponent < 1:
            raise InvalidInputError('max_exponent must be positive')
        if threshold <= 1:
            raise InvalidInputError('threshold must exceed 1')
        if y is not None and y <= 0:
            raise PreconditionError('contour height must be positive')
        self.k = float(k)
        self.lam = float(lam)
        self.max_syllables = int(max_syllables)
        self.max_exponent = None if max_exponent is None else int(max_exponent)
        self.threshold = float(threshold)
        self.quadrature_points = int(quadrature_points)
        self.quadrature_budget = int(quadrature_budget)
        self.y = y
        self.tolerance = tolerance
        self.tail_tolerance = tail_tolerance
        self.threads = threads

    @classmethod
    def from_dimension(cls, d, **kwargs):
        if int(d) != d or d < 5:
            raise PreconditionError('dimension d = %r must be an integer >= 5' % (d,))
        return cls(k=d / 2.0, **kwargs)

    @property
    def dimension(self):
        return 2.0 * self.k

    def as_dict(self):
        return dict(self.__dict__)

    def __repr__(self):
        items = ', '.join('%s=%r' % kv for kv in sorted(self.__dict__.items()))
        return 'SeriesConfig(%s)' % items


def _exact(lam):
    if isinstance(lam, float):
        return Fraction(repr(lam))
    return Fraction(lam)


def _syllable(e, f, lam):
    return ((1, f * lam), (e * lam, e * f * lam * lam + 1))


def _mul(m, g):
    (a, b), (c, d) = m
    (p, q), (r, s) = g
    return ((a * p + b * r, a * q + b * s), (c * p + d * r, c * q + d * s))


def word_matrix(word, lam=None, symbolic=False):
    """Matrix of a word at lam.

    Exact when lam is a Fraction (object array); with symbolic=True the
    entries are expanded polynomials in Z[lam] (sympy Matrix).
    """
    if not isinstance(word, HeckeWord):
        word = HeckeWord(word)
    if symbolic:
        lam = _LAMBDA if lam is None else lam
    elif lam is None:
        raise InvalidInputError('a value of lambda is required')
    out = ((1, 0), (0, 1))
    for e, f in word:
        out = _mul(out, _syllable(e, f, lam))
    if symbolic:
        return sympy.Matrix(2, 2, [sympy.expand(v) for row in out for v in row])
    if isinstance(lam, Fraction):
        return np.array(out, dtype=object)
    return np.array(out, dtype=complex if isinstance(lam, complex) else float)


def _j_lower(x, w, k):
    """j_k(V^x, w), from V^x = S T^-x S."""
    return power_over_i(-1.0 / w - x, k) * power_over_i(w, k)


def j_k(word, z, k, lam):
    """Cocycle of the weight-k slash action, composed along the syllables.

    j_k(S, z) = (z/i)^k and j_k(T^lam, z) = 1.
    """
    if not isinstance(word, HeckeWord):
        word = HeckeWord(word)
    w = np.asarray(z, dtype=complex)
    factor = np.ones_like(w)
    for e, f in reversed(word.syllables):
        w = w + f * lam
        x = e * lam
        factor = factor * _j_lower(x, w, k)
        w = w / (x * w + 1.0)
    return factor[()]


def _form_minimum(z):
    """Smallest eigenvalue of (c, d) -> |cz + d|^2."""
    z = np.asarray(z, dtype=complex)
    s = np.abs(z) ** 2
    return ((s + 1.0) - np.sqrt((s - 1.0) ** 2 + 4.0 * z.real ** 2)) / 2.0


def _ranges(counts):
    """Owner index and local offset for a ragged concatenation."""
    owner = np.repeat(np.arange(len(counts)), counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    return owner, np.arange(int(np.sum(counts))) - starts


class WordTable(object):
    """Entries and j_k(g, i) of the enumerated words of V_lam."""

    def __init__(self, lam, k, max_syllables, max_exponent, threshold):
        self.lam = lam
        self.k = k
        self.max_syllables = max_syllables
        self.max_exponent = max_exponent
        self.threshold = threshold
        self.cutoff = threshold
        self.survivors = 0
        self._build()

    def __len__(self):
        return len(self.c)

    def __repr__(self):
        return 'WordTable(lam=%g, k=%g, %d words, cutoff=%g)' % (
            self.lam,
            self.k,
            len(self),
            self.cutoff,
        )

    def _build(self):
        lam, k, B = self.lam, self.k, self.max_exponent
        Q = self.threshold
        root = np.sqrt(Q)
        pa, pb, pc, pd = (np.array([v]) for v in (1.0, 0.0, 0.0, 1.0))
        pphase = np.array([1.0 + 0.0j])
        pindex = np.array([-1])
        columns = {name: [] for name in ('a', 'b', 'c', 'd', 'phase', 'parent', 'e', 'f', 'level')}
        offset = 0
        for level in range(1, self.max_syllables + 1):
            if not len(pa):
                break
            # prefixes satisfy |c| <= |d|, so |c + e lam d| >= (|e| lam - 1)|d|
            e_max = np.floor((root / np.abs(pd) + 1.0) / lam).astype(np.int64) + 1
            if B is not None:
                e_max = np.minimum(e_max, B)
                self._cap_cutoff(pa, pb, pc, pd, B + 1, None)
            owner, local = _ranges(2 * e_max)
            e = local - np.repeat(e_max, 2 * e_max)
            e = e + (e >= 0)
            x = e * lam
            va = pa[owner] + pb[owner] * x
            vc = pc[owner] + pd[owner] * x
            vb, vd = pb[owner], pd[owner]
            keep = vc * vc + vd * vd <= Q
            owner, e, va, vb, vc, vd = (v[keep] for v in (owner, e, va, vb, vc, vd))

            # |c| >= |d| after V, so |d + f lam c| >= (|f| lam - 1)|c|
            f_max = np.floor((root / np.abs(vc) + 1.0) / lam).astype(np.int64) + 1
            if B is not None:
                f_max = np.minimum(f_max, B)
                self._cap_cutoff(va, vb, vc, vd, None, B + 1)
            pair, local = _ranges(2 * f_max + 1)
            f = local - np.repeat(f_max, 2 * f_max + 1)
            y = f * lam
            wa = va[pair]
            wb = va[pair] * y + vb[pair]
            wc = vc[pair]
            wd = vc[pair] * y + vd[pair]
            inside = wc * wc + wd * wd <= Q
            pair, f, wa, wb, wc, wd = (v[inside] for v in (pair, f, wa, wb, wc, wd))
            owner_w = owner[pair]
            ew = e[pair]

            # j(P g, i) = j(P, g i) j(g, i) with g = V^(e lam) T^(f lam)
            w = 1j + f * lam
            gi = w / (ew * lam * w + 1.0)
            cp, dp = pc[owner_w], pd[owner_w]
            shift = np.exp(k * (np.log(cp * gi + dp) - np.log(cp * 1j + dp)))
            phase = pphase[owner_w] * shift * _j_lower(ew * lam, w, k)

            count = len(wc)
            for name, values in (
                ('a', wa),
                ('b', wb),
                ('c', wc),
                ('d', wd),
                ('phase', phase),
                ('parent', pindex[owner_w]),
                ('e', ew),
                ('f', f),
                ('level', np.full(count, level)),
            ):
                columns[name].append(values)
            indices = offset + np.arange(count)
            offset += count

            nxt = f != 0
            pa, pb, pc, pd = wa[nxt], wb[nxt], wc[nxt], wd[nxt]
            pphase = phase[nxt]
            pindex = indices[nxt]
            log.debug('level %d: %d words, %d prefixes', level, count, len(pa))

        if len(pa) and len(columns['c']) == self.max_syllables:
            self.survivors = len(pa)
            self.cutoff = min(self.cutoff, float(np.min(pc * pc + pd * pd)))
            log.info('%d prefixes survive at depth %d', self.survivors, self.max_syllables)

        for name, parts in columns.items():
            setattr(self, name, np.concatenate(parts) if parts else np.zeros(0))
        for name in ('parent', 'e', 'f', 'level'):
            setattr(self, name, getattr(self, name).astype(np.int64))
        self.phase = self.phase.astype(complex)

    def _cap_cutoff(self, a, b, c, d, e, f):
        """Smallest c^2 + d^2 among children cut off by the exponent cap."""
        lam = self.lam
        if e is not None:
            norms = [(c + d * s * e * lam) ** 2 + d ** 2 for s in (1, -1)]
        else:
            norms = [c ** 2 + (d + c * s * f * lam) ** 2 for s in (1, -1)]
        if len(c):
            self.cutoff = min(self.cutoff, float(np.min(np.minimum(*norms))))

    def word(self, index):
        syllables = []
        while index >= 0:
            syllables.append((int(self.e[index]), int(self.f[index])))
            index = int(self.parent[index])
        return HeckeWord(reversed(syllables))

    def words(self):
        for index in range(len(self)):
            yield self.word(index)

    def matrix(self, index):
        return np.array([[self.a[index], self.b[index]], [self.c[index], self.d[index]]])

    def tail_estimate(self, z, kappa, r=0.0):
        """Bound for the omitted part of sum |cz + d|^-kappa |phi_r(gz)|.

        Omitted words have c^2 + d^2 > cutoff; their count is bounded by the
        integer lattice count.
        """
        z = np.asarray(z, dtype=complex)
        R = math.sqrt(self.cutoff)
        if kappa <= 2 or R <= 1:
            return np.full(z.shape, np.inf)[()]
        lattice = math.pi / (kappa - 2.0) * (R - 1.0) ** (2.0 - kappa)
        growth = 1.0
        if np.iscomplexobj(r) and complex(r).imag != 0:
            growth = np.exp(np.pi * abs(complex(r) ** 2) * (1.0 + 1.0 / z.imag))
        return (_form_minimum(z) ** (-kappa / 2.0) * lattice * growth)[()]

    def _blocks(self, points):
        step = max(1, CHUNK // max(1, points))
        return [slice(i, i + step) for i in range(0, len(self), step)]

    def slash_sum(self, u, radii, threads=1):
        """sum_g j_k(g, u)^-1 phi_r(g u), shape (len(u), len(radii))."""
        u = np.atleast_1d(np.asarray(u, dtype=complex))
        radii = np.atleast_1d(np.asarray(radii))
        squares = radii.astype(complex) ** 2
        if not len(self):
            return np.zeros((len(u), len(radii)), dtype=complex)
        log0 = np.log(self.c * 1j + self.d)

        def block(sl):
            c = self.c[sl, None]
            w = c * u[None, :] + self.d[sl, None]
            inv_j = np.exp(-self.k * (np.log(w) - log0[sl, None])) / self.phase[sl, None]
            gu = self.a[sl, None] / c - 1.0 / (c * w)
            out = np.empty((len(u), len(radii)), dtype=complex)
            for i, s in enumerate(squares):
                out[:, i] = np.sum(inv_j * np.exp(1j * np.pi * s * gu), axis=0)
            return out

        parts = parallel_map(block, self._blocks(len(u) * len(radii)), threads)
        return np.sum(parts, axis=0)

    def abs_sum(self, u, kappa, swapped=False, mask=None):
        """sum_g |cu + d|^-kappa, or |du - c|^-kappa when swapped."""
        u = np.atleast_1d(np.asarray(u, dtype=complex))
        c, d = (self.d, -self.c) if swapped else (self.c, self.d)
        if mask is not None:
            c, d = c[mask], d[mask]
        total = np.zeros(len(u))
        step = max(1, CHUNK // max(1, len(u)))
        for i in range(0, len(c), step):
            w = c[i:i + step, None] * u[None, :] + d[i:i + step, None]
            total += np.sum(np.abs(w) ** -kappa, axis=0)
        return total


def word_table(lam, k, max_syllables, max_exponent=None, threshold=1e6):
    key = (float(lam), float(k), int(max_syllables), max_exponent, float(threshold))
    with _tables_lock:
        table = _tables.get(key)
        if table is None:
            if len(_tables) >= 8:
                _tables.clear()
            table = WordTable(*key)
            _tables[key] = table
            log.info('%r', table)
        return table


def _table(config):
    return word_table(config.lam, config.k, config.max_syllables, config.max_exponent, config.threshold)


def enumerate_words(config):
    """(HeckeWord, matrix) for the enumerated words, by length then exponents."""
    table = _table(config)
    for index in range(len(table)):
        yield table.word(index), table.matrix(index)


def _reduce(z, lam):
    z = np.asarray(z, dtype=complex)
    return z - lam * np.round(z.real / lam)


def _series_values(config, table, z, radii):
    """F and Ft at reduced points z for every radius, shape (len(z), len(radii))."""
    radii = np.atleast_1d(np.asarray(radii))
    squares = radii.astype(complex) ** 2
    u = -1.0 / z
    F = -table.slash_sum(z, radii, config.threads)
    seed = np.exp(1j * np.pi * u[:, None] * squares[None, :])
    Ft = power_over_i(z, -config.k)[:, None] * (seed + table.slash_sum(u, radii, config.threads))
    return F, Ft


def series_F(config, z, r, reduce=True):
    """(F(z, r), Ft(z, r), tail bound); z is reduced to |Re z| <= lam/2 first
    unless reduce is False, in which case the word sum runs at z itself.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if reduce:
        z = _reduce(z, config.lam)
    if np.any(z.imag < default_config.y_min):
        raise PreconditionError('Im z must be at least %g' % default_config.y_min)
    table = _table(config)
    F, Ft = _series_values(config, table, z, [r])
    tail = np.atleast_1d(table.tail_estimate(z, config.k, r))
    if config.tail_tolerance is not None and np.max(tail) > config.tail_tolerance:
        raise SeriesTailError(
            'tail bound %.3g above tolerance %.3g' % (np.max(tail), config.tail_tolerance)
        )
    F, Ft = F[:, 0], Ft[:, 0]
    if scalar:
        return complex(F[0]), complex(Ft[0]), float(tail[0])
    return F, Ft, tail


def phi(z, r):
    return np.exp(1j * np.pi * r * r * np.asarray(z, dtype=complex))


def functional_residual(config, z, r):
    """|F(z) + (z/i)^-k Ft(-1/z) - phi_r(z)| and the tail bound of both terms."""
    z = complex(z)
    F, _, tail_z = series_F(config, z, r)
    _, Ft, tail_s = series_F(config, -1.0 / z, r)
    weight = complex(power_over_i(z, -config.k))
    residual = abs(F + weight * Ft - complex(phi(z, r)))
    return residual, tail_z + abs(weight) * tail_s


def eigen_split(a, atilde):
    """Coefficients b+ = a + at and b- = a - at of the Fourier eigen parts."""
    a = np.asarray(a)
    atilde = np.asarray(atilde)
    return a + atilde, a - atilde


def eigen_series(config, z, r):
    """F+ = F - Ft and F- = F + Ft."""
    F, Ft, _ = series_F(config, z, r)
    return F - Ft, F + Ft


def eigen_functional_residual(config, z, r, epsilon):
    """Residual of F^eps |(1 - S) = phi_r |(1 - S) in the eps-twisted action."""
    if epsilon not in (1, -1):
        raise InvalidInputError('epsilon must be +1 or -1')
    z = complex(z)
    index = 0 if epsilon == 1 else 1
    here = eigen_series(config, z, r)[index]
    there = eigen_series(config, -1.0 / z, r)[index]
    weight = complex(power_over_i(z, -config.k))
    left = here - epsilon * weight * there
    right = complex(phi(z, r)) - epsilon * weight * complex(phi(-1.0 / z, r))
    return abs(left - right)


def contour_height(k, n):
    return k / (math.pi * n) if n > 0 else 1.0


def _fourier_coefficients(config, table, n_values, radii, y):
    """Periodic trapezoid rule on Im z = y, doubling M until it settles."""
    lam = config.lam
    n_values = np.asarray(n_values, dtype=float)
    M = config.quadrature_points
    F = Ft = None
    previous = None
    while True:
        x = -lam / 2.0 + lam * np.arange(M) / M
        if F is None:
            F, Ft = _series_values(config, table, x + 1j * y, radii)
        else:
            odd_F, odd_Ft = _series_values(config, table, x[1::2] + 1j * y, radii)
            F = _interleave(F, odd_F)
            Ft = _interleave(Ft, odd_Ft)
        kernel = np.exp(-2j * np.pi * np.outer(n_values, x + 1j * y) / lam) / M
        current = (kernel @ F, kernel @ Ft)
        if previous is not None:
            change = max(
                float(np.max(np.abs(c - p) / np.maximum(1.0, np.abs(c))))
                for c, p in zip(current, previous)
            )
            if change <= config.tolerance:
                log.debug('quadrature at y=%.4g settled with M=%d', y, M)
                return current
        if 2 * M > config.quadrature_budget:
            raise QuadratureError(
                'quadrature at y=%.4g did not settle within %d points' % (y, config.quadrature_budget)
            )
        previous = current
        M *= 2


def _interleave(even, odd):
    out = np.empty((len(even) + len(odd),) + even.shape[1:], dtype=complex)
    out[0::2] = even
    out[1::2] = odd
    return out


def coefficients(config, n_range, r, y=None):
    """(a_n(r), at_n(r)) for n in n_range, shape (len(n_range), len(r)).

    With no contour height given each n uses y = k/(pi n) (1 for n <= 0);
    a shared height evaluates the series once for all n.
    """
    n_values = np.atleast_1d(np.asarray(n_range, dtype=np.int64))
    scalar_r = np.ndim(r) == 0
    radii = np.atleast_1d(np.asarray(r))
    table = _table(config)
    y = config.y if y is None else y
    if y is not None:
        a, at = _fourier_coefficients(config, table, n_values, radii, y)
    else:
        a = np.empty((len(n_values), len(radii)), dtype=complex)
        at = np.empty_like(a)
        for i, n in enumerate(n_values):
            a[i:i + 1], at[i:i + 1] = _fourier_coefficients(
                config, table, [n], radii, contour_height(config.k, n)
            )
    if scalar_r:
        return a[:, 0], at[:, 0]
    return a, at


def _radii(x_samples):
    x = np.asarray(x_samples, dtype=float)
    if x.ndim == 2:
        return np.linalg.norm(x, axis=1)
    return np.abs(np.atleast_1d(x))


def interpolation_residuals(config, tau, x_samples, n_max):
    """f(x) minus both truncated interpolation sums, for f(x) = exp(pi i tau |x|^2)."""
    d = config.dimension
    if d != int(d):
        raise PreconditionError('the weight must be half an integer dimension')
    tau = complex(tau)
    if tau.imag <= 0:
        raise PreconditionError('tau must lie in the upper half-plane')
    radii = _radii(x_samples)
    f = GaussianCombo((int(d),), terms=[(1.0, (tau,))])
    fhat = fourier(f)
    n = np.arange(1, int(n_max) + 1)
    nodes = np.sqrt(2.0 * n / config.lam)[:, None]
    # below both Im tau and Im(-1/tau) the coefficient errors are damped
    y = config.y if config.y is not None else 0.5 * min(tau.imag, (-1.0 / tau).imag)
    a, at = coefficients(config, n, radii, y=y)
    left = evaluate(f, radii[:, None])
    right = evaluate(f, nodes) @ a + evaluate(fhat, nodes) @ at
    return left - right


def verify_interpolation(config, tau, x_samples, n_max):
    return float(np.max(np.abs(interpolation_residuals(config, tau, x_samples, n_max))))


def _fit(n_values, values):
    slope, intercept = np.polyfit(np.log(n_values), np.log(values), 1)
    return float(slope), float(intercept)


def uniform_bound_fit(config, n_values, radii):
    """Growth of sup_r |a_n| + sup_r |at_n| against C n^k."""
    n_values = np.asarray(n_values, dtype=float)
    a, at = coefficients(config, n_values.astype(np.int64), radii)
    sup = np.max(np.abs(a), axis=1) + np.max(np.abs(at), axis=1)
    slope, intercept = _fit(n_values, sup)
    constants = sup / n_values ** config.k
    return {
        'k': config.k,
        'n': n_values.tolist(),
        'sup': sup.tolist(),
        'slope': slope,
        'intercept': intercept,
        'constant': float(np.max(constants)),
        'spread': float(np.max(constants) / np.min(constants)),
    }


def pointwise_bound_fit(config, n_values, radii):
    """Fitted C in |a_n(r)| + |at_n(r)| <= C n^(k/2+9/8) r^(-k+9/4)."""
    n_values = np.asarray(n_values, dtype=float)
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise PreconditionError('radii must be positive')
    a, at = coefficients(config, n_values.astype(np.int64), radii)
    values = np.abs(a) + np.abs(at)
    shape = np.outer(n_values ** (config.k / 2 + 9.0 / 8), radii ** (-config.k + 9.0 / 4))
    constants = values / shape
    per_n = np.max(constants, axis=1)
    return {
        'k': config.k,
        'n': n_values.tolist(),
        'r': radii.tolist(),
        'constants': constants.tolist(),
        'constant': float(np.max(constants)),
        'spread': float(np.max(per_n) / np.min(per_n)),
    }


def U_bounds(kappa, lam, z_samples, max_syllables=10, threshold=1e6):
    """Truncated U, Ut at the samples against C 2^kappa (y^-kappa/2 + y^-kappa).

    Also checks the orbit-wise bound sum ((c^2+d^2)/2)^(-kappa/2)
    (3 y^-kappa + 2 zeta(kappa/2) (2 lam y)^(-kappa/2)) over representatives.
    """
    if kappa < 9.0 / 4:
        raise PreconditionError('kappa must be at least 9/4')
    if lam < 2:
        raise PreconditionError('lambda must be at least 2')
    table = word_table(lam, kappa, max_syllables, None, threshold)
    z = _reduce(np.atleast_1d(np.asarray(z_samples, dtype=complex)), lam)
    if np.any(z.imag <= 0):
        raise PreconditionError('samples must lie in the upper half-plane')
    y = z.imag
    U = table.abs_sum(z, kappa)
    Ut = table.abs_sum(z, kappa, swapped=True) + np.abs(z) ** -kappa
    shape = 2.0 ** kappa * (y ** (-kappa / 2.0) + y ** -kappa)
    constants = np.maximum(U, Ut) / shape

    zeta = float(mpmath.zeta(kappa / 2.0))
    orbit = 3.0 * y ** -kappa + 2.0 * zeta * (2.0 * lam * y) ** (-kappa / 2.0)
    norms = (table.c ** 2 + table.d ** 2) / 2.0
    reps = norms[table.f == 0] ** (-kappa / 2.0)
    reps_tilde = np.concatenate([[2.0 ** (kappa / 2.0)], norms[table.f != 0] ** (-kappa / 2.0)])
    holds = bool(np.all(U <= np.sum(reps) * orbit) and np.all(Ut <= np.sum(reps_tilde) * orbit))

    shifted = table.abs_sum(z + lam, kappa)
    return {
        'kappa': kappa,
        'lambda': lam,
        'z': [[v.real, v.imag] for v in z],
        'U': U.tolist(),
        'U_tilde': Ut.tolist(),
        'constants': constants.tolist(),
        'fitted_constant': float(np.max(constants)),
        'spread': float(np.max(constants) / np.min(constants)),
        'proof_bound_holds': holds,
        'periodicity_residual': float(np.max(np.abs(shifted - U))),
        'tail': np.atleast_1d(table.tail_estimate(z, kappa)).tolist(),
        'words': len(table),
    }


def _shift(p):
    """Multiply integer coefficient arrays (lowest degree first) by lam."""
    out = np.zeros_like(p)
    out[..., 1:] = p[..., :-1]
    return out


def _degree(p):
    nonzero = p != 0
    top = p.shape[-1] - 1 - np.argmax(nonzero[..., ::-1], axis=-1)
    return np.where(np.any(nonzero, axis=-1), top, -1)


class _LemmaState(object):
    def __init__(self, lambdas, samples, limit):
        self.lambdas = lambdas
        self.samples = samples
        self.powers = lambdas[None, :] ** np.arange(limit)[:, None]
        self.words = 0
        self.violations = {key: 0 for key in ('i', 'ii', 'iii', 'iv', 'v', 'vi', 'bound')}
        self.witnesses = []

    def record(self, key, mask, syllables, lam_index=None):
        count = int(np.count_nonzero(mask))
        if not count:
            return
        self.violations[key] += count
        if len(self.witnesses) < 10:
            first = int(np.flatnonzero(mask.any(axis=1) if mask.ndim == 2 else mask)[0])
            entry = {'property': key, 'word': syllables[first].tolist()}
            if mask.ndim == 2:
                entry['lambda'] = float(self.lambdas[int(np.argmax(mask[first]))])
            self.witnesses.append(entry)

    def check(self, poly, syllables):
        n = syllables.shape[1]
        self.words += len(poly)
        values = np.einsum('wkd,dl->wkl', poly.astype(float), self.powers)
        a, b, c, d = (np.abs(values[:, i]) for i in range(4))
        last_f = syllables[:, -1, 1]
        tol = LEMMA_TOLERANCE
        ends_in_v = (last_f == 0)[:, None]
        self.record('i', ends_in_v & (c < d * (1 - tol)), syllables)
        self.record('ii', ~ends_in_v & (d < c * (1 - tol)), syllables)
        self.record('iii', (c == 0) | (d == 0), syllables)
        self.record('iv', (a > c * (1 + tol)) | (b > d * (1 + tol)), syllables)
        low = (_degree(poly[:, 2]) < 2 * n - 2) | (_degree(poly[:, 3]) < 2 * n - 2)
        self.record('v', low, syllables)
        if len(self.lambdas) > 1:
            falling = (np.diff(c, axis=1) < -tol * c[:, 1:]) | (np.diff(d, axis=1) < -tol * d[:, 1:])
            self.record('vi', np.pad(falling, ((0, 0), (1, 0))), syllables)
        for z in self.samples:
            bound = 1.0 + 1.0 / z.imag
            gz = np.abs((values[:, 0] * z + values[:, 1]) / (values[:, 2] * z + values[:, 3]))
            gsz = np.abs((values[:, 1] * z - values[:, 0]) / (values[:, 3] * z - values[:, 2]))
            worst = np.maximum(np.maximum(gz, gsz), 1.0 / abs(z))
            self.record('bound', worst > bound * (1 + tol), syllables)


def _extend(poly, syllables, pairs):
    """Children P V^(e lam) T^(f lam) for every prefix and every (e, f)."""
    count = len(pairs)
    poly = np.repeat(poly, count, axis=0)
    e = np.tile(pairs[:, 0], len(syllables))[:, None]
    f = np.tile(pairs[:, 1], len(syllables))[:, None]
    a, b, c, d = (poly[:, i] for i in range(4))
    a = a + e * _shift(b)
    c = c + e * _shift(d)
    b = b + f * _shift(a)
    d = d + f * _shift(c)
    children = np.stack([a, b, c, d], axis=1)
    syllables = np.concatenate(
        [np.repeat(syllables, count, axis=0), np.tile(pairs, (len(syllables), 1))[:, None, :]], axis=1
    )
    return children, syllables


def check_word_lemma(config, lambdas, samples=3, seed=0):
    """Check the entry inequalities of Gamma(lam) words on every enumerated word.

    Words with at most max_syllables syllables and exponents bounded by
    max_exponent are checked numerically at every lam >= 2 of the grid;
    degrees are read off the integer coefficients in Z[lam]; monotonicity in
    lam by differences across the sorted grid.
    """
    B = config.max_exponent
    if B is None:
        raise PreconditionError('the word lemma check needs max_exponent')
    N = config.max_syllables
    lambdas = np.array(sorted(float(v) for v in lambdas))
    if not len(lambdas) or lambdas[0] < 2:
        raise PreconditionError('lambda values must be at least 2')
    rng = np.random.default_rng(seed)
    points = rng.uniform(-1.0, 1.0, samples) + 1j * rng.uniform(0.2, 2.0, samples)
    state = _LemmaState(lambdas, points, 2 * N + 1)

    exponents = [v for v in range(-B, B + 1) if v]
    pairs = np.array([(e, f) for e in exponents for f in range(-B, B + 1)], dtype=np.int64)

    identity = np.zeros((1, 4, 2 * N + 1), dtype=np.int64)
    identity[0, 0, 0] = identity[0, 3, 0] = 1

    def visit(poly, syllables):
        words, word_syllables = _extend(poly, syllables, pairs)
        state.check(words, word_syllables)
        if word_syllables.shape[1] >= N:
            return
        keep = word_syllables[:, -1, 1] != 0
        prefixes, prefix_syllables = words[keep], word_syllables[keep]
        for start in range(0, len(prefixes), LEMMA_BLOCK):
            visit(prefixes[start:start + LEMMA_BLOCK], prefix_syllables[start:start + LEMMA_BLOCK])

    visit(identity, np.zeros((1, 0, 2), dtype=np.int64))

    total = sum(state.violations.values())
    log.info('word lemma: %d words, %d violations', state.words, total)
    return {
        'max_syllables': N,
        'max_exponent': B,
        'lambdas': lambdas.tolist(),
        'words_checked': state.words,
        'violations': state.violations,
        'witnesses': state.witnesses,
        'passed': total == 0,
    }


def _circle_points(radius, count):
    """Exact rational points on |z| = radius, as (re, im) Fractions."""
    q = max(1, count // 4)
    points = set()
    for j in range(q + 1):
        t = Fraction(j, q)
        s = 1 + t * t
        x, y = radius * (1 - t * t) / s, radius * 2 * t / s
        for sx in (1, -1):
            for sy in (1, -1):
                points.add((sx * x, sy * y))
    return sorted(points)


def pingpong_certificate(lam, samples=16, m_max=5):
    """Exact check of the ping-pong containments for Gamma(lam).

    X = {|z| <= 1/(lam-1)}, Y = {|z| >= lam-1} + {oo}; for 0 < |m| <= m_max,
    T^(m lam) must send the boundary samples of X into Y and V^(m lam) those
    of Y (and oo) into X.
    """
    lam = _exact(lam)
    if lam <= 1:
        raise PreconditionError('lambda must exceed 1')
    inner = 1 / (lam - 1)
    outer = lam - 1
    witness = None
    translations_ok = True
    for m in [v for v in range(-m_max, m_max + 1) if v]:
        for re, im in _circle_points(inner, samples):
            if (re + m * lam) ** 2 + im ** 2 < outer ** 2:
                translations_ok = False
                witness = witness or {'map': 'T', 'm': m, 'z': [str(re), str(im)]}
    lower_ok = True
    for m in [v for v in range(-m_max, m_max + 1) if v]:
        x = m * lam
        if 1 / (x * x) > inner ** 2:
            lower_ok = False
            witness = witness or {'map': 'V', 'm': m, 'z': 'oo'}
        for re, im in _circle_points(outer, samples):
            # |z/(xz+1)|^2 <= inner^2
            size = re * re + im * im
            den = (x * re + 1) ** 2 + (x * im) ** 2
            if size > inner ** 2 * den:
                lower_ok = False
                witness = witness or {'map': 'V', 'm': m, 'z': [str(re), str(im)]}
    return {
        'lambda': str(lam),
        'translations_ok': translations_ok,
        'lower_ok': lower_ok,
        'witness': witness,
        'passed': translations_ok and lower_ok,
    }


class InterpolationCheck(PipelineBase):
    """Compute interpolation coefficients and verify the formula on a Gaussian."""

    def __init__(self, config, tau, radii, n_max, tolerance=INTERPOLATION_TOLERANCE, debuglevel=0, debugname='InterpolationCheck'):
        super(InterpolationCheck, self).__init__(debuglevel=debuglevel, debugname=debugname)
        self.config = config
        self.tau = complex(tau)
        self.radii = _radii(radii)
        self.n_max = n_max
        self.tolerance = tolerance
        self.table = None

    def build(self):
        self.table = _table(self.config)
        return interpolation_residuals(self.config, self.tau, self.radii, self.n_max)

    def verify(self, residuals):
        residual = float(np.max(np.abs(residuals)))
        low = coefficients(self.config, [0, -1], self.radii)
        vanishing = float(max(np.max(np.abs(v)) for v in low))
        return {
            'k': self.config.k,
            'lambda': self.config.lam,
            'tau': [self.tau.real, self.tau.imag],
            'radii': self.radii.tolist(),
            'n_max': self.n_max,
            'residuals': [abs(v) for v in residuals],
            'max_residual': residual,
            'nonpositive_coefficients': vanishing,
            'words': len(self.table),
            'survivors': self.table.survivors,
            'passed': residual < self.tolerance,
        }
