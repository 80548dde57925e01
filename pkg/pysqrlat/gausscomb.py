# coding=utf-8
"""Finite linear combinations of (signed) Gaussians on R^d1 x ... x R^dn."""
import json
import logging

import numpy as np

from .common import InvalidInputError, default_config, power_over_i

log = logging.getLogger(__name__)


class GaussianCombo(object):
    """sum_t c_t exp(pi i sum_j delta_j z_tj |x_j|^2).

    Every parameter must satisfy Im(delta_j z_j) > 0.
    """

    def __init__(self, dims, delta=None, terms=()):
        self.dims = tuple(int(d) for d in dims)
        if not self.dims or min(self.dims) < 1:
            raise InvalidInputError('dims must be positive integers')
        n = len(self.dims)
        self.delta = tuple(int(s) for s in (delta or (1,) * n))
        if len(self.delta) != n or any(s not in (1, -1) for s in self.delta):
            raise InvalidInputError('delta must be a vector of +-1 of length %d' % n)
        checked = []
        for c, z in terms:
            z = tuple(complex(v) for v in z)
            if len(z) != n:
                raise InvalidInputError('parameter %r has wrong length' % (z,))
            for s, v in zip(self.delta, z):
                if (s * v).imag <= 0:
                    raise InvalidInputError('parameter %r outside the half-plane' % (z,))
            checked.append((complex(c), z))
        self.terms = tuple(checked)

    def __repr__(self):
        return 'GaussianCombo(dims=%s, delta=%s, %d terms)' % (
            self.dims,
            self.delta,
            len(self.terms),
        )

    def __len__(self):
        return len(self.terms)

    def _like(self, terms):
        return GaussianCombo(self.dims, self.delta, terms)

    def _check_compatible(self, other):
        if other.dims != self.dims or other.delta != self.delta:
            raise InvalidInputError('combos live on different spaces')

    def __add__(self, other):
        self._check_compatible(other)
        return self._like(self.terms + other.terms)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return self._like([(scalar * c, z) for c, z in self.terms])

    __rmul__ = __mul__

    @property
    def coefficients(self):
        return np.array([c for c, _ in self.terms], dtype=complex)

    @property
    def parameters(self):
        return np.array([z for _, z in self.terms], dtype=complex).reshape(
            -1, len(self.dims)
        )

    def max_coefficient(self):
        if not self.terms:
            return 0.0
        return float(np.max(np.abs(self.coefficients)))

    def __call__(self, radii):
        return evaluate(self, radii)


def evaluate(combo, radii):
    """Value at radii (|x_1|, ..., |x_n|); accepts one point or an array of points."""
    radii = np.asarray(radii, dtype=float)
    single = radii.ndim == 1
    points = radii.reshape(-1, len(combo.dims))
    if not combo.terms:
        values = np.zeros(len(points), dtype=complex)
    else:
        signed = combo.parameters * np.array(combo.delta)
        exponent = 1j * np.pi * (points ** 2) @ signed.T
        values = np.exp(exponent) @ combo.coefficients
    return values[0] if single else values


def fourier(combo):
    """Term-wise transform: c -> c prod (delta_j z_j/i)^(-d_j/2), z -> -1/z."""
    terms = []
    for c, z in combo.terms:
        factor = 1.0 + 0.0j
        for s, d, v in zip(combo.delta, combo.dims, z):
            factor *= complex(power_over_i(s * v, -d / 2.0))
        terms.append((c * factor, tuple(-1.0 / v for v in z)))
    return combo._like(terms)


def _close(z, w, tau):
    scale = max(1.0, max(abs(v) for v in z))
    return max(abs(a - b) for a, b in zip(z, w)) <= tau * scale


def simplify(combo, tau_z=None, tau_c=None):
    """Merge terms with equal parameters, drop negligible ones, sort."""
    tau_z = default_config.tau_z if tau_z is None else tau_z
    tau_c = default_config.tau_c if tau_c is None else tau_c
    groups = []
    for c, z in combo.terms:
        for group in groups:
            if _close(group[1], z, tau_z):
                group[0] += c
                break
        else:
            groups.append([c, z])
    cutoff = tau_c * combo.max_coefficient()
    kept = [(c, z) for c, z in groups if abs(c) > cutoff]
    kept.sort(key=lambda t: [x for v in t[1] for x in (round(v.real, 12), round(v.imag, 12))])
    return combo._like(kept)


def relative_residual(first, second, tau_z=None):
    """max |coefficient| of first - second after merging, relative to first."""
    difference = simplify(first - second, tau_z=tau_z, tau_c=0.0)
    scale = max(first.max_coefficient(), second.max_coefficient())
    if scale == 0.0:
        return difference.max_coefficient()
    return difference.max_coefficient() / scale


def gram_matrix(combo):
    """L^2 inner products <g_s, g_t> of the individual terms, in closed form."""
    signed = combo.parameters * np.array(combo.delta)
    T = len(signed)
    gram = np.ones((T, T), dtype=complex)
    for j, d in enumerate(combo.dims):
        w = signed[:, j][:, None] - np.conj(signed[:, j])[None, :]
        gram *= power_over_i(w, -d / 2.0)
    return gram


def plancherel_norm(combo):
    c = combo.coefficients
    if not len(c):
        return 0.0
    return float(np.sqrt(max(np.real(c @ gram_matrix(combo) @ np.conj(c)), 0.0)))


def to_json(combo):
    return {
        'dims': list(combo.dims),
        'delta': list(combo.delta),
        'terms': [
            {'c': [c.real, c.imag], 'z': [[v.real, v.imag] for v in z]}
            for c, z in combo.terms
        ],
    }


def from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    terms = [
        (complex(*t['c']), tuple(complex(*v) for v in t['z'])) for t in data['terms']
    ]
    return GaussianCombo(data['dims'], data['delta'], terms)
