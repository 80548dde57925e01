# coding=utf-8
"""Fourier eigenfunctions built from the eight matrices gamma_r.

Both constructions produce 16-term Gaussian combinations in which the
terms pair up as g(w) - g(w + 2 sigma(beta_r)); every pair vanishes on
the relevant square-root set, and the Fourier transform permutes the
terms up to the eigenvalue.
"""
import cmath
import logging

import numpy as np

from ..common import (
    InvalidInputError,
    PreconditionError,
    VerificationError,
    default_config,
    parallel_map,
    power_over_i,
)
from ..gausscomb import GaussianCombo, fourier, relative_residual, simplify
from ..idlat import PointSet, ellipsoid_points, inverse_different, sqrt_points
from ..numfield import is_totally_positive
from ..pipeline import PipelineBase
from .matrices import gamma_matrices, unit_data
from .theta import ThetaContext, j_theta, j_theta_s, theta

log = logging.getLogger(__name__)

EIGEN_TOLERANCE = 1e-8
VANISHING_TOLERANCE = 1e-8
# relative to the largest coefficient
SPHERE_EIGEN_TOLERANCE = 1e-13
SPHERE_VANISHING_TOLERANCE = 1e-10
COCYCLE_TOLERANCE = 1e-8


class GenericityError(VerificationError):
    pass


class ConsistencyError(VerificationError):
    pass


def _check_dims(dims, n):
    dims = tuple(int(d) for d in dims)
    if len(dims) != n or min(dims) < 1:
        raise InvalidInputError('dims must be %d positive integers, got %r' % (n, dims))
    return dims


def mu(w, dims):
    """prod_j (w_j/i)^(d_j/2) on the principal branch."""
    w = np.asarray(w, dtype=complex)
    return complex(np.prod(power_over_i(w, np.asarray(dims) / 2.0)))


def argument_limit(g):
    """Limit phase of ((g iy)/i)^(1/2) as y -> infinity, for one real matrix g.

    Equals exp(-pi i/4 sgn(ac)) with a, c the left column of g.
    """
    a, c = float(g[0][0]), float(g[1][0])
    return cmath.exp(-0.25j * cmath.pi * np.sign(a * c))


def argument_phase(g, y):
    """((g iy)/i)^(1/2) normalized to modulus one, at finite height y."""
    a, b = float(g[0][0]), float(g[0][1])
    c, d = float(g[1][0]), float(g[1][1])
    w = (a * 1j * y + b) / (c * 1j * y + d)
    value = complex(power_over_i(w, 0.5))
    return value / abs(value)


def _unit_data_from_matrices(matrices):
    a = matrices[1].d / 2
    b = matrices[3].d / 2
    y = matrices[4].c / 2
    x = matrices[6].c / 2
    return a, b, x, y


def rho_numeric(matrices, dims, y):
    """Phase of prod_r mu(gamma_r z) at z = (iy, ..., iy)."""
    n = matrices[0].field.degree
    z = np.full(n, 1j * y)
    value = 1.0 + 0.0j
    for gamma in matrices:
        value *= mu(gamma.act(z), dims)
    return value / abs(value)


def rho_constant(matrices, dims, heights=(1e3, 1e4)):
    """(rho, Sigma) with rho = e(-Sigma/8) and Sigma = sum_j d_j (eta_j - 1)(xi_j + 1).

    eta_j = sgn(1 - 4 sigma_j(b)), xi_j = sgn(sigma_j(y)). The value is
    cross-checked against the sign pattern of the left columns and
    against the product of mu(gamma_r z) at large heights.
    """
    field = matrices[0].field
    dims = _check_dims(dims, field.degree)
    a, b, x, y = _unit_data_from_matrices(matrices)
    for name, unit in (('1+4a', 1 + 4 * a), ('1+4x', 1 + 4 * x), ('1-3b', 1 - 3 * b), ('1-3y', 1 - 3 * y)):
        if not is_totally_positive(unit):
            raise PreconditionError('%s is not totally positive' % name)

    eta = (1 - 4 * b).signs()
    xi = y.signs()
    for j, (e, s) in enumerate(zip(eta, xi)):
        if e < 0 and s > 0:
            raise ConsistencyError(
                'embedding %d has 1 - 4 sigma(b) < 0 and sigma(y) > 0' % j
            )
    total = sum(d * (e - 1) * (s + 1) for d, e, s in zip(dims, eta, xi))

    # sum_r sgn(c_r c_(r-1)) per embedding, from the exact matrices
    by_columns = 0
    for j, d in enumerate(dims):
        count = 0
        for gamma in matrices:
            product = gamma.a * gamma.c
            if not product.is_zero():
                count += product.signs()[j]
        by_columns += d * count
    if by_columns != total:
        raise ConsistencyError('sign sum %d disagrees with %d' % (by_columns, total))

    rho = cmath.exp(-2j * cmath.pi * total / 8.0)
    for height in heights:
        numeric = rho_numeric(matrices, dims, height)
        if abs(numeric - rho) > 1e-3:
            raise ConsistencyError(
                'numeric rho %r at height %g differs from %r' % (numeric, height, rho)
            )
    if abs(rho.imag) < 1e-15:
        rho = complex(round(rho.real), 0.0)
    return rho, total


def orbit_points(z, matrices):
    """gamma_r z followed by S gamma_r z for every matrix."""
    z = np.asarray(z, dtype=complex)
    inner = [gamma.act(z) for gamma in matrices]
    return inner + [-1.0 / w for w in inner]


def genericity_check(field, z, matrices, tau_sep=None):
    """True iff all points gamma_r z and S gamma_r z are pairwise separated."""
    tau_sep = default_config.tau_sep if tau_sep is None else tau_sep
    z = np.asarray(z, dtype=complex)
    if z.shape != (field.degree,):
        raise InvalidInputError('point must have %d coordinates' % field.degree)
    points = np.array(orbit_points(z, matrices))
    for i in range(len(points)):
        gaps = np.max(np.abs(points[i + 1:] - points[i]), axis=1)
        if len(gaps) and np.min(gaps) <= tau_sep:
            return False
    return True


def sample_generic_point(field, matrices, rng=None, delta=None, box=(0.5, 2.0), attempts=200, accept=None):
    """Rejection-sample z with Im(delta_j z_j) in box until it is generic."""
    rng = rng if rng is not None else np.random.default_rng()
    n = field.degree
    signs = np.array(delta or (1,) * n, dtype=float)
    for _ in range(attempts):
        z = rng.uniform(-0.5, 0.5, n) + 1j * signs * rng.uniform(box[0], box[1], n)
        if not genericity_check(field, z, matrices):
            continue
        if accept is not None and not accept(z):
            continue
        return z
    raise GenericityError('no generic point found in %d attempts' % attempts)


def build_sphere_function(field, dims, a, b, x, y, z, epsilon, matrices=None, config=None):
    """Radial eigenfunction of the Fourier transform vanishing on sqrt(O_K dual).

    The combination is sum_r lambda_(r-1) (g(gamma_(r-1) z) - g(S gamma_r z))
    with lambda_0 = 1 and lambda_k = (-epsilon)^k prod_(i <= k) mu(gamma_i z).
    """
    config = config or default_config
    dims = _check_dims(dims, field.degree)
    if epsilon not in (1, -1):
        raise InvalidInputError('epsilon must be +1 or -1')
    if matrices is None:
        matrices, _ = gamma_matrices(a, b, x, y)
    z = np.asarray(z, dtype=complex)
    if z.shape != (field.degree,) or np.any(z.imag <= 0):
        raise PreconditionError('z must lie in the upper half-plane in every coordinate')

    rho, _ = rho_constant(matrices, dims)
    if abs(rho - 1) > 1e-12:
        raise ConsistencyError('rho = %r, expected 1' % (rho,))
    if not genericity_check(field, z, matrices, config.tau_sep):
        raise GenericityError('point %r is not generic' % (z,))

    points = [gamma.act(z) for gamma in matrices]
    factors = [mu(w, dims) for w in points]
    product = np.prod(factors)
    if abs(product - 1) > 1e-8:
        raise ConsistencyError('prod mu(gamma_r z) = %r at %r' % (product, z))

    lam = [1.0 + 0.0j]
    for k in range(1, 8):
        lam.append(-epsilon * lam[-1] * factors[k])

    terms = []
    for r in range(8):
        terms.append((lam[r - 1], tuple(points[r - 1])))
        terms.append((-lam[r - 1], tuple(-1.0 / points[r])))
    log.debug('sphere function at %s: max |lambda| = %.3g', z, max(abs(v) for v in lam))
    return GaussianCombo(dims, None, terms)


def slash_factors(ctx, matrices, z, threads=1):
    """(j_theta(gamma_r, z), j_theta(S gamma_r, z)) for every r, plus the cocycle residual.

    S gamma_r = T^(2 beta_r) gamma_(r-1) forces j(S gamma_r) = j(gamma_(r-1)).
    """
    z = np.asarray(z, dtype=complex)
    theta_z = theta(ctx, z)

    def factor(gamma):
        return j_theta(ctx, gamma, z, theta_z)

    inner = parallel_map(factor, matrices, threads)
    outer = [j_theta_s(ctx, gamma.act(z)) * j for gamma, j in zip(matrices, inner)]
    residual = max(
        abs(outer[r] - inner[r - 1]) / max(abs(inner[r - 1]), 1e-300) for r in range(8)
    )
    return inner, outer, residual


def build_ellipsoid_function(ctx, matrices, z, epsilon, dims=None, config=None, factors=None):
    """(g_delta | (1 + epsilon S) A)(z), vanishing on E(c, a).

    A = sum gamma_r for epsilon = -1 and sum (-1)^r gamma_r for epsilon = +1.
    """
    config = config or ctx.config
    field = ctx.field
    n = field.degree
    if dims is not None and tuple(dims) != (1,) * n:
        raise InvalidInputError('ellipsoid functions are built for dims (1, ..., 1) only')
    if epsilon not in (1, -1):
        raise InvalidInputError('epsilon must be +1 or -1')
    z = np.asarray(z, dtype=complex)
    if z.shape != (n,) or not ctx.in_domain(z):
        raise PreconditionError('z must lie in H_delta for delta = %s' % (ctx.delta,))
    if not genericity_check(field, z, matrices, config.tau_sep):
        raise GenericityError('point %r is not generic' % (z,))

    if factors is None:
        factors = slash_factors(ctx, matrices, z, config.threads)
    inner, outer, residual = factors
    if residual > COCYCLE_TOLERANCE:
        raise ConsistencyError('cocycle residual %.3g at %r' % (residual, z))

    signs = [1] * 8 if epsilon == -1 else [(-1) ** r for r in range(8)]
    terms = []
    for r, gamma in enumerate(matrices):
        w = gamma.act(z)
        terms.append((signs[r] / inner[r], tuple(w)))
        terms.append((epsilon * signs[r] / outer[r], tuple(-1.0 / w)))
    log.debug('ellipsoid function at %s: cocycle residual %.3g', z, residual)
    return GaussianCombo((1,) * n, ctx.delta, terms)


def _radii(points):
    if isinstance(points, PointSet):
        return points.all_points()
    return np.asarray(points, dtype=float)


def verify_vanishing(combo, points, tol=None):
    """(max |combo(p)| / max |coefficient|, argmax point) over all points."""
    radii = _radii(points)
    scale = combo.max_coefficient()
    if scale == 0.0 or not len(radii):
        return 0.0, None
    values = np.abs(combo(radii.reshape(-1, len(combo.dims))))
    index = int(np.argmax(values))
    residual = float(values[index]) / scale
    if tol is not None and residual > tol:
        log.warning('vanishing residual %.3g exceeds %.3g', residual, tol)
    return residual, radii[index]


def eigen_residual(combo, epsilon, tau_z=None):
    return relative_residual(fourier(combo), combo * epsilon, tau_z)


def coefficient_matrix(functions, tau_z=None):
    """Rows are coefficient vectors over the union of all parameters."""
    tau_z = default_config.tau_z if tau_z is None else tau_z
    parameters = []
    rows = []
    for combo in functions:
        row = {}
        for c, z in simplify(combo, tau_z, 0.0).terms:
            for index, p in enumerate(parameters):
                if max(abs(u - v) for u, v in zip(p, z)) <= tau_z * max(1.0, max(abs(v) for v in z)):
                    break
            else:
                parameters.append(z)
                index = len(parameters) - 1
            row[index] = row.get(index, 0) + c
        rows.append(row)
    matrix = np.zeros((len(functions), len(parameters)), dtype=complex)
    for i, row in enumerate(rows):
        for index, c in row.items():
            matrix[i, index] = c
    return matrix


def rank_ratio(functions):
    """sigma_min / sigma_max of the coefficient matrix."""
    values = np.linalg.svd(coefficient_matrix(functions), compute_uv=False)
    if not len(values) or values[0] == 0.0:
        return 0.0
    return float(values[-1] / values[0])


def independent_family(field, dims, data, k, epsilon=1, seed=0, config=None):
    """k eigenfunctions at distinct generic points and their rank ratio."""
    config = config or default_config
    a, b, x, y = data
    matrices, _ = gamma_matrices(a, b, x, y)
    rng = np.random.default_rng(seed)
    functions, points = [], []
    while len(functions) < k:
        z = sample_generic_point(field, matrices, rng)
        if any(np.max(np.abs(z - p)) <= config.tau_sep for p in points):
            continue
        points.append(z)
        functions.append(
            build_sphere_function(field, dims, a, b, x, y, z, epsilon, matrices, config)
        )
    ratio = rank_ratio(functions)
    log.info('independent family of %d functions: rank ratio %.3g', k, ratio)
    return functions, points, ratio


def vanish_at_extra_points(functions, points):
    """Nontrivial combination of the functions that also vanishes at the points.

    All functions should share one eigenvalue, which the combination keeps.
    Returns (combo, weights, residual).
    """
    radii = _radii(points).reshape(-1, len(functions[0].dims))
    if len(functions) <= len(radii):
        raise InvalidInputError(
            'need more than %d functions to vanish at %d points' % (len(radii), len(radii))
        )
    values = np.array([combo(radii) for combo in functions]).T
    _, _, vh = np.linalg.svd(values)
    weights = np.conj(vh[-1])
    out = functions[0] * weights[0]
    for w, combo in zip(weights[1:], functions[1:]):
        out = out + combo * w
    out = simplify(out, tau_c=0.0)
    residual, _ = verify_vanishing(out, radii)
    return out, weights, residual


def _z_json(z):
    return [[float(v.real), float(v.imag)] for v in np.asarray(z, dtype=complex)]


class SphereConstruction(PipelineBase):
    """Build and verify a radial eigenfunction vanishing on sqrt(O_K dual)."""

    def __init__(self, field, dims, epsilon, m_max, z=None, seed=0, data=None, config=None, debuglevel=0, debugname='SphereConstruction'):
        super(SphereConstruction, self).__init__(debuglevel=debuglevel, debugname=debugname)
        self.field = field
        self.dims = _check_dims(dims, field.degree)
        self.epsilon = epsilon
        self.m_max = m_max
        self.z = z
        self.seed = seed
        self.data = data
        self.config = config or default_config
        self.matrices = None

    def build(self):
        if self.data is None:
            self.data = unit_data(self.field, self.config.unit_power_budget)
        a, b, x, y = self.data
        self.matrices, _ = gamma_matrices(a, b, x, y)
        if self.z is None:
            rng = np.random.default_rng(self.seed)
            self.z = sample_generic_point(self.field, self.matrices, rng)
        return build_sphere_function(
            self.field, self.dims, a, b, x, y, self.z, self.epsilon, self.matrices, self.config
        )

    def verify(self, combo):
        points = sqrt_points(inverse_different(self.field), self.m_max, self.config.threads)
        vanishing, _ = verify_vanishing(combo, points)
        eigen = eigen_residual(combo, self.epsilon, self.config.tau_z)
        rho, _ = rho_constant(self.matrices, self.dims)
        size = simplify(combo, self.config.tau_z, self.config.tau_c).max_coefficient()
        return {
            'epsilon': self.epsilon,
            'z': _z_json(self.z),
            'max_vanishing_residual': vanishing,
            'eigen_residual': eigen,
            'points_checked': len(points),
            'terms': len(combo),
            'certificates': {'det': True, 'beta_integral': True, 'rho': int(round(rho.real))},
            'passed': vanishing < SPHERE_VANISHING_TOLERANCE and eigen < SPHERE_EIGEN_TOLERANCE and size > 1e-3,
        }


class EllipsoidConstruction(PipelineBase):
    """Build and verify an eigenfunction vanishing on E(c, a)."""

    def __init__(self, c, a, epsilon, level_max, z=None, seed=0, data=None, config=None, debuglevel=0, debugname='EllipsoidConstruction'):
        super(EllipsoidConstruction, self).__init__(debuglevel=debuglevel, debugname=debugname)
        self.config = config or default_config
        self.ctx = ThetaContext(c, a, self.config)
        self.field = c.field
        self.epsilon = epsilon
        self.level_max = level_max
        self.z = z
        self.seed = seed
        self.data = data
        self.matrices = None
        self.cocycle_residual = None

    def _accept(self, z):
        try:
            return abs(theta(self.ctx, z)) > self.config.theta_min
        except VerificationError:
            return False

    def build(self):
        if self.data is None:
            self.data = unit_data(self.field, self.config.unit_power_budget)
        self.matrices, _ = gamma_matrices(*self.data)
        if self.z is None:
            rng = np.random.default_rng(self.seed)
            self.z = sample_generic_point(
                self.field, self.matrices, rng, delta=self.ctx.delta, accept=self._accept
            )
        factors = slash_factors(self.ctx, self.matrices, self.z, self.config.threads)
        self.cocycle_residual = factors[2]
        return build_ellipsoid_function(
            self.ctx, self.matrices, self.z, self.epsilon, config=self.config, factors=factors
        )

    def verify(self, combo):
        points = ellipsoid_points(self.ctx.c, self.ctx.a, self.level_max, self.config.threads)
        vanishing, _ = verify_vanishing(combo, points)
        eigen = eigen_residual(combo, self.epsilon, self.config.tau_z)
        size = simplify(combo, self.config.tau_z, self.config.tau_c).max_coefficient()
        return {
            'epsilon': self.epsilon,
            'z': _z_json(self.z),
            'max_vanishing_residual': vanishing,
            'eigen_residual': eigen,
            'cocycle_residual': self.cocycle_residual,
            'points_checked': len(points),
            'terms': len(combo),
            'certificates': {'det': True, 'beta_integral': True},
            'passed': vanishing < VANISHING_TOLERANCE and eigen < EIGEN_TOLERANCE and size > 1e-3,
        }
