# coding=utf-8
from .matrices import Mat2K, KeyEquationError, S, T, V, M, identity, gamma_matrices, unit_data
from .theta import ThetaContext, ThetaZeroError, ThetaBudgetError, theta, j_theta, j_theta_s
from .construct import (
    GenericityError,
    ConsistencyError,
    rho_constant,
    argument_limit,
    build_sphere_function,
    build_ellipsoid_function,
    verify_vanishing,
    genericity_check,
    independent_family,
    vanish_at_extra_points,
    SphereConstruction,
    EllipsoidConstruction,
)
