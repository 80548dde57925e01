# coding=utf-8
from .common import (
    SqrlatError,
    InvalidInputError,
    PreconditionError,
    SearchBudgetError,
    VerificationError,
    Config,
    default_config,
    setup_logging,
)
from .numfield import NumberField, FieldElement, make_quadratic_field, make_monogenic_field
from .idlat import FractionalIdeal, PointSet, inverse_different, sqrt_points, ellipsoid_points
from .gausscomb import GaussianCombo
from .pipeline import PipelineBase
from .grouplab import Lattice, LatticePair, verify_relation, free_product_probe, commutator_sequence
from .hecke import HeckeWord, SeriesConfig, InterpolationCheck, series_F, coefficients

__version__ = '0.1.0'
