"""
Main package for banachsvd - spectral-like decompositions ``Tx = Σ ξₙ(x) Txₙ`` of matrices
between non-Euclidean normed spaces, built by norm-attaining deflation.

.. currentmodule:: banachsvd

.. autosummary::
    :toctree:

    spaces
    operators
    deflation

    representation
    eigen
    verify
    serialization
    config
    cli
    exc
"""

__author__ = "banachsvd contributors"
__copyright__ = "Copyright (C) 2026 banachsvd contributors"

__licence__ = "MIT"
__status__ = "Development"

from pkg_resources import DistributionNotFound, get_distribution

try:
    __version__ = get_distribution(__name__).version
except DistributionNotFound:
    # package is not installed
    pass

from banachsvd.config import DecompositionConfig, SolverConfig
from banachsvd.deflation.construction import Decomposition, DeflationStep, deflate_step, \
    run_deflation
from banachsvd.deflation.extension import hahn_banach_extend
from banachsvd.eigen import EigenDecomposition, EigenStep, eigen_deflate, fixed_point_functional, \
    make_mixed_diagonal
from banachsvd.exc import *
from banachsvd.operators.dense import DenseOperator, SubspaceBasis, annihilator_basis
from banachsvd.operators.oracle import op_norm_oracle
from banachsvd.operators.power import op_norm_power, operator_norm
from banachsvd.representation import compare_svd, reconstruct, truncation_error
# spaces
from banachsvd.spaces.duality import TieBreak, duality_select, predual_select
from banachsvd.spaces.minnorm import dist_to_subspace, min_norm_affine, solve_min_norm
from banachsvd.spaces.norms import Functional, NormKind, NormSpec, Vector
from banachsvd.verify import VerificationReport, verify_decomposition
