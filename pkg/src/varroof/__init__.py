"""Quantum Fisher information via extremal pure-state ensemble decompositions.

The Fisher information of an observable in a mixed state equals four times
the smallest averaged variance over all pure-state ensembles of the state,
and the plain variance equals the largest.  This package computes both
extremal ensembles in closed form, checks them against a brute-force
ensemble optimizer, and splits parametric Fisher information into classical
and quantum parts through the symmetric logarithmic derivative.
"""

__version__ = "0.1.0"

from .ensembles import (
    GammaSet,
    PureEnsemble,
    averaged_variance,
    maximal_ensemble,
    minimal_ensemble,
    mixture_deviation,
    zero_diagonal_basis,
)
from .hermitian import (
    DensityMatrix,
    DimensionError,
    HermiticityError,
    Observable,
    PositivityError,
    SpectralDecomposition,
    TraceError,
    ValidationError,
    eigh,
    expectation,
    validate_density,
)
from .oracle import (
    OracleConfig,
    OracleResult,
    StiefelPoint,
    ensemble_from_isometry,
    haar_random_stiefel,
    oracle_max,
    oracle_min,
)
from .qfi import QfiReport, build_YH, build_ZH, qfi, variance
from .sld import (
    DegeneracyError,
    ParametrizedFamily,
    SldDecomposition,
    decompose,
    named_family,
    qfi_theta,
    rho_dot,
    sld,
)

__all__ = [
    "__version__",
    "DensityMatrix",
    "DegeneracyError",
    "DimensionError",
    "GammaSet",
    "HermiticityError",
    "Observable",
    "OracleConfig",
    "OracleResult",
    "ParametrizedFamily",
    "PositivityError",
    "PureEnsemble",
    "QfiReport",
    "SldDecomposition",
    "SpectralDecomposition",
    "StiefelPoint",
    "TraceError",
    "ValidationError",
    "averaged_variance",
    "build_YH",
    "build_ZH",
    "decompose",
    "eigh",
    "ensemble_from_isometry",
    "expectation",
    "haar_random_stiefel",
    "maximal_ensemble",
    "minimal_ensemble",
    "mixture_deviation",
    "named_family",
    "oracle_max",
    "oracle_min",
    "qfi",
    "qfi_theta",
    "rho_dot",
    "sld",
    "validate_density",
    "variance",
    "zero_diagonal_basis",
]
