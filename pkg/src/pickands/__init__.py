"""Monte Carlo estimation of Pickands constants for fractional Brownian
motion: exact circulant-embedding sampling, sup/sum ratio and
probability-representation estimators, a deterministic error-bound
engine, and mesh-bias regression extrapolation."""

from .bounds import (
    BoundParams,
    IntervalReport,
    interval,
    lower_bound,
    upper_bound,
)
from .estimator import (
    EstimateRow,
    EstimatorConfig,
    change_of_measure_check,
    estimate_albin,
    estimate_eta_sweep,
    estimate_ratio,
)
from .exceptions import (
    EmbeddingError,
    NumericalError,
    ParameterError,
    PickandsError,
    PreconditionError,
)
from .fgn import (
    CirculantSpectrum,
    FbmPath,
    GridSpec,
    SeedVector,
    build_two_sided_fbm,
    cholesky_oracle_sample,
    circulant_spectrum,
    fgn_autocov,
    sample_unit_fgn,
    seed_vector,
)
from .identity import identity_integral
from .pathfun import PathFunctionals, ZPath, functionals, z_from_fbm
from .regress import EtaScalingFit, fit_eta_scaling, predict

__version__ = "0.1.0"
