"""Matrix factorizations based on induced ``l_r -> l_p`` norms.

The package extracts rank-one terms ``a b' / lam`` one at a time by
maximizing ``||X u||_p`` over the unit ``r``-sphere and deflating.  Special
cases are the taxicab (``inf -> 1``), centroid (``inf -> 2``), dominant
(``1 -> p``) and singular value (``2 -> 2``) decompositions, a family of
Euclidean MDS models, and the metric-weighted generalized SVD.
"""
from .errors import (
    DimensionMismatch,
    InvalidDissimilarity,
    MetricNotPD,
    NoConvergence,
    NoExactSolver,
    NormFactError,
    NormingOfZero,
    NotPSD,
    NotSymmetric,
    NotTranspositionInvariant,
    ParseError,
    TooLarge,
    ZeroMatrix,
)
from .factorization import (
    Decomposition,
    SymmetricDecomposition,
    decompose,
    decompose_symmetric,
    deflate,
    reconstruct,
    wedderburn_diagnostics,
)
from .gsvd import MetricPair, eigen_residuals, gsvd_decompose, gsvd_step
from .induced import (
    FactorStep,
    PowerTrace,
    SolveReport,
    exact_1_to_p,
    exact_2_to_2,
    exact_inf_to_p,
    induced_norm,
    multi_start,
    power_iterate,
    power_method,
)
from .mds import Embedding, double_center, mds_embed
from .norms import Exponent, NormingResult, conjugate, norming_functional, p_norm

__version__ = "0.1.0"
