"""Estimation of pairwise comparison matrices under stochastic transitivity."""
from .classes import (
    Verdict,
    classify,
    is_high_snr,
    is_mst,
    is_sst,
    is_wst,
    parametric_necessary_check,
    refute_full_membership,
)
from .core import (
    Permutation,
    ProbabilityMatrix,
    WeightVector,
    frobenius_distance_sq,
    permute,
    validate_probability_matrix,
)
from .generators import (
    GeneratorSpec,
    fixture,
    gen_bad_matrix,
    gen_high_snr,
    gen_independent_bands,
    gen_noiseless,
    gen_parametric,
    gen_uniform,
    generate,
    marginals_of_ranking_distribution,
)
from .harness import ExperimentSpec, TrialRecord, run_experiment, summarize
from .lse import (
    BivariateIsotonicRegression,
    FasConfig,
    IsotonicConfig,
    LeastSquaresSST,
    TwoStageSST,
    bivariate_isotonic_project,
    fas_permutation,
    lse_sst_bruteforce,
    two_stage_estimate,
)
from .metrics import kemeny, kl_divergence, normalized_mse, reweighted_footrule, spearman_footrule
from .observation import (
    LinearizedObservation,
    ObservationMatrix,
    linearize_partial,
    sample_full,
    sample_partial,
)
from .parametric import MleConfig, ParametricMLE, induce_matrix, mle_fit, mle_matrix_estimate
from .svt import (
    SVTEstimator,
    noiseless_spectrum_check,
    rank_s_tail_bound_check,
    soft_threshold_singulars,
    svt_estimate,
)

__version__ = "0.1.0"
