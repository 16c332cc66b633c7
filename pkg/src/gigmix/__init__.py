"""Three-component mixture models for separating Gaussian noise from signed
activation, with maximum-likelihood and fully analytical variational Bayes
learners, plus the k-means initialization, evaluation metrics, and synthetic
benchmark harness around them.
"""

__version__ = "0.1.0"

from .distributions import (
    GAUSSIAN,
    GAMMA_NEG,
    GAMMA_POS,
    INVGAMMA_NEG,
    INVGAMMA_POS,
    ComponentFamily,
    GaussianParams,
    MixtureParams,
    ShapeRateParams,
    log_pdf,
    mom_gamma,
    mom_invgamma,
    sample,
)
from .evaluation import (
    ComparisonTable,
    EvalReport,
    activation_map,
    paired_t_test,
    restricted_auc,
    standardize,
    win_matrix,
)
from .initialization import KMeansResult, init_mixture, kmeans_1d
from .ml_em import MLFitConfig, MLFitResult, e_step, fit_ggm, fit_gim, m_step
from .special import digamma, inv_digamma, log_gamma, tetragamma, trigamma
from .vb_em import (
    ExpectationCache,
    HyperPriors,
    SufficientStats,
    VBFitConfig,
    VBFitResult,
    VBNumericError,
    VBState,
    default_hyperpriors,
    expectations,
    fit_bggm,
    fit_bgim,
    negative_free_energy,
    sufficient_stats,
    update_mu,
    update_pi,
    update_r,
    update_responsibilities,
    update_shape,
    update_tau,
)

__all__ = [
    "__version__",
    "ComponentFamily",
    "GaussianParams",
    "ShapeRateParams",
    "MixtureParams",
    "GAUSSIAN",
    "GAMMA_POS",
    "GAMMA_NEG",
    "INVGAMMA_POS",
    "INVGAMMA_NEG",
    "log_pdf",
    "sample",
    "mom_gamma",
    "mom_invgamma",
    "log_gamma",
    "digamma",
    "trigamma",
    "tetragamma",
    "inv_digamma",
    "KMeansResult",
    "kmeans_1d",
    "init_mixture",
    "MLFitConfig",
    "MLFitResult",
    "e_step",
    "m_step",
    "fit_ggm",
    "fit_gim",
    "HyperPriors",
    "VBState",
    "ExpectationCache",
    "SufficientStats",
    "VBFitConfig",
    "VBFitResult",
    "VBNumericError",
    "default_hyperpriors",
    "update_responsibilities",
    "sufficient_stats",
    "update_pi",
    "update_mu",
    "update_tau",
    "update_r",
    "update_shape",
    "expectations",
    "negative_free_energy",
    "fit_bggm",
    "fit_bgim",
    "standardize",
    "activation_map",
    "restricted_auc",
    "paired_t_test",
    "win_matrix",
    "EvalReport",
    "ComparisonTable",
]
