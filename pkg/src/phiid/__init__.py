"""Random infinite divisibility: phi-ID laws, their count families and limit checks."""

from .charfn import (
    CompoundPoisson,
    PhiIdLaw,
    SemiStable,
    Stable,
    cf_eval,
    empirical_cf,
)
from .counts import CountModel, HarrisModel, count_sample, pgf_eval
from .laplace import Degenerate, Exponential, Gamma, Mixture, lt_eval, lt_inverse
from .report import ConvergenceReport
from .sampler import sample_phi_id, sample_random_sum, sample_stable

__all__ = [
    "CompoundPoisson", "PhiIdLaw", "SemiStable", "Stable", "cf_eval", "empirical_cf",
    "CountModel", "HarrisModel", "count_sample", "pgf_eval",
    "Degenerate", "Exponential", "Gamma", "Mixture", "lt_eval", "lt_inverse",
    "ConvergenceReport", "sample_phi_id", "sample_random_sum", "sample_stable",
]
