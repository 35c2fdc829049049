from .brute_force import GibbsTable, brute_force_gibbs, enumerate_configurations, ising_log_weights
from .classifiers import get_classifier_by_name
from .coupling import f_beta, k_beta, k_from_log, log_f_beta, log_k_beta
from .fixed_point import (
    CriticalField,
    FixedPoint,
    coexistence,
    critical_beta0,
    critical_beta1,
    critical_field,
    homogeneous_fixed_point,
    mu_minus_root,
    mu_plus_root,
)
from .model_params import ModelParams
from .recursion import (
    RatioField,
    descendant_weight_sum,
    descendant_weights,
    full_log_ratios,
    magnetization_from_log_ratio,
    path_weight,
    r_recursion,
    root_path_weight,
    single_site_marginals,
)
from .sampling import sample_gibbs
from .tails import TailBound, TailEstimate, bound_stays_below_fixed_point, r_tail_bound_recursion, r_tail_monte_carlo
from .weights import WeightMoment, exact_level_one_weight_moment, modified_weight_moment
