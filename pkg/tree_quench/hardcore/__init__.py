from .dynamics import hc_coupled_simulate, hc_estimate_rho, hc_sandwich_simulate, hc_simulate
from .hard_core_model import (
    HardCoreModel,
    HCConfig,
    hc_heat_bath_occupy_probability,
    hc_order_leq,
    is_independent_set,
    occupied_edges,
)
from .hc_params import HCParams
from .recursion import (
    HCRatioField,
    hc_brute_force_gibbs,
    hc_fixed_point_ratios,
    hc_full_ratios,
    hc_lambda_c,
    hc_mu_even_root,
    hc_mu_odd_root,
    hc_r_recursion,
    hc_single_site_marginals,
    occupation_from_ratio,
)
from .sampling import DominationCheck, hc_domination_check, hc_sample_gibbs, hc_sample_nu
from .tails import HCTailBound, hc_tail_recursion
