from .blocks import BlockGapResult, VMCheck, block_dynamics_gap, min_block_gap, vm_mixing_check
from .gap import gap_of, lanczos_gap, spectral_gap_exact, symmetrized
from .generator import (
    GeneratorMatrix,
    build_generator,
    build_ising_generator,
    evolve,
    flip_rates,
    gibbs_vector,
    reversibility_residual,
    stationary_from_rates,
    transition_law,
)
from .log_sobolev import LogSobolevBound, logsob_upper_bound
from .state_space import StateSpace
from .variance_decay import VarianceDecay, exact_variance_decay, variance_decay_gap
