from .experiments import ExperimentSpec, hc_quench_convergence, quench_convergence, run_validation
from .gibbs import ModelParams, critical_field, mu_plus_root, r_recursion
from .hardcore import HCParams
from .run_config import RunConfig
from .tree import TreeShape, build_tree
