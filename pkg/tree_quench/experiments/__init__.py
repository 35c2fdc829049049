from .minus_paths import (
    DiscrepancyTravel,
    MinusPathResult,
    MinusPathScan,
    discrepancy_travel,
    minus_path_bound,
    minus_path_events,
    minus_path_probability,
    minus_path_scan,
)
from .contraction import ContractionResult, contraction_experiment, weight_window, weighted_distance
from .decomposition import DecompositionResult, decomposition_depth, quench_decomposition
from .experiment_spec import MODELS, REGIMES, ExperimentSpec, RunManifest, Table, code_version, write_run
from .phase_diagram import PhaseDiagram, asymptotic_critical_field, phase_diagram_scan
from .quench import QuenchResult, hc_quench_convergence, quench_convergence
from .validation import CHECKS, CheckResult, ValidationReport, ValidationSizes, run_validation
