from .driver import CouplingDriver
from .engine import EngineRun, Instance, rows_ordered, run_instances
from .ising_model import IsingModel
from .kernels import HARDCORE_KIND, ISING_KIND
from .simulation import (
    CoupledRun,
    DoublingCheck,
    Trajectory,
    cap_depth,
    coupled_simulate,
    estimate_rho,
    heat_bath_plus_probability,
    run_coupled,
    sandwich_simulate,
    simulate,
    split_run,
    truncation_depth_for_time,
    truncation_doubling_check,
)
from .spin_model import SpinModel
