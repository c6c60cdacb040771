""" radar/communication coexistence via interference alignment """
# flake8: noqa
from .version import __version__
from .bases import (
    CodingMode,
    EigenMode,
    Membership,
    Method,
    NodeKind,
    NoiseSpec,
    Scenario,
    Solution,
    TargetKind,
    UserSpec)
from .channel import CirculantChannel, DiagonalChannel, LinkSet, TargetModel, draw_link_set, make_circulant
from .feasibility import Feasibility, check_feasibility
from .solver import SolverConfig, solve_max_sinr, solve_min_leakage, sum_sinr
from .baselines import SssvspConfig, identity_baseline, sssvsp_precoder, sssvsp_solution
from .detection import DetectorConfig, RocCurve, estimate_pd, roc
from .config import ScenarioConfig, load_config, build_scenario
from .harness import run_pd_delta, run_roc, run_sinr_sweep, run_user_sweep
