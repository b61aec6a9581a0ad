"""Multiple jump MCMC for Bayesian inference on binary model spaces."""

from .chain import (ChainTrace, MaxJumpCap, RateVector, compute_rates, mh_corrected_step,
                    mj_step, run_bd, run_mh, run_mj_mcmc)
from .schedules import EpsilonSchedule, evaluate_schedule, parse_schedule
from .state import BinaryModel

__version__ = "0.1.0"

__all__ = [
    "BinaryModel", "RateVector", "MaxJumpCap", "ChainTrace", "EpsilonSchedule",
    "evaluate_schedule", "parse_schedule", "compute_rates", "mj_step", "run_mj_mcmc",
    "run_bd", "mh_corrected_step", "run_mh",
]
