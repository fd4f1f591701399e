"""Air-ground cooperative MEC: one UAV-mounted edge server, one BS edge
server, M user devices producing task bits every timeslot.

The package has four layers:

* environment (``channel``, ``queues``, ``tasks``, ``env``) -- seeded,
  deterministic physics: fading channels, FIFO processing queues, energy
  accounting, periodic task production;
* kernel learner (``quantizer``, ``kernel``, ``kernel_agent``) -- the
  distributed multi-objective R-learning agent with Gaussian-kernel
  action values, ALD dictionary growth and n-step return;
* DNN baseline (``mlp``, ``replay``, ``dnn_agent``) -- from-scratch
  fully-connected Q networks with experience replay, target networks and
  Adam;
* harness (``config``, ``runner``, ``sweep``, ``checkpoint``, ``cli``) --
  seeded experiment execution, CSV metrics, sweeps and timing benchmarks.
"""

from agmec.channel import ChannelParams
from agmec.config import SimConfig, load_config
from agmec.env import MecEnv, EnvState, StepOutcome, RewardVector
from agmec.runner import Simulation, run_experiment

__all__ = [
    "ChannelParams",
    "SimConfig",
    "load_config",
    "MecEnv",
    "EnvState",
    "StepOutcome",
    "RewardVector",
    "Simulation",
    "run_experiment",
]

__version__ = "0.1.0"
