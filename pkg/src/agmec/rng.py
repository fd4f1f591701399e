"""Named independent random streams derived from one master seed.

Each stochastic component of a run owns a generator, so changing the agent
kind (or adding agent-side randomness) can never shift the environment's
random sequence.  The spawn order below is part of the reproducibility
contract; reordering it breaks byte-compatibility of seeded runs.
"""

from __future__ import annotations

import numpy as np

# Fixed streams, followed by one exploration stream per agent
# ("agent-0" is the UAV, "agent-1".."agent-M" are the UEs).
FIXED_STREAMS = ("env-fading", "env-los", "env-tasks", "dnn-init", "replay")


def named_streams(master_seed: int, num_agents: int) -> dict[str, np.random.Generator]:
    root = np.random.SeedSequence(master_seed)
    names = list(FIXED_STREAMS) + [f"agent-{m}" for m in range(num_agents)]
    children = root.spawn(len(names))
    return {name: np.random.default_rng(child) for name, child in zip(names, children)}
