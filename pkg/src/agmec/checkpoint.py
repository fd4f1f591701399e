"""Bit-exact run checkpointing.

A checkpoint is a pickled dict::

    {"format": "agmec-checkpoint", "version": 1, "seed": ..., "simulation": Simulation}

The Simulation object carries everything a resume needs: the environment
state, the shared quantized state set, every agent (dictionaries, weights,
visit tables, average-reward estimates, replay buffers, optimizer
moments), the running accumulators and all named RNG generators.  Loading
a checkpoint and continuing a run produces the same per-slot records as
the uninterrupted run, except for the wall-clock timing columns.
"""

from __future__ import annotations

import pickle

from agmec.runner import Simulation

CHECKPOINT_FORMAT = "agmec-checkpoint"
CHECKPOINT_VERSION = 1


def save_checkpoint(sim: Simulation, path: str) -> None:
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "seed": sim.seed,
        "simulation": sim,
    }
    with open(path, "wb") as fh:
        pickle.dump(payload, fh, protocol=pickle.HIGHEST_PROTOCOL)


def load_checkpoint(path: str) -> Simulation:
    with open(path, "rb") as fh:
        payload = pickle.load(fh)
    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path} is not an agmec checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ValueError(
            f"checkpoint version {payload.get('version')} unsupported (expected {CHECKPOINT_VERSION})"
        )
    return payload["simulation"]
