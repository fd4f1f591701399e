"""Online state quantization shared by all agents.

The raw state is the UAV position (3-vector) plus the log-backlog scalar
d' = -log(max(D, 1)) of the previous slot (the max guards the empty-queue
case, where -log(D) is undefined).  An observation is recognized as a new
state when, for every stored state, its position differs by more than mu_q
OR its d' differs by more than mu_d; otherwise it maps to the nearest
stored state (position distance first, d' distance as tiebreak, lowest
index last).  Stored states therefore stay pairwise separated and indices
are stable once assigned.
"""

from __future__ import annotations

import math

import numpy as np


def log_backlog(total_backlog_bits: float) -> float:
    """d' = -log(max(D, 1)); zero backlog maps to 0."""
    return -math.log(max(total_backlog_bits, 1.0))


class QuantizedStateSet:
    """Growing ordered set of representative states [position, d']."""

    def __init__(self, mu_q: float, mu_d: float):
        if mu_q <= 0.0 or mu_d <= 0.0:
            raise ValueError("thresholds mu_q and mu_d must be > 0")
        self.mu_q = mu_q
        self.mu_d = mu_d
        self._pos = np.empty((0, 3))
        self._dp = np.empty(0)
        self._size = 0

    def __len__(self) -> int:
        return self._size

    @property
    def positions(self) -> np.ndarray:
        return self._pos[: self._size]

    @property
    def log_backlogs(self) -> np.ndarray:
        return self._dp[: self._size]

    def get(self, index: int) -> tuple[np.ndarray, float]:
        """Representative (position, d') of a stored state."""
        if not 0 <= index < self._size:
            raise IndexError(index)
        return self._pos[index].copy(), float(self._dp[index])

    def _append(self, pos: np.ndarray, dp: float) -> int:
        if self._size == self._pos.shape[0]:
            cap = max(64, 2 * self._pos.shape[0])
            new_pos = np.empty((cap, 3))
            new_pos[: self._size] = self._pos[: self._size]
            new_dp = np.empty(cap)
            new_dp[: self._size] = self._dp[: self._size]
            self._pos, self._dp = new_pos, new_dp
        self._pos[self._size] = pos
        self._dp[self._size] = dp
        self._size += 1
        return self._size - 1

    def quantize(self, pos, d_prime: float) -> tuple[int, bool]:
        """Map an observation to a state index, appending it when new."""
        pos = np.asarray(pos, dtype=float)
        if pos.shape != (3,) or not np.all(np.isfinite(pos)) or not math.isfinite(d_prime):
            raise ValueError("observation must be a finite 3-vector position plus finite d'")
        if self._size == 0:
            return self._append(pos, d_prime), True
        pos_d2 = np.sum((self.positions - pos) ** 2, axis=1)
        dp_dist = np.abs(self.log_backlogs - d_prime)
        close = (pos_d2 <= self.mu_q**2) & (dp_dist <= self.mu_d)
        if not close.any():
            return self._append(pos, d_prime), True
        candidates = np.flatnonzero(close)
        best_pos = candidates[pos_d2[candidates] == pos_d2[candidates].min()]
        best = best_pos[dp_dist[best_pos] == dp_dist[best_pos].min()]
        return int(best[0]), False

    # pickling: keep only occupied slots
    def __getstate__(self):
        return {
            "mu_q": self.mu_q,
            "mu_d": self.mu_d,
            "pos": self.positions.copy(),
            "dp": self.log_backlogs.copy(),
        }

    def __setstate__(self, state):
        self.mu_q = state["mu_q"]
        self.mu_d = state["mu_d"]
        self._pos = state["pos"]
        self._dp = state["dp"]
        self._size = self._pos.shape[0]
