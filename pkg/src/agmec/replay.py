"""Experience replay: a fixed-capacity ring buffer with uniform sampling."""

from __future__ import annotations

import numpy as np


class ReplayBuffer:
    """Transitions (s, a, r, s') with a two-component reward vector."""

    def __init__(self, capacity: int, state_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.states = np.zeros((capacity, state_dim))
        self.actions = np.zeros(capacity, dtype=int)
        self.rewards = np.zeros((capacity, 2))
        self.next_states = np.zeros((capacity, state_dim))
        self._size = 0
        self._head = 0

    def __len__(self) -> int:
        return self._size

    def push(self, state, action: int, reward, next_state) -> None:
        i = self._head
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_states[i] = next_state
        self._head = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, n: int, rng: np.random.Generator):
        """Uniform sample (with replacement) over occupied slots."""
        if self._size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(self._size, size=n)
        return (
            self.states[idx],
            self.actions[idx],
            self.rewards[idx],
            self.next_states[idx],
        )
