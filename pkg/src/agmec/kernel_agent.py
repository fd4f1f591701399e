"""Distributed multi-objective R-learning agent with kernel action values.

Each agent m owns its action space (8 flight directions for the UAV agent,
3 offload choices for a UE agent), two ALD-grown kernel dictionaries and
weight vectors (one per objective), an average-reward estimate, and a ring
buffer of the last n rewards.  All agents share the quantized state set
and the global two-component reward.

Per slot, after the environment transition from state index j_t (action
a_t) to j_{t+1} with reward r_{t+1}:

* the n-step return G is the discounted sum of the trailing reward window
  with weight gamma^0 on the OLDEST reward and gamma^(n-1) on the newest
  (no update fires until the window is full);
* each weight vector takes a semi-gradient step on its own TD error

      w <- w + alpha * (G_i + gamma * max_a w^T f(s~_{t+1}, a)
                        - rbar_i - w^T f(s~_t, a_t)) * f(s~_t, a_t);

* the average-reward estimate updates only when a_t was NOT produced by
  exploration:

      rbar <- rbar (1 - k_r) + k_r (G + q(s~_{t+1}, a*) - q(s~_t, a_t)),

  with a* the scalarized-argmax action at s~_{t+1};
* finally both dictionaries run the ALD test on the sample (s~_t, a_t);
  a new weight entry starts at 0 so stored Q values are unchanged up to
  kernel coupling.

Exploration is the improved epsilon-greedy rule: with probability epsilon
a uniformly random action is taken from the never-visited set of the
current state's visit-table row; when that set is empty (or the epsilon
draw fails) the scalarized greedy action is used.  Either way the chosen
pair is marked visited.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from agmec.kernel import KernelDictionary, KernelScales


class VisitTable:
    """Binary state x action visit indicator, one row per quantized state."""

    def __init__(self, num_actions: int):
        self.num_actions = num_actions
        self._rows = np.zeros((0, num_actions), dtype=bool)
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def append_row(self) -> None:
        if self._size == self._rows.shape[0]:
            cap = max(64, 2 * self._rows.shape[0])
            grown = np.zeros((cap, self.num_actions), dtype=bool)
            grown[: self._size] = self._rows[: self._size]
            self._rows = grown
        self._rows[self._size] = False
        self._size += 1

    def row(self, j: int) -> np.ndarray:
        if not 0 <= j < self._size:
            raise IndexError(f"visit-table row {j} does not exist")
        return self._rows[j]

    def unvisited(self, j: int) -> np.ndarray:
        return np.flatnonzero(~self.row(j))

    def mark(self, j: int, action: int) -> None:
        self.row(j)[action] = True

    def __getstate__(self):
        return {"num_actions": self.num_actions, "rows": self._rows[: self._size].copy()}

    def __setstate__(self, state):
        self.num_actions = state["num_actions"]
        self._rows = state["rows"]
        self._size = self._rows.shape[0]


def n_step_return(
    buffer,
    gamma_r: float,
    n: int,
    t: int,
    horizon: int | None = None,
    newest_first: bool = False,
) -> np.ndarray | None:
    """Discounted trailing-window return ending at reward r_{t+1}.

    ``buffer`` holds the reward vectors for slots rho+1 .. t+1 (oldest
    first) with rho = t - n + 1.  Returns None when rho < 0 (window not yet
    full, no update fires).  With a finite ``horizon`` T the window is cut
    at T: only rewards r_{rho+1} .. r_{min(rho+n, T)} contribute.  For
    n = 1 this is exactly r_{t+1}.  ``newest_first`` flips the discount
    ordering (ablation only).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rho = t - n + 1
    if rho < 0:
        return None
    count = n if horizon is None else min(n, horizon - rho)
    if count <= 0:
        raise ValueError(f"empty return window at t={t} with horizon={horizon}")
    if len(buffer) < count:
        raise ValueError(f"buffer holds {len(buffer)} rewards, window needs {count}")
    window = list(buffer)[:count]
    if newest_first:
        window = window[::-1]
    total = np.zeros(2)
    for i, reward in enumerate(window):
        total += gamma_r**i * np.asarray(reward, dtype=float)
    return total


class KernelAgent:
    """One decision-maker: the UAV (flight directions) or a UE (offload choice)."""

    def __init__(
        self,
        action_set: np.ndarray,
        scales: KernelScales,
        mu_0: float,
        alpha: float,
        k_r: float,
        gamma_r: float,
        n_step: int,
        w_r: np.ndarray,
        rng: np.random.Generator,
        nstep_newest_first: bool = False,
    ):
        self.action_set = np.asarray(action_set, dtype=float)
        self.num_actions = self.action_set.shape[0]
        self.dict_e = KernelDictionary(scales, mu_0, self.action_set)
        self.dict_d = KernelDictionary(scales, mu_0, self.action_set)
        self.w_e = np.zeros(0)
        self.w_d = np.zeros(0)
        self.avg_reward = np.zeros(2)  # [Ebar, Dbar]
        self.alpha = alpha
        self.k_r = k_r
        self.gamma_r = gamma_r
        self.n_step = n_step
        self.w_r = np.asarray(w_r, dtype=float)
        self.rng = rng
        self.nstep_newest_first = nstep_newest_first
        self.visits = VisitTable(self.num_actions)
        self.reward_buffer: deque = deque(maxlen=n_step)
        self.slot = 0
        self.last_explored = False
        # pending transition filled by act(), consumed by learn()
        self._pending: tuple[int, np.ndarray, float, int, bool] | None = None

    # ------------------------------------------------------------------
    def on_new_state(self) -> None:
        """Grow the visit table when the shared set recognizes a new state."""
        self.visits.append_row()

    def q_value(self, which: str, pos, dp: float, action_index: int) -> float:
        """Action value w^T f([pos, dp], a) for one objective ('e' or 'd')."""
        if which == "e":
            k = self.dict_e.kernel_vector(pos, dp, action_index)
            return float(self.w_e @ k) if k.size else 0.0
        if which == "d":
            k = self.dict_d.kernel_vector(pos, dp, action_index)
            return float(self.w_d @ k) if k.size else 0.0
        raise ValueError(f"objective must be 'e' or 'd', got {which!r}")

    def scalarized_values(self, pos, dp: float) -> np.ndarray:
        """w_r^T [Q_e, Q_d] for every action, shape (A,)."""
        return self.w_r[0] * self.dict_e.q_values(self.w_e, pos, dp) + self.w_r[1] * self.dict_d.q_values(
            self.w_d, pos, dp
        )

    def select_action(self, pos, dp: float) -> int:
        """Scalarized greedy action; ties break to the lowest action index."""
        return int(np.argmax(self.scalarized_values(pos, dp)))

    def epsilon_greedy(self, j: int, pos, dp: float, epsilon: float) -> tuple[int, bool]:
        """Improved epsilon-greedy over the visit-table row j.

        One uniform is always drawn; a second draw picks uniformly among
        unvisited actions only when exploring.  The chosen pair is marked
        visited.
        """
        eps_x = self.rng.random()
        unvisited = self.visits.unvisited(j)
        if eps_x < epsilon and unvisited.size > 0:
            action = int(unvisited[self.rng.integers(unvisited.size)])
            explored = True
        else:
            action = self.select_action(pos, dp)
            explored = False
        self.visits.mark(j, action)
        return action, explored

    # ------------------------------------------------------------------
    def act(self, j: int, pos, dp: float, epsilon: float) -> int:
        """Choose the action for the current slot and remember the pair."""
        action, explored = self.epsilon_greedy(j, pos, dp, epsilon)
        self.last_explored = explored
        self._pending = (j, np.asarray(pos, dtype=float), dp, action, explored)
        return action

    def learn(self, reward: np.ndarray, next_pos, next_dp: float, horizon: int | None = None) -> None:
        """Consume reward r_{t+1} and run the per-slot updates.

        Call once per slot after act(); ``next_pos``/``next_dp`` is the
        representative of the quantized next state.
        """
        if self._pending is None:
            raise RuntimeError("learn() called without a preceding act()")
        _, pos, dp, action, explored = self._pending
        self._pending = None
        self.reward_buffer.append(np.asarray(reward, dtype=float))
        g = n_step_return(
            self.reward_buffer, self.gamma_r, self.n_step, self.slot, horizon, self.nstep_newest_first
        )
        if g is not None:
            self._update_weights(g, pos, dp, action, next_pos, next_dp)
            if not explored:
                self._update_avg_reward(g, pos, dp, action, next_pos, next_dp)
        # dictionary growth last: updates above use the pre-admission features
        if self.dict_e.ald_test(pos, dp, action)[1]:
            self.w_e = np.append(self.w_e, 0.0)
        if self.dict_d.ald_test(pos, dp, action)[1]:
            self.w_d = np.append(self.w_d, 0.0)
        self.slot += 1

    def _update_weights(self, g, pos, dp, action, next_pos, next_dp) -> None:
        f_e = self.dict_e.kernel_vector(pos, dp, action)
        q_next_e = self.dict_e.q_values(self.w_e, next_pos, next_dp)
        max_e = float(q_next_e.max()) if q_next_e.size else 0.0
        td_e = g[0] + self.gamma_r * max_e - self.avg_reward[0] - float(self.w_e @ f_e)
        self.w_e = self.w_e + self.alpha * td_e * f_e

        f_d = self.dict_d.kernel_vector(pos, dp, action)
        q_next_d = self.dict_d.q_values(self.w_d, next_pos, next_dp)
        max_d = float(q_next_d.max()) if q_next_d.size else 0.0
        td_d = g[1] + self.gamma_r * max_d - self.avg_reward[1] - float(self.w_d @ f_d)
        self.w_d = self.w_d + self.alpha * td_d * f_d

    def _update_avg_reward(self, g, pos, dp, action, next_pos, next_dp) -> None:
        a_star = self.select_action(next_pos, next_dp)
        q_next = np.array(
            [self.q_value("e", next_pos, next_dp, a_star), self.q_value("d", next_pos, next_dp, a_star)]
        )
        q_cur = np.array([self.q_value("e", pos, dp, action), self.q_value("d", pos, dp, action)])
        self.avg_reward = self.avg_reward * (1.0 - self.k_r) + self.k_r * (g + q_next - q_cur)

    # ------------------------------------------------------------------
    @property
    def dict_sizes(self) -> tuple[int, int]:
        return self.dict_e.size, self.dict_d.size
