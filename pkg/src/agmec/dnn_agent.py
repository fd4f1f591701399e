"""Fully-connected-network baseline agent.

Each agent approximates the two action values with separate MLPs (state
input, one output head per action), trained by minibatch TD regression

    y_k = r_{k+1} + gamma_r * max_a Q(s~_{k+1}, a; w-)

against a periodically hard-copied target network, with Adam and uniform
experience replay.  Action selection reuses the kernel agent's scalarized
argmax and visit-table epsilon-greedy over the same quantized state, so
the comparison isolates the value-approximation machinery.  Unlike the
kernel agent there is no average-reward estimate: the targets above are
plain discounted returns.

Network inputs are the quantized state normalized in place: position
divided by the arena extents (altitude by itself), d' divided by a running
max of |d'|.
"""

from __future__ import annotations

import numpy as np

from agmec.kernel_agent import VisitTable
from agmec.mlp import Adam, Mlp
from agmec.replay import ReplayBuffer

STATE_DIM = 4  # [x, y, z, d'] after normalization


def td_targets(
    rewards: np.ndarray,
    next_states: np.ndarray,
    target_net: Mlp,
    gamma_r: float,
    objective: str,
) -> np.ndarray:
    """One TD target per sample from the objective's own reward component."""
    if objective not in ("e", "d"):
        raise ValueError(f"objective must be 'e' or 'd', got {objective!r}")
    r = rewards[:, 0] if objective == "e" else rewards[:, 1]
    q_next = target_net.forward(next_states)
    return r + gamma_r * q_next.max(axis=1)


def train_step(
    net: Mlp,
    target_net: Mlp,
    buffer: ReplayBuffer,
    adam: Adam,
    batch_size: int,
    gamma_r: float,
    objective: str,
    rng: np.random.Generator,
) -> float | None:
    """One Adam step on the mean-squared TD loss; None while the buffer is underfull."""
    if len(buffer) < batch_size:
        return None
    states, actions, rewards, next_states = buffer.sample(batch_size, rng)
    y = td_targets(rewards, next_states, target_net, gamma_r, objective)
    out, acts = net.forward_cached(states)
    picked = out[np.arange(batch_size), actions]
    err = picked - y
    loss = float(np.mean(err**2))
    dout = np.zeros_like(out)
    dout[np.arange(batch_size), actions] = 2.0 * err / batch_size
    grads_w, grads_b = net.backward(acts, dout)
    adam.step(net.params(), grads_w + grads_b)
    return loss


def sync_target(net: Mlp, target_net: Mlp, period: int, step: int) -> bool:
    """Hard-copy the online net into the target every ``period`` train steps."""
    if period < 1:
        raise ValueError("period must be >= 1")
    if step % period == 0:
        target_net.copy_from(net)
        return True
    return False


class DnnAgent:
    """Drop-in replacement for KernelAgent with network value approximation."""

    def __init__(
        self,
        num_actions: int,
        hidden_sizes: list[int],
        gamma_r: float,
        w_r: np.ndarray,
        rng: np.random.Generator,
        init_rng: np.random.Generator,
        replay_rng: np.random.Generator,
        arena_xy: tuple[float, float],
        altitude_m: float,
        replay_capacity: int = 10_000,
        batch_size: int = 64,
        target_sync_period: int = 100,
        adam_lr: float = 1e-3,
    ):
        sizes = [STATE_DIM] + list(hidden_sizes) + [num_actions]
        self.num_actions = num_actions
        self.net_e = Mlp(sizes, init_rng)
        self.net_d = Mlp(sizes, init_rng)
        self.target_e = self.net_e.clone()
        self.target_d = self.net_d.clone()
        self.adam_e = Adam(self.net_e.params(), lr=adam_lr)
        self.adam_d = Adam(self.net_d.params(), lr=adam_lr)
        self.buffer = ReplayBuffer(replay_capacity, STATE_DIM)
        self.batch_size = batch_size
        self.target_sync_period = target_sync_period
        self.gamma_r = gamma_r
        self.w_r = np.asarray(w_r, dtype=float)
        self.rng = rng
        self.replay_rng = replay_rng
        self.visits = VisitTable(num_actions)
        self.arena_xy = arena_xy
        self.altitude_m = altitude_m
        self.dp_scale = 1.0  # running max of |d'|
        self.train_steps = 0
        self.last_loss_e = 0.0
        self.last_loss_d = 0.0
        self.last_explored = False
        self._pending: tuple[np.ndarray, int, bool] | None = None

    # ------------------------------------------------------------------
    def normalize(self, pos, dp: float) -> np.ndarray:
        pos = np.asarray(pos, dtype=float)
        return np.array(
            [
                pos[0] / self.arena_xy[0],
                pos[1] / self.arena_xy[1],
                pos[2] / self.altitude_m,
                dp / self.dp_scale,
            ]
        )

    def on_new_state(self) -> None:
        self.visits.append_row()

    def scalarized_values(self, x: np.ndarray) -> np.ndarray:
        return self.w_r[0] * self.net_e.forward(x) + self.w_r[1] * self.net_d.forward(x)

    def select_action(self, x: np.ndarray) -> int:
        return int(np.argmax(self.scalarized_values(x)))

    def act(self, j: int, pos, dp: float, epsilon: float) -> int:
        """Visit-table epsilon-greedy, identical mechanics to the kernel agent."""
        self.dp_scale = max(self.dp_scale, abs(dp))
        x = self.normalize(pos, dp)
        eps_x = self.rng.random()
        unvisited = self.visits.unvisited(j)
        if eps_x < epsilon and unvisited.size > 0:
            action = int(unvisited[self.rng.integers(unvisited.size)])
            explored = True
        else:
            action = self.select_action(x)
            explored = False
        self.visits.mark(j, action)
        self.last_explored = explored
        self._pending = (x, action, explored)
        return action

    def learn(self, reward: np.ndarray, next_pos, next_dp: float, horizon: int | None = None) -> None:
        if self._pending is None:
            raise RuntimeError("learn() called without a preceding act()")
        x, action, _ = self._pending
        self._pending = None
        self.dp_scale = max(self.dp_scale, abs(next_dp))
        x_next = self.normalize(next_pos, next_dp)
        self.buffer.push(x, action, np.asarray(reward, dtype=float), x_next)
        loss_e = train_step(
            self.net_e, self.target_e, self.buffer, self.adam_e,
            self.batch_size, self.gamma_r, "e", self.replay_rng,
        )
        loss_d = train_step(
            self.net_d, self.target_d, self.buffer, self.adam_d,
            self.batch_size, self.gamma_r, "d", self.replay_rng,
        )
        if loss_e is not None:
            self.train_steps += 1
            self.last_loss_e = loss_e
            self.last_loss_d = loss_d if loss_d is not None else 0.0
            sync_target(self.net_e, self.target_e, self.target_sync_period, self.train_steps)
            sync_target(self.net_d, self.target_d, self.target_sync_period, self.train_steps)

    @property
    def dict_sizes(self) -> tuple[float, float]:
        """Metrics slot shared with the kernel agent: last minibatch losses."""
        return self.last_loss_e, self.last_loss_d
