"""Gaussian product kernel over (state, action) samples and the sparse
dictionary grown by the approximate-linear-dependence (ALD) test.

The kernel between samples x = [q, d', a] factorizes into three Gaussians
with separate length scales:

    k(x, x^) = exp(-|q - q^|^2 / 2 sigma_s1^2)
             * exp(-(d' - d^)^2 / 2 sigma_s2^2)
             * exp(-|a - a^|^2 / 2 sigma_a^2),

so k(x, x) = 1 and the Gram matrix of any admitted dictionary has a unit
diagonal.  A candidate is admitted when its feature-space least-squares
residual against the stored features,

    delta = min_lambda |sum_n lambda_n phi(x^_n) - phi(x)|^2
          = k(x, x) - k_x^T K^-1 k_x,

exceeds the threshold mu_0; K^-1 is maintained incrementally with the
rank-one block-inverse update, which keeps the per-sample cost O(N^2).
Actions always come from the agent's finite action set, so the action
factor of every kernel evaluation is served from a precomputed table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InverseConsistencyError(RuntimeError):
    """The incrementally maintained Gram inverse drifted from the truth."""


@dataclass(frozen=True)
class KernelScales:
    sigma_s1: float  # position length scale
    sigma_s2: float  # log-backlog length scale
    sigma_a: float   # action length scale

    def __post_init__(self):
        if min(self.sigma_s1, self.sigma_s2, self.sigma_a) <= 0.0:
            raise ValueError("kernel length scales must be > 0")


def kernel_eval(pos, dp, act, pos_hat, dp_hat, act_hat, scales: KernelScales) -> float:
    """Similarity in (0, 1] between two (state, action) samples."""
    pos = np.asarray(pos, dtype=float)
    pos_hat = np.asarray(pos_hat, dtype=float)
    act = np.asarray(act, dtype=float)
    act_hat = np.asarray(act_hat, dtype=float)
    if act.shape != act_hat.shape:
        raise ValueError("action vectors must come from the same action space")
    return float(
        np.exp(-np.sum((pos - pos_hat) ** 2) / (2.0 * scales.sigma_s1**2))
        * np.exp(-((dp - dp_hat) ** 2) / (2.0 * scales.sigma_s2**2))
        * np.exp(-np.sum((act - act_hat) ** 2) / (2.0 * scales.sigma_a**2))
    )


class KernelDictionary:
    """ALD-grown feature set with cached Gram inverse and action kernel table.

    ``action_set`` is the (A, adim) matrix of the agent's action encodings;
    stored features reference actions by index into it.
    """

    def __init__(self, scales: KernelScales, mu_0: float, action_set: np.ndarray):
        if mu_0 <= 0.0:
            raise ValueError("mu_0 must be > 0 (it guarantees a positive-definite Gram matrix)")
        self.scales = scales
        self.mu_0 = mu_0
        self.action_set = np.asarray(action_set, dtype=float)
        if self.action_set.ndim != 2 or self.action_set.shape[0] == 0:
            raise ValueError("action_set must be a nonempty (A, adim) matrix")
        # pairwise action kernel factors, (A, A)
        diff = self.action_set[:, None, :] - self.action_set[None, :, :]
        self.action_gram = np.exp(-np.sum(diff**2, axis=2) / (2.0 * scales.sigma_a**2))
        self._pos = np.empty((0, 3))
        self._dp = np.empty(0)
        self._act_idx = np.empty(0, dtype=int)
        self.k_inv = np.empty((0, 0))

    @property
    def size(self) -> int:
        return self._pos.shape[0]

    def feature(self, n: int) -> tuple[np.ndarray, float, int]:
        """Stored feature n as (position, d', action index)."""
        return self._pos[n].copy(), float(self._dp[n]), int(self._act_idx[n])

    # ------------------------------------------------------------------
    def state_part(self, pos, dp: float) -> np.ndarray:
        """State kernel factor against every stored feature, shape (size,)."""
        pos = np.asarray(pos, dtype=float)
        if self.size == 0:
            return np.empty(0)
        return np.exp(
            -np.sum((self._pos - pos) ** 2, axis=1) / (2.0 * self.scales.sigma_s1**2)
            - (self._dp - dp) ** 2 / (2.0 * self.scales.sigma_s2**2)
        )

    def kernel_vector(self, pos, dp: float, action_index: int) -> np.ndarray:
        """k(x, x^_n) for x = [pos, dp, action_set[action_index]], shape (size,)."""
        if self.size == 0:
            return np.empty(0)
        return self.state_part(pos, dp) * self.action_gram[self._act_idx, action_index]

    def q_values(self, weights: np.ndarray, pos, dp: float) -> np.ndarray:
        """w^T f(x) for every action in the set at once, shape (A,)."""
        if self.size == 0:
            return np.zeros(self.action_set.shape[0])
        ws = weights * self.state_part(pos, dp)
        return ws @ self.action_gram[self._act_idx]

    # ------------------------------------------------------------------
    def ald_delta(self, pos, dp: float, action_index: int) -> float:
        """Least-squares residual of the candidate against the dictionary."""
        if self.size == 0:
            return 1.0
        k_x = self.kernel_vector(pos, dp, action_index)
        return max(0.0, 1.0 - float(k_x @ self.k_inv @ k_x))

    def ald_test(self, pos, dp: float, action_index: int) -> tuple[float, bool]:
        """Admit the candidate when its residual exceeds mu_0.

        On admission the Gram inverse is extended with the rank-one block
        update and verified against a direct residual check.
        """
        pos = np.asarray(pos, dtype=float)
        if self.size == 0:
            self._pos = pos.reshape(1, 3).copy()
            self._dp = np.array([dp], dtype=float)
            self._act_idx = np.array([action_index], dtype=int)
            self.k_inv = np.array([[1.0]])
            return 1.0, True
        k_x = self.kernel_vector(pos, dp, action_index)
        u = self.k_inv @ k_x
        delta = max(0.0, 1.0 - float(k_x @ u))
        if delta <= self.mu_0:
            return delta, False
        n = self.size
        new_inv = np.empty((n + 1, n + 1))
        new_inv[:n, :n] = self.k_inv + np.outer(u, u) / delta
        new_inv[:n, n] = -u / delta
        new_inv[n, :n] = -u / delta
        new_inv[n, n] = 1.0 / delta
        self._pos = np.vstack([self._pos, pos])
        self._dp = np.append(self._dp, dp)
        self._act_idx = np.append(self._act_idx, action_index)
        self.k_inv = new_inv
        self._verify_inverse()
        return delta, True

    # ------------------------------------------------------------------
    def gram(self) -> np.ndarray:
        """Gram matrix of the stored features, built by direct kernel evaluation."""
        state_diff = np.sum((self._pos[:, None, :] - self._pos[None, :, :]) ** 2, axis=2)
        dp_diff = (self._dp[:, None] - self._dp[None, :]) ** 2
        k = np.exp(
            -state_diff / (2.0 * self.scales.sigma_s1**2)
            - dp_diff / (2.0 * self.scales.sigma_s2**2)
        )
        return k * self.action_gram[np.ix_(self._act_idx, self._act_idx)]

    def _verify_inverse(self, tol: float = 1e-6) -> None:
        residual = np.max(np.abs(self.gram() @ self.k_inv - np.eye(self.size)))
        if residual > tol:
            raise InverseConsistencyError(
                f"Gram-inverse residual {residual:.3e} exceeds {tol:.1e} at size {self.size}"
            )
