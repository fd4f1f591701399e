"""Minimal fully-connected network with tanh hidden layers, plus Adam.

Everything is plain numpy: forward pass, backpropagation of the squared
TD loss, and the standard Adam recursion with bias correction.  Weights
initialize uniformly in +/- sqrt(6 / (fan_in + fan_out)).
"""

from __future__ import annotations

import numpy as np


class Mlp:
    """Layer sizes like [4, 64, 64, 64, A]: tanh hiddens, linear output."""

    def __init__(self, layer_sizes: list[int], rng: np.random.Generator | None = None):
        if len(layer_sizes) < 2:
            raise ValueError("need at least input and output sizes")
        self.layer_sizes = list(layer_sizes)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            if rng is None:
                w = np.zeros((fan_in, fan_out))
            else:
                w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
            self.weights.append(w)
            self.biases.append(np.zeros(fan_out))

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Batch forward pass; x is (B, din) or (din,)."""
        single = x.ndim == 1
        h = np.atleast_2d(np.asarray(x, dtype=float))
        if h.shape[1] != self.layer_sizes[0]:
            raise ValueError(f"input dim {h.shape[1]} != expected {self.layer_sizes[0]}")
        for i in range(self.num_layers - 1):
            h = np.tanh(h @ self.weights[i] + self.biases[i])
        out = h @ self.weights[-1] + self.biases[-1]
        return out[0] if single else out

    def forward_cached(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Forward pass keeping per-layer activations for backprop."""
        h = np.atleast_2d(np.asarray(x, dtype=float))
        acts = [h]
        for i in range(self.num_layers - 1):
            h = np.tanh(h @ self.weights[i] + self.biases[i])
            acts.append(h)
        out = h @ self.weights[-1] + self.biases[-1]
        return out, acts

    def backward(self, acts: list[np.ndarray], dout: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """Gradients of a scalar loss w.r.t. weights/biases given d(loss)/d(output)."""
        grads_w = [np.empty(0)] * self.num_layers
        grads_b = [np.empty(0)] * self.num_layers
        delta = np.atleast_2d(dout)
        grads_w[-1] = acts[-1].T @ delta
        grads_b[-1] = delta.sum(axis=0)
        for i in range(self.num_layers - 2, -1, -1):
            delta = (delta @ self.weights[i + 1].T) * (1.0 - acts[i + 1] ** 2)
            grads_w[i] = acts[i].T @ delta
            grads_b[i] = delta.sum(axis=0)
        return grads_w, grads_b

    # ------------------------------------------------------------------
    def copy_from(self, other: "Mlp") -> None:
        """Hard-copy parameters (target-network sync)."""
        for i in range(self.num_layers):
            self.weights[i][...] = other.weights[i]
            self.biases[i][...] = other.biases[i]

    def clone(self) -> "Mlp":
        net = Mlp(self.layer_sizes)
        net.copy_from(self)
        return net

    def params(self) -> list[np.ndarray]:
        return self.weights + self.biases

    def flat_params(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params()])

    def set_flat_params(self, flat: np.ndarray) -> None:
        offset = 0
        for p in self.params():
            p[...] = flat[offset : offset + p.size].reshape(p.shape)
            offset += p.size


class Adam:
    """Standard Adam with bias correction, one moment pair per parameter array."""

    def __init__(self, params: list[np.ndarray], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.step_count = 0

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.step_count += 1
        t = self.step_count
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m[...] = self.beta1 * m + (1.0 - self.beta1) * g
            v[...] = self.beta2 * v + (1.0 - self.beta2) * g**2
            m_hat = m / (1.0 - self.beta1**t)
            v_hat = v / (1.0 - self.beta2**t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
