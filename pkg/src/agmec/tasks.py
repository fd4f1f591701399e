"""Periodic per-UE task-bit production.

Each UE produces a deterministic periodic number of bits per slot (square
or triangular waveform between base_bits and peak_bits, peaking at phase
position 0) scaled by multiplicative uniform jitter.  Output is an integer
number of bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WAVEFORMS = ("square", "triangular")


@dataclass(frozen=True)
class TaskProfile:
    base_bits: float
    peak_bits: float
    period: int
    phase: int = 0
    waveform: str = "square"
    jitter_fraction: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.base_bits <= self.peak_bits:
            raise ValueError("need 0 <= base_bits <= peak_bits")
        if self.period < 1:
            raise ValueError("period must be >= 1")
        if not 0.0 <= self.jitter_fraction < 1.0:
            raise ValueError("jitter_fraction must be in [0, 1)")
        if self.waveform not in WAVEFORMS:
            raise ValueError(f"waveform must be one of {WAVEFORMS}, got {self.waveform!r}")


def waveform_value(profile: TaskProfile, t: int) -> float:
    """Deterministic (jitter-free) bits produced at slot t; peak at phase position 0."""
    pos = (t + profile.phase) % profile.period
    if profile.waveform == "square":
        return profile.peak_bits if pos < profile.period / 2 else profile.base_bits
    # triangular: linear peak -> base -> peak over one period
    frac = pos / profile.period
    return profile.base_bits + (profile.peak_bits - profile.base_bits) * (1.0 - 2.0 * min(frac, 1.0 - frac))


def generate_tasks(profile: TaskProfile, t: int, rng: np.random.Generator) -> float:
    """Bits produced at slot t with multiplicative jitter, rounded to whole bits.

    One uniform is always drawn (even with jitter 0) so the task stream
    advances identically across profiles.
    """
    if t < 0:
        raise ValueError(f"slot index must be >= 0, got {t}")
    u = rng.random()
    factor = 1.0 + profile.jitter_fraction * (2.0 * u - 1.0)
    return max(0.0, round(waveform_value(profile, t) * factor))
