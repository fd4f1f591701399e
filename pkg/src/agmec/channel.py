"""Uplink channel models and packetized rate quantization.

Terrestrial UE-to-BS links use a block-fading model: gains stay constant
within a timeslot and are redrawn independently across slots,

    |h|^2 = |Gamma|^2 * g0 * d^(-beta),

with |Gamma|^2 unit-mean exponential (squared Rayleigh) and g0 the linear
large-scale gain at the 1 m reference distance.

UE-to-UAV links follow the probabilistic line-of-sight model: with
elevation-angle-dependent probability

    P_los = 1 / (1 + a * exp(-b * (theta_deg - a)))

the link is LoS with gain g0 * d^(-2) and no small-scale fading; otherwise
it is NLoS with the same Rayleigh-faded law as the terrestrial link.  The
angle enters in degrees: the a=9.61 / b=0.16 calibration is a degree-based
model and radian angles make the probability non-physical.

The achievable rate is B * log2(1 + gain * P / sigma_n^2); bits are carried
in packets of delta_b bits, so a slot of duration tau delivers
delta_b * floor(R * tau / delta_b) bits, further capped by what the sender
has buffered (a partial final packet is allowed so small residual buffers
can drain).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    """Physical-layer constants shared by every link."""

    ref_pathloss_db: float = 39.0  # large-scale loss at 1 m, dB
    beta: float = 2.6              # pathloss exponent
    los_a: float = 9.61
    los_b: float = 0.16
    bandwidth_hz: float = 6e6
    noise_power_w: float = 1e-12   # -90 dBm
    tx_power_w: float = 1.0        # 30 dBm per UE

    def __post_init__(self):
        for key in ("beta", "los_a", "los_b", "bandwidth_hz", "noise_power_w", "tx_power_w"):
            if getattr(self, key) <= 0.0:
                raise ValueError(f"ChannelParams.{key} must be > 0, got {getattr(self, key)}")

    @property
    def ref_gain(self) -> float:
        """Linear power gain at the 1 m reference distance."""
        return 10.0 ** (-self.ref_pathloss_db / 10.0)


def terrestrial_gain(params: ChannelParams, distance_m: float, rng: np.random.Generator) -> float:
    """Block-fading channel power gain |Gamma|^2 * g0 * d^(-beta).

    Draws one unit-mean exponential fading realization from ``rng``.
    """
    if distance_m <= 0.0:
        raise ValueError(f"distance_m must be > 0, got {distance_m}")
    fade = rng.exponential()
    return fade * params.ref_gain * distance_m ** (-params.beta)


def los_probability(altitude_m: float, r_horizontal_m: float, params: ChannelParams) -> float:
    """LoS probability for a ground-to-air link; r = 0 maps to a 90 deg angle."""
    if altitude_m <= 0.0:
        raise ValueError(f"altitude_m must be > 0, got {altitude_m}")
    if r_horizontal_m < 0.0:
        raise ValueError(f"r_horizontal_m must be >= 0, got {r_horizontal_m}")
    theta_deg = math.degrees(math.atan2(altitude_m, r_horizontal_m))
    return 1.0 / (1.0 + params.los_a * math.exp(-params.los_b * (theta_deg - params.los_a)))


def air_gain(
    params: ChannelParams,
    uav_pos,
    ue_pos,
    rng: np.random.Generator,
    fading_rng: np.random.Generator | None = None,
) -> float:
    """Probabilistic-LoS channel power gain between a UE and the UAV.

    Draw order is fixed: one uniform for the LoS Bernoulli from ``rng``,
    then one exponential fading draw from ``fading_rng`` (or ``rng`` when
    not given).  Both draws always happen, so the stream advances the same
    way on either branch.
    """
    uav_pos = np.asarray(uav_pos, dtype=float)
    ue_pos = np.asarray(ue_pos, dtype=float)
    delta = uav_pos - ue_pos
    d = float(np.linalg.norm(delta))
    if d <= 0.0:
        raise ValueError("UAV and UE positions coincide")
    r_horizontal = float(np.linalg.norm(delta[:2]))
    altitude = abs(float(delta[2]))
    p_los = los_probability(altitude, r_horizontal, params)
    u = rng.random()
    fade = (fading_rng if fading_rng is not None else rng).exponential()
    if u < p_los:
        return params.ref_gain * d**-2.0
    return fade * params.ref_gain * d ** (-params.beta)


def achievable_rate(gain: float, params: ChannelParams) -> float:
    """Shannon rate B * log2(1 + gain * P / sigma_n^2) in bits/s."""
    if gain < 0.0:
        raise ValueError(f"gain must be >= 0, got {gain}")
    return params.bandwidth_hz * math.log2(1.0 + gain * params.tx_power_w / params.noise_power_w)


def deliverable_bits(rate: float, tau: float, delta_b: float, buffered: float) -> float:
    """Bits deliverable in one slot: delta_b * floor(rate*tau/delta_b), capped by the buffer."""
    if rate < 0.0 or tau < 0.0 or delta_b <= 0.0 or buffered < 0.0:
        raise ValueError("deliverable_bits arguments out of range")
    packet_budget = delta_b * math.floor(rate * tau / delta_b)
    return min(packet_budget, buffered)
