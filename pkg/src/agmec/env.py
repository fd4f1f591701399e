"""The physical world: UAV motion, channels, queue dynamics, energy totals.

One call to :meth:`MecEnv.step` advances a single timeslot:

1. the UAV moves one step in the chosen cardinal direction, clipped to the
   arena;
2. every UE's BS and UAV channels are drawn from the post-move position
   (fixed order: per UE in index order, terrestrial fading first, then the
   air-link Bernoulli and fading draws -- all draws happen every slot, so
   the environment streams are identical no matter which actions agents
   pick);
3. locally-processing UEs run the local FIFO step; offloading UEs deliver
   packet-quantized bits, pay transmission energy P*L/R, and their bits
   join the target server's arrival list;
4. both servers run their FIFO step;
5. total energy E_t (transmission + processing) and total backlog D_t
   (all queues) are assembled, and the reward is [-E_t, -D_t];
6. each UE's bits produced during this slot become its fresh_bits for the
   next slot.

The step is a pure transition given (state, action, rng streams): states
are immutable values and independent seeded runs share nothing mutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from agmec.channel import (
    ChannelParams,
    achievable_rate,
    air_gain,
    deliverable_bits,
    terrestrial_gain,
)
from agmec.queues import TaskQueue, local_process_step, server_process_step
from agmec.tasks import TaskProfile, generate_tasks

# Offload choices; local processing sits at index 0 so zero-initialized
# value functions tie-break to the do-nothing-special action.
ACT_LOCAL = 0
ACT_UAV = 1
ACT_BS = 2
NUM_OFFLOAD_ACTIONS = 3

# Eight cardinal directions, 45 deg apart starting East, counterclockwise.
DIRECTIONS = np.array(
    [[math.cos(k * math.pi / 4.0), math.sin(k * math.pi / 4.0)] for k in range(8)]
)
NUM_DIRECTIONS = 8


@dataclass(frozen=True)
class Geometry:
    """Arena layout: UAV altitude and step size, BS and UE positions."""

    altitude_m: float
    arena_x_m: float
    arena_y_m: float
    uav_step_m: float
    bs_xy: tuple[float, float]
    ue_xy: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.altitude_m <= 0.0:
            raise ValueError("altitude_m must be > 0")
        if self.uav_step_m <= 0.0:
            raise ValueError("uav_step_m must be > 0")
        if self.arena_x_m <= 0.0 or self.arena_y_m <= 0.0:
            raise ValueError("arena dimensions must be > 0")

    @property
    def num_ues(self) -> int:
        return len(self.ue_xy)


@dataclass(frozen=True)
class ComputeParams:
    """CPU frequencies, switched capacitances and task constants."""

    f_ue: float = 8e8
    f_uav: float = 1.6e9
    f_bs: float = 1.8e9
    kappa_ue: float = 1e-28
    kappa_uav: float = 1e-27
    kappa_bs: float = 1e-28
    c_cycles_per_bit: float = 1e3
    tau_s: float = 2.0
    delta_b_bits: int = 1000

    def __post_init__(self):
        for key in (
            "f_ue", "f_uav", "f_bs", "kappa_ue", "kappa_uav", "kappa_bs",
            "c_cycles_per_bit", "tau_s", "delta_b_bits",
        ):
            if getattr(self, key) <= 0:
                raise ValueError(f"ComputeParams.{key} must be > 0")
        if int(self.delta_b_bits) != self.delta_b_bits:
            raise ValueError("delta_b_bits must be a positive integer")


@dataclass(frozen=True)
class RewardVector:
    """Two-objective reward [e, d] = [-total energy (J), -total backlog (bits)]."""

    e: float
    d: float

    @property
    def energy_j(self) -> float:
        return -self.e

    @property
    def backlog_bits(self) -> float:
        return -self.d

    def as_array(self) -> np.ndarray:
        return np.array([self.e, self.d])


@dataclass(frozen=True)
class EnvState:
    """Snapshot between slots: UAV position and every task queue."""

    t: int
    uav_xy: tuple[float, float]
    ue_queues: tuple[TaskQueue, ...]
    uav_queue: TaskQueue
    bs_queue: TaskQueue

    @property
    def total_backlog_bits(self) -> float:
        return (
            sum(q.total_bits for q in self.ue_queues)
            + self.uav_queue.total_bits
            + self.bs_queue.total_bits
        )


@dataclass(frozen=True)
class StepOutcome:
    """Per-slot accounting: reward plus every energy/backlog/time component."""

    reward: RewardVector
    # energies (J), indexed by UE
    trans_energy: tuple[float, ...]
    local_cp_energy: tuple[float, ...]
    server_cp_energy: tuple[float, ...]
    # backlogs (bits) at slot end
    ue_backlog: tuple[float, ...]
    uav_backlog: float
    bs_backlog: float
    # times (s), indexed by UE: processing (local or attributed server) and transmission
    t_cp: tuple[float, ...]
    t_trans: tuple[float, ...]
    # diagnostics for the conservation audit and metrics
    produced_bits: tuple[float, ...]
    processed_bits: float           # bits leaving all queues this slot
    offloaded_bits: tuple[float, ...]
    rate_used: tuple[float, ...]    # rate to the chosen server (0 when local)

    @property
    def total_energy_j(self) -> float:
        return -self.reward.e

    @property
    def total_backlog_bits(self) -> float:
        return -self.reward.d


class MecEnv:
    """Seeded discrete-timeslot environment (geometry and constants fixed)."""

    def __init__(
        self,
        channel: ChannelParams,
        geometry: Geometry,
        compute: ComputeParams,
        profiles: tuple[TaskProfile, ...],
    ):
        if len(profiles) != geometry.num_ues:
            raise ValueError("one TaskProfile per UE required")
        self.channel = channel
        self.geometry = geometry
        self.compute = compute
        self.profiles = tuple(profiles)

    # ------------------------------------------------------------------
    def initial_state(self) -> EnvState:
        g = self.geometry
        start = (g.arena_x_m / 2.0, g.arena_y_m / 2.0)
        return self.initial_state_at(start)

    def initial_state_at(self, uav_xy: tuple[float, float]) -> EnvState:
        m = self.geometry.num_ues
        return EnvState(
            t=0,
            uav_xy=(float(uav_xy[0]), float(uav_xy[1])),
            ue_queues=tuple(TaskQueue() for _ in range(m)),
            uav_queue=TaskQueue(),
            bs_queue=TaskQueue(),
        )

    # ------------------------------------------------------------------
    def move_uav(self, uav_xy: tuple[float, float], direction: int) -> tuple[float, float]:
        if not 0 <= direction < NUM_DIRECTIONS:
            raise ValueError(f"direction must be in [0, {NUM_DIRECTIONS}), got {direction}")
        g = self.geometry
        x = min(max(uav_xy[0] + g.uav_step_m * DIRECTIONS[direction, 0], 0.0), g.arena_x_m)
        y = min(max(uav_xy[1] + g.uav_step_m * DIRECTIONS[direction, 1], 0.0), g.arena_y_m)
        return (x, y)

    def draw_rates(
        self,
        uav_xy: tuple[float, float],
        fading_rng: np.random.Generator,
        los_rng: np.random.Generator,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Per-UE achievable rates to the BS and the UAV for one slot."""
        g = self.geometry
        uav_pos = np.array([uav_xy[0], uav_xy[1], g.altitude_m])
        rate_bs = np.empty(g.num_ues)
        rate_uav = np.empty(g.num_ues)
        for m, (ux, uy) in enumerate(g.ue_xy):
            d_bs = math.hypot(ux - g.bs_xy[0], uy - g.bs_xy[1])
            gain_bs = terrestrial_gain(self.channel, d_bs, fading_rng)
            gain_uav = air_gain(self.channel, uav_pos, (ux, uy, 0.0), los_rng, fading_rng)
            rate_bs[m] = achievable_rate(gain_bs, self.channel)
            rate_uav[m] = achievable_rate(gain_uav, self.channel)
        return rate_bs, rate_uav

    # ------------------------------------------------------------------
    def step(
        self,
        state: EnvState,
        action: tuple[int, tuple[int, ...]],
        fading_rng: np.random.Generator,
        los_rng: np.random.Generator,
        tasks_rng: np.random.Generator,
    ) -> tuple[EnvState, StepOutcome]:
        uav_direction, offload = action
        m_ues = self.geometry.num_ues
        if len(offload) != m_ues:
            raise ValueError(f"need {m_ues} per-UE offload choices, got {len(offload)}")
        for m, a in enumerate(offload):
            if a not in (ACT_LOCAL, ACT_UAV, ACT_BS):
                raise ValueError(f"UE {m}: offload choice must be 0 (local), 1 (UAV) or 2 (BS), got {a}")

        comp = self.compute
        chan = self.channel

        # 1-2: move, then draw all channels from the post-move position.
        new_xy = self.move_uav(state.uav_xy, uav_direction)
        rate_bs, rate_uav = self.draw_rates(new_xy, fading_rng, los_rng)

        # 3: local processing / offload transmission.
        trans_energy = [0.0] * m_ues
        local_cp_energy = [0.0] * m_ues
        t_cp = [0.0] * m_ues
        t_trans = [0.0] * m_ues
        offloaded = [0.0] * m_ues
        rate_used = [0.0] * m_ues
        ue_backlog = [0.0] * m_ues
        arrivals_uav: list[tuple[int, float]] = []
        arrivals_bs: list[tuple[int, float]] = []
        local_processed = 0.0

        for m in range(m_ues):
            queue = state.ue_queues[m]
            if offload[m] == ACT_LOCAL:
                res = local_process_step(queue, comp.f_ue, comp.c_cycles_per_bit, comp.tau_s, comp.kappa_ue)
                local_cp_energy[m] = res.energy
                t_cp[m] = res.t_cp
                ue_backlog[m] = res.new_queue.carried_bits
                local_processed += res.processed_bits
            else:
                rate = rate_uav[m] if offload[m] == ACT_UAV else rate_bs[m]
                bits = deliverable_bits(rate, comp.tau_s, comp.delta_b_bits, queue.total_bits)
                if bits > 0.0:
                    trans_energy[m] = chan.tx_power_w * bits / rate
                    t_trans[m] = bits / rate
                offloaded[m] = bits
                rate_used[m] = rate
                ue_backlog[m] = queue.total_bits - bits
                (arrivals_uav if offload[m] == ACT_UAV else arrivals_bs).append((m, bits))

        # 4: servers (arrival lists are in ascending UE order by construction).
        res_uav = server_process_step(
            state.uav_queue, arrivals_uav, comp.f_uav, comp.c_cycles_per_bit, comp.tau_s, comp.kappa_uav
        )
        res_bs = server_process_step(
            state.bs_queue, arrivals_bs, comp.f_bs, comp.c_cycles_per_bit, comp.tau_s, comp.kappa_bs
        )
        server_cp_energy = [0.0] * m_ues
        for m, e in res_uav.energy.items():
            server_cp_energy[m] = e
            t_cp[m] = res_uav.t_cp[m]
        for m, e in res_bs.energy.items():
            server_cp_energy[m] = e
            t_cp[m] = res_bs.t_cp[m]

        # 5: totals.
        total_energy = sum(trans_energy) + sum(local_cp_energy) + sum(server_cp_energy)
        total_backlog = (
            sum(ue_backlog) + res_uav.new_queue.carried_bits + res_bs.new_queue.carried_bits
        )
        reward = RewardVector(e=-total_energy, d=-total_backlog)

        # 6: production for the next slot.
        produced = [generate_tasks(self.profiles[m], state.t, tasks_rng) for m in range(m_ues)]
        new_queues = tuple(
            TaskQueue(carried_bits=ue_backlog[m], fresh_bits=produced[m]) for m in range(m_ues)
        )

        next_state = EnvState(
            t=state.t + 1,
            uav_xy=new_xy,
            ue_queues=new_queues,
            uav_queue=res_uav.new_queue,
            bs_queue=res_bs.new_queue,
        )
        outcome = StepOutcome(
            reward=reward,
            trans_energy=tuple(trans_energy),
            local_cp_energy=tuple(local_cp_energy),
            server_cp_energy=tuple(server_cp_energy),
            ue_backlog=tuple(ue_backlog),
            uav_backlog=res_uav.new_queue.carried_bits,
            bs_backlog=res_bs.new_queue.carried_bits,
            t_cp=tuple(t_cp),
            t_trans=tuple(t_trans),
            produced_bits=tuple(float(p) for p in produced),
            processed_bits=local_processed + res_uav.processed_bits + res_bs.processed_bits,
            offloaded_bits=tuple(offloaded),
            rate_used=tuple(rate_used),
        )
        return next_state, outcome
