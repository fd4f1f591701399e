"""Seeded experiment execution and metrics emission.

One :class:`Simulation` advances the observe -> act -> env.step -> learn
loop a slot at a time and yields one :class:`RunRecord` per slot.  Agent
time is measured with a monotonic clock around the agent calls only
(decision = the act() calls; learning = quantizing the new observation
plus the learn() calls); environment simulation and I/O are excluded.

``run_experiment`` writes, per run directory:

* ``metrics.csv``  -- schema-versioned per-slot metrics (columns below);
* ``trajectory.csv`` -- t, x, y of the UAV after each slot's move;
* ``summary.txt``  -- resolved config hash, final averages, timing means;
* ``resolved_config.txt`` -- the full configuration, parseable back.

metrics.csv columns, in order: t, E_t_J, D_t_bits, avgE_J, avgD_bits,
uav_x_m, uav_y_m, a0..aM, explored0..exploredM, t_decide_s, t_learn_s,
dict_e_sizes, dict_d_sizes.  The last two columns carry per-agent
dictionary sizes for kernel runs and the last minibatch losses for dnn
runs, joined with '|'.  Timing columns are wall-clock and therefore not
seed-reproducible; set ``record_timing = false`` to zero them when
byte-identical output matters more than the measurement.

A running bit-conservation audit (produced = processed + buffered) is
checked every slot and aborts the run on violation.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

import numpy as np

from agmec.config import SimConfig
from agmec.dnn_agent import DnnAgent
from agmec.env import DIRECTIONS, MecEnv
from agmec.kernel import KernelScales
from agmec.kernel_agent import KernelAgent
from agmec.quantizer import QuantizedStateSet, log_backlog
from agmec.rng import named_streams

METRICS_SCHEMA = "agmec-metrics-v1"


@dataclass(frozen=True)
class RunRecord:
    t: int
    energy_j: float
    backlog_bits: float
    avg_energy_j: float
    avg_backlog_bits: float
    uav_x: float
    uav_y: float
    actions: tuple[int, ...]       # a0 = UAV direction, a1..aM = offload codes
    explored: tuple[bool, ...]
    t_decide_s: float
    t_learn_s: float
    dict_e: tuple
    dict_d: tuple


def _ue_action_vectors() -> np.ndarray:
    return np.eye(3)


class Simulation:
    """All mutable run state; picklable for bit-exact checkpoint/resume."""

    def __init__(self, config: SimConfig, seed: int):
        self.config = config
        self.seed = seed
        num_agents = config.num_ues + 1
        self.streams = named_streams(seed, num_agents)
        self.env = MecEnv(
            config.channel_params(), config.geometry(), config.compute_params(), config.profiles()
        )
        self.state = self.env.initial_state_at((config.uav_start_x, config.uav_start_y))
        self.qset = QuantizedStateSet(config.mu_q, config.mu_d)
        self.agents = self._build_agents()
        # initial observation: start position, empty queues (d' = 0)
        j0, _ = self.qset.quantize(self._uav_pos3(), log_backlog(0.0))
        for agent in self.agents:
            agent.on_new_state()
        self._j = j0
        self._rep_pos, self._rep_dp = self.qset.get(j0)
        # accumulators
        self.sum_energy = 0.0
        self.sum_backlog = 0.0
        self.produced_total = 0.0
        self.processed_total = 0.0

    # ------------------------------------------------------------------
    def _uav_pos3(self) -> np.ndarray:
        x, y = self.state.uav_xy
        return np.array([x, y, self.config.altitude_m])

    def _build_agents(self):
        cfg = self.config
        w_r = np.array([cfg.w_e, cfg.w_d])
        action_sets = [DIRECTIONS] + [_ue_action_vectors()] * cfg.num_ues
        if cfg.agent == "kernel":
            scales = KernelScales(cfg.sigma_s1, cfg.sigma_s2, cfg.sigma_a)
            return [
                KernelAgent(
                    action_set=action_sets[m],
                    scales=scales,
                    mu_0=cfg.mu_0,
                    alpha=cfg.alpha,
                    k_r=cfg.k_r,
                    gamma_r=cfg.gamma_r,
                    n_step=cfg.n_step,
                    w_r=w_r,
                    rng=self.streams[f"agent-{m}"],
                    nstep_newest_first=cfg.nstep_newest_first,
                )
                for m in range(cfg.num_ues + 1)
            ]
        hidden = [cfg.dnn_hidden_units] * cfg.dnn_hidden_layers
        return [
            DnnAgent(
                num_actions=action_sets[m].shape[0],
                hidden_sizes=hidden,
                gamma_r=cfg.gamma_r,
                w_r=w_r,
                rng=self.streams[f"agent-{m}"],
                init_rng=self.streams["dnn-init"],
                replay_rng=self.streams["replay"],
                arena_xy=(cfg.arena_x_m, cfg.arena_y_m),
                altitude_m=cfg.altitude_m,
                replay_capacity=cfg.dnn_replay_capacity,
                batch_size=cfg.dnn_batch,
                target_sync_period=cfg.dnn_target_sync,
                adam_lr=cfg.dnn_adam_lr,
            )
            for m in range(cfg.num_ues + 1)
        ]

    # ------------------------------------------------------------------
    def run_slot(self) -> RunRecord:
        cfg = self.config
        t = self.state.t
        epsilon = cfg.epsilon_at(t)
        if cfg.agent == "kernel":
            alpha = cfg.alpha_at(t)
            for agent in self.agents:
                agent.alpha = alpha

        t0 = time.perf_counter()
        actions = [agent.act(self._j, self._rep_pos, self._rep_dp, epsilon) for agent in self.agents]
        t_decide = time.perf_counter() - t0
        explored = tuple(agent.last_explored for agent in self.agents)

        env_action = (actions[0], tuple(actions[1:]))
        self.state, outcome = self.env.step(
            self.state, env_action,
            self.streams["env-fading"], self.streams["env-los"], self.streams["env-tasks"],
        )

        # bit-conservation audit: everything produced is processed or buffered
        self.produced_total += sum(outcome.produced_bits)
        self.processed_total += outcome.processed_bits
        buffered = self.state.total_backlog_bits
        if abs(self.produced_total - self.processed_total - buffered) > 1e-6:
            raise RuntimeError(
                f"bit-conservation violated at slot {t}: produced={self.produced_total} "
                f"processed={self.processed_total} buffered={buffered}"
            )

        t1 = time.perf_counter()
        dp_next = log_backlog(outcome.total_backlog_bits)
        j_next, is_new = self.qset.quantize(self._uav_pos3(), dp_next)
        if is_new:
            for agent in self.agents:
                agent.on_new_state()
        rep_pos, rep_dp = self.qset.get(j_next)
        reward_scaled = np.array(
            [outcome.reward.e * cfg.reward_scale_e, outcome.reward.d * cfg.reward_scale_d]
        )
        for agent in self.agents:
            agent.learn(reward_scaled, rep_pos, rep_dp)
        t_learn = time.perf_counter() - t1

        self._j = j_next
        self._rep_pos, self._rep_dp = rep_pos, rep_dp
        self.sum_energy += outcome.total_energy_j
        self.sum_backlog += outcome.total_backlog_bits
        slots_done = t + 1
        if not cfg.record_timing:
            t_decide = 0.0
            t_learn = 0.0
        sizes = [agent.dict_sizes for agent in self.agents]
        return RunRecord(
            t=t,
            energy_j=outcome.total_energy_j,
            backlog_bits=outcome.total_backlog_bits,
            avg_energy_j=self.sum_energy / slots_done,
            avg_backlog_bits=self.sum_backlog / slots_done,
            uav_x=self.state.uav_xy[0],
            uav_y=self.state.uav_xy[1],
            actions=tuple(actions),
            explored=explored,
            t_decide_s=t_decide,
            t_learn_s=t_learn,
            dict_e=tuple(s[0] for s in sizes),
            dict_d=tuple(s[1] for s in sizes),
        )

    def run(self, num_slots: int):
        for _ in range(num_slots):
            yield self.run_slot()


# ----------------------------------------------------------------------
def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def metrics_header(num_agents: int) -> str:
    cols = ["t", "E_t_J", "D_t_bits", "avgE_J", "avgD_bits", "uav_x_m", "uav_y_m"]
    cols += [f"a{m}" for m in range(num_agents)]
    cols += [f"explored{m}" for m in range(num_agents)]
    cols += ["t_decide_s", "t_learn_s", "dict_e_sizes", "dict_d_sizes"]
    return ",".join(cols)


def metrics_row(record: RunRecord) -> str:
    fields = [
        _fmt(record.t), _fmt(record.energy_j), _fmt(record.backlog_bits),
        _fmt(record.avg_energy_j), _fmt(record.avg_backlog_bits),
        _fmt(record.uav_x), _fmt(record.uav_y),
    ]
    fields += [_fmt(a) for a in record.actions]
    fields += [_fmt(e) for e in record.explored]
    fields += [_fmt(record.t_decide_s), _fmt(record.t_learn_s)]
    fields.append("|".join(_fmt(v) for v in record.dict_e))
    fields.append("|".join(_fmt(v) for v in record.dict_d))
    return ",".join(fields)


def read_metrics_csv(path: str) -> tuple[list[str], list[dict[str, str]]]:
    """Parse a metrics.csv back into header names and raw row dicts."""
    with open(path, "r", encoding="utf-8") as fh:
        version = fh.readline().strip()
        if version != f"# {METRICS_SCHEMA}":
            raise ValueError(f"unrecognized metrics schema line: {version!r}")
        header = fh.readline().strip().split(",")
        rows = [dict(zip(header, line.strip().split(","))) for line in fh if line.strip()]
    return header, rows


def run_experiment(config: SimConfig, seed: int, out_dir: str | None = None) -> dict:
    """Run one seeded experiment; write CSVs when out_dir is given.

    Returns a summary dict with final and long-term (final 20% of slots)
    averages and agent timing means.
    """
    sim = Simulation(config, seed)
    num_agents = config.num_ues + 1
    tail_start = config.timeslots - max(1, config.timeslots // 5)

    metrics_fh = trajectory_fh = None
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "resolved_config.txt"), "w", encoding="utf-8") as fh:
            fh.write(config.to_text())
        metrics_fh = open(os.path.join(out_dir, "metrics.csv"), "w", encoding="utf-8")
        metrics_fh.write(f"# {METRICS_SCHEMA}\n{metrics_header(num_agents)}\n")
        trajectory_fh = open(os.path.join(out_dir, "trajectory.csv"), "w", encoding="utf-8")
        trajectory_fh.write("t,x,y\n")

    decide_times = np.empty(config.timeslots)
    learn_times = np.empty(config.timeslots)
    tail_energy = 0.0
    tail_backlog = 0.0
    tail_x = 0.0
    last: RunRecord | None = None
    try:
        for record in sim.run(config.timeslots):
            decide_times[record.t] = record.t_decide_s
            learn_times[record.t] = record.t_learn_s
            if record.t >= tail_start:
                tail_energy += record.energy_j
                tail_backlog += record.backlog_bits
                tail_x += record.uav_x
            if metrics_fh is not None:
                metrics_fh.write(metrics_row(record) + "\n")
                trajectory_fh.write(f"{record.t},{_fmt(record.uav_x)},{_fmt(record.uav_y)}\n")
            last = record
    finally:
        if metrics_fh is not None:
            metrics_fh.close()
            trajectory_fh.close()

    tail_n = config.timeslots - tail_start
    summary = {
        "config_hash": config.config_hash(),
        "agent": config.agent,
        "seed": seed,
        "timeslots": config.timeslots,
        "final_avg_energy_j": last.avg_energy_j,
        "final_avg_backlog_bits": last.avg_backlog_bits,
        "longterm_avg_energy_j": tail_energy / tail_n,
        "longterm_avg_backlog_bits": tail_backlog / tail_n,
        "longterm_avg_uav_x_m": tail_x / tail_n,
        "mean_decide_s": float(decide_times.mean()),
        "mean_learn_s": float(learn_times.mean()),
        "std_decide_s": float(decide_times.std()),
        "std_learn_s": float(learn_times.std()),
    }
    if out_dir is not None:
        with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
            for key, value in summary.items():
                fh.write(f"{key}: {value}\n")
    return summary
