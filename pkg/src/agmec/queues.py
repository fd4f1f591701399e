"""FIFO task queues and the per-slot processing step for UEs and servers.

Bits carried over from earlier slots take priority over bits produced in
the previous slot.  A processor with cycle frequency f and processing
density c (cycles/bit) drains f*tau/c bits in a full slot; processing
energy is kappa * f^3 * t_cp for the busy time t_cp.

A server receiving offloaded bits processes its carried backlog first and
then each arrival's bits in ascending UE order, all within the slot's tau
budget.  The busy time through arrival i is

    t_cp_i = min(tau, (D_prev + L_1 + ... + L_i) * c / f),

which reduces to the single-UE branching rule (pre-queue time t_pre versus
tau, own time versus the residual) when only one UE offloads.  Energy is
charged per offloading UE only for busy time not already charged to an
earlier arrival, so the server's CPU time is never double-billed.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TaskQueue:
    """Bits awaiting processing: carried backlog first, then fresh production."""

    carried_bits: float = 0.0  # unprocessed, observed at end of previous slot
    fresh_bits: float = 0.0    # produced during the previous slot, queued behind

    def __post_init__(self):
        if self.carried_bits < 0.0 or self.fresh_bits < 0.0:
            raise ValueError("queue bit counts must be >= 0")

    @property
    def total_bits(self) -> float:
        return self.carried_bits + self.fresh_bits


@dataclass(frozen=True)
class LocalStepResult:
    t_cp: float
    new_queue: TaskQueue
    energy: float
    processed_bits: float


@dataclass(frozen=True)
class ServerStepResult:
    new_queue: TaskQueue
    t_cp: dict[int, float] = field(default_factory=dict)      # per offloading UE
    energy: dict[int, float] = field(default_factory=dict)    # per offloading UE
    busy_time: float = 0.0
    processed_bits: float = 0.0


def local_process_step(queue: TaskQueue, f: float, c: float, tau: float, kappa: float) -> LocalStepResult:
    """One slot of local processing at a UE.

    If all buffered bits fit in the slot the queue empties and the CPU runs
    c*(L+D)/f seconds; otherwise it runs the full tau and f*tau/c bits leave
    the queue.  Fresh production for the next slot is injected by the
    environment afterwards, so the returned queue has fresh_bits = 0.
    """
    total = queue.total_bits
    t_hat = c * total / f
    if t_hat <= tau:
        t_cp = t_hat
        backlog = 0.0
    else:
        t_cp = tau
        backlog = total - f * tau / c
    energy = kappa * f**3 * t_cp
    return LocalStepResult(
        t_cp=t_cp,
        new_queue=TaskQueue(carried_bits=backlog, fresh_bits=0.0),
        energy=energy,
        processed_bits=total - backlog,
    )


def server_process_step(
    server_queue: TaskQueue,
    arrivals: list[tuple[int, float]],
    f: float,
    c: float,
    tau: float,
    kappa: float,
) -> ServerStepResult:
    """One slot of edge-server processing with zero or more offload arrivals.

    ``arrivals`` is a list of (ue_index, bits) sorted by ascending index;
    bits may be zero (the UE chose to offload but delivered nothing, in
    which case it is still billed for clearing the queue ahead of it, as in
    the single-UE rule).  The carried backlog drains even with no arrivals,
    but energy is only attributed to offloading UEs.
    """
    indices = [ue for ue, _ in arrivals]
    if indices != sorted(indices) or len(set(indices)) != len(indices):
        raise ValueError(f"arrivals must be sorted by unique ascending ue_index, got {indices}")
    for ue, bits in arrivals:
        if bits < 0.0:
            raise ValueError(f"negative arrival bits for UE {ue}")

    cumulative = server_queue.total_bits
    charged_through = 0.0
    t_cp: dict[int, float] = {}
    energy: dict[int, float] = {}
    for ue, bits in arrivals:
        cumulative += bits
        busy = min(tau, cumulative * c / f)
        t_cp[ue] = busy
        energy[ue] = kappa * f**3 * (busy - charged_through)
        charged_through = busy

    total = server_queue.total_bits + sum(bits for _, bits in arrivals)
    backlog = max(0.0, total - f * tau / c)
    return ServerStepResult(
        new_queue=TaskQueue(carried_bits=backlog, fresh_bits=0.0),
        t_cp=t_cp,
        energy=energy,
        busy_time=min(tau, total * c / f),
        processed_bits=total - backlog,
    )
