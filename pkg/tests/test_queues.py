import numpy as np
import pytest

from agmec.queues import TaskQueue, local_process_step, server_process_step

from oracles import fifo_slot_oracle


class TestTaskQueue:
    def test_total(self):
        q = TaskQueue(carried_bits=100.0, fresh_bits=50.0)
        assert q.total_bits == 150.0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            TaskQueue(carried_bits=-1.0)
        with pytest.raises(ValueError):
            TaskQueue(fresh_bits=-1.0)


class TestLocalProcessStep:
    # constants from the default parameterization: f=8e8, c=1e3, tau=2, kappa=1e-28
    F, C, TAU, KAPPA = 8e8, 1e3, 2.0, 1e-28

    def test_boundary_exact_fit(self):
        # c(L+D)/f = 1e3 * 1.6e6 / 8e8 = 2.0 s exactly
        res = local_process_step(TaskQueue(1.0e6, 0.6e6), self.F, self.C, self.TAU, self.KAPPA)
        assert res.t_cp == 2.0
        assert res.new_queue.carried_bits == 0.0
        assert res.new_queue.fresh_bits == 0.0
        assert res.energy == pytest.approx(1e-28 * (8e8) ** 3 * 2.0, rel=1e-12)
        assert res.energy == pytest.approx(0.1024, rel=1e-12)

    def test_overflow_branch(self):
        res = local_process_step(TaskQueue(2e6, 0.0), self.F, self.C, self.TAU, self.KAPPA)
        assert res.t_cp == 2.0
        assert res.new_queue.carried_bits == pytest.approx(4e5)
        assert res.processed_bits == pytest.approx(1.6e6)

    def test_empty_queue(self):
        res = local_process_step(TaskQueue(), self.F, self.C, self.TAU, self.KAPPA)
        assert res.t_cp == 0.0
        assert res.energy == 0.0
        assert res.new_queue.total_bits == 0.0

    def test_partial_slot(self):
        res = local_process_step(TaskQueue(4e5, 4e5), self.F, self.C, self.TAU, self.KAPPA)
        assert res.t_cp == pytest.approx(1.0)
        assert res.new_queue.carried_bits == 0.0
        assert res.energy == pytest.approx(1e-28 * (8e8) ** 3 * 1.0, rel=1e-12)


class TestServerProcessStep:
    def test_single_arrival_fits_in_residual(self):
        # UAV server: f=1.6e9, kappa=1e-27; no pre-queue, 1e6 bits arrive
        res = server_process_step(TaskQueue(), [(0, 1e6)], 1.6e9, 1e3, 2.0, 1e-27)
        assert res.t_cp[0] == pytest.approx(0.625, rel=1e-12)
        assert res.new_queue.carried_bits == 0.0
        assert res.energy[0] == pytest.approx(2.56, rel=1e-12)

    def test_pre_queue_exceeds_slot(self):
        # BS server: f=1.8e9; 4e6 pre-queued bits need 2.22 s > tau
        res = server_process_step(TaskQueue(4e6, 0.0), [(2, 1e6)], 1.8e9, 1e3, 2.0, 1e-28)
        assert res.t_cp[2] == 2.0
        assert res.new_queue.carried_bits == pytest.approx(4e6 + 1e6 - 3.6e6)
        assert res.energy[2] == pytest.approx(1e-28 * 1.8e9**3 * 2.0, rel=1e-12)

    def test_no_arrivals_drains_queue_without_energy(self):
        res = server_process_step(TaskQueue(1e6, 0.0), [], 1.8e9, 1e3, 2.0, 1e-28)
        assert res.new_queue.carried_bits == 0.0
        assert res.energy == {}
        assert res.t_cp == {}
        assert res.busy_time == pytest.approx(1e6 * 1e3 / 1.8e9)

    def test_empty_everything(self):
        res = server_process_step(TaskQueue(), [], 1.6e9, 1e3, 2.0, 1e-27)
        assert res.new_queue.total_bits == 0.0
        assert res.busy_time == 0.0
        assert res.processed_bits == 0.0

    def test_unsorted_arrivals_rejected(self):
        with pytest.raises(ValueError):
            server_process_step(TaskQueue(), [(2, 1e5), (1, 1e5)], 1.6e9, 1e3, 2.0, 1e-27)
        with pytest.raises(ValueError):
            server_process_step(TaskQueue(), [(1, 1e5), (1, 1e5)], 1.6e9, 1e3, 2.0, 1e-27)
        with pytest.raises(ValueError):
            server_process_step(TaskQueue(), [(1, -5.0)], 1.6e9, 1e3, 2.0, 1e-27)

    def test_multi_arrival_energy_never_double_bills(self):
        # total billed energy equals kappa f^3 * (busy time through the last arrival)
        res = server_process_step(
            TaskQueue(5e5, 0.0), [(0, 8e5), (3, 8e5)], 1.6e9, 1e3, 2.0, 1e-27
        )
        total_busy = min(2.0, (5e5 + 1.6e6) * 1e3 / 1.6e9)
        assert sum(res.energy.values()) == pytest.approx(1e-27 * 1.6e9**3 * total_busy, rel=1e-12)
        assert res.t_cp[0] < res.t_cp[3]

    def test_single_arrival_reduces_to_four_branch_rule(self):
        """All four (t_pre vs tau) x (own time vs residual) combinations
        match the closed-form single-UE branch outputs bit-exactly."""
        f, c, tau, kappa = 1.6e9, 1e3, 2.0, 1e-27
        cap = f * tau / c  # 3.2e6 bits per slot
        cases = [
            (0.0, 1e6),        # t_pre = 0 <= tau, fits in residual
            (1e6, 3e6),        # t_pre <= tau, exceeds residual
            (4e6, 1e6),        # t_pre > tau
            (3.2e6, 0.0),      # t_pre == tau exactly, zero arrival
        ]
        for pre, arriving in cases:
            res = server_process_step(TaskQueue(pre, 0.0), [(0, arriving)], f, c, tau, kappa)
            t_pre = pre * c / f
            if t_pre <= tau:
                residual = tau - t_pre
                if arriving * c / f > residual:
                    expect_t = tau
                    expect_backlog = pre + arriving - cap
                else:
                    expect_t = t_pre + arriving * c / f
                    expect_backlog = 0.0
            else:
                expect_t = tau
                expect_backlog = pre + arriving - cap
            assert res.t_cp[0] == expect_t
            assert res.new_queue.carried_bits == max(0.0, expect_backlog)
            assert res.energy[0] == kappa * f**3 * expect_t


class TestAgainstFifoOracle:
    """Randomized equivalence against the continuous-time packet oracle."""

    def test_local_step_matches_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            f = float(rng.integers(1, 40) * 500)  # f*tau/c integral
            c, tau, kappa, delta_b = 1e3, 2.0, 1e-28, 50
            carried = float(rng.integers(0, 5000))
            fresh = float(rng.integers(0, 5000))
            res = local_process_step(TaskQueue(carried, fresh), f, c, tau, kappa)
            ref = fifo_slot_oracle(int(carried + fresh), [], f, c, tau, kappa, delta_b)
            assert res.new_queue.carried_bits == float(ref["backlog"])
            assert res.t_cp == pytest.approx(float(ref["busy_time"]), rel=1e-9, abs=1e-15)
            assert res.energy == pytest.approx(
                kappa * f**3 * float(ref["busy_time"]), rel=1e-9, abs=1e-18
            )

    def test_server_step_matches_oracle(self):
        rng = np.random.default_rng(6)
        for _ in range(300):
            f = float(rng.integers(1, 40) * 500)
            c, tau, kappa, delta_b = 1e3, 2.0, 1e-27, 50
            carried = float(rng.integers(0, 4000))
            n_arr = int(rng.integers(0, 4))
            ues = sorted(rng.choice(5, size=n_arr, replace=False).tolist())
            arrivals = [(ue, float(rng.integers(0, 3000))) for ue in ues]
            res = server_process_step(TaskQueue(carried, 0.0), arrivals, f, c, tau, kappa)
            ref = fifo_slot_oracle(int(carried), arrivals, f, c, tau, kappa, delta_b)
            assert res.new_queue.carried_bits == float(ref["backlog"])
            for ue, _ in arrivals:
                assert res.t_cp[ue] == pytest.approx(ref["t_cp"][ue], rel=1e-9, abs=1e-15)
                assert res.energy[ue] == pytest.approx(ref["energy"][ue], rel=1e-9, abs=1e-18)
            assert res.busy_time == pytest.approx(float(ref["busy_time"]), rel=1e-9, abs=1e-15)
