import math

import numpy as np
import pytest

from agmec.channel import ChannelParams, achievable_rate, deliverable_bits
from agmec.env import (
    ACT_BS,
    ACT_LOCAL,
    ACT_UAV,
    DIRECTIONS,
    ComputeParams,
    EnvState,
    Geometry,
    MecEnv,
    RewardVector,
)
from agmec.queues import TaskQueue
from agmec.rng import named_streams
from agmec.tasks import TaskProfile


def small_env(num_ues=2, jitter=0.0, base=1e5, peak=1e5):
    geometry = Geometry(
        altitude_m=100.0,
        arena_x_m=1000.0,
        arena_y_m=1000.0,
        uav_step_m=40.0,
        bs_xy=(500.0, 500.0),
        ue_xy=tuple((300.0 + 150.0 * m, 460.0) for m in range(num_ues)),
    )
    profiles = tuple(
        TaskProfile(base_bits=base, peak_bits=peak, period=100, jitter_fraction=jitter)
        for _ in range(num_ues)
    )
    return MecEnv(ChannelParams(), geometry, ComputeParams(), profiles)


def streams(seed=0):
    s = named_streams(seed, 3)
    return s["env-fading"], s["env-los"], s["env-tasks"]


class TestGeometryAndMotion:
    def test_moves_step_in_each_direction(self):
        env = small_env()
        for k in range(8):
            x, y = env.move_uav((500.0, 500.0), k)
            assert math.hypot(x - 500.0, y - 500.0) == pytest.approx(40.0, rel=1e-12)

    def test_clipped_to_arena(self):
        env = small_env()
        x, y = env.move_uav((10.0, 990.0), 3)  # NW
        assert 0.0 <= x <= 1000.0 and 0.0 <= y <= 1000.0
        x, y = env.move_uav((0.0, 0.0), 5)  # SW: pinned at corner
        assert (x, y) == (0.0, 0.0)

    def test_direction_vectors_are_unit(self):
        assert np.allclose(np.linalg.norm(DIRECTIONS, axis=1), 1.0)

    def test_bad_direction_rejected(self):
        env = small_env()
        with pytest.raises(ValueError):
            env.move_uav((500.0, 500.0), 8)


class TestStepValidation:
    def test_wrong_action_arity(self):
        env = small_env()
        with pytest.raises(ValueError):
            env.step(env.initial_state(), (0, (ACT_LOCAL,)), *streams())

    def test_bad_offload_code(self):
        env = small_env()
        with pytest.raises(ValueError):
            env.step(env.initial_state(), (0, (ACT_LOCAL, 7)), *streams())


class TestStepSemantics:
    def test_all_local_empty_queues_zero_reward(self):
        env = small_env()
        state = env.initial_state()
        next_state, out = env.step(state, (0, (ACT_LOCAL, ACT_LOCAL)), *streams())
        assert out.reward == RewardVector(e=-0.0, d=-0.0)
        assert out.total_energy_j == 0.0
        assert out.total_backlog_bits == 0.0
        # production was injected for the next slot
        assert all(q.fresh_bits == 1e5 for q in next_state.ue_queues)
        assert next_state.t == 1

    def test_reward_equals_negated_breakdown_sums(self):
        env = small_env(jitter=0.3, peak=3e6)
        state = env.initial_state()
        rngs = streams(3)
        for actions in [(0, (ACT_UAV, ACT_BS)), (3, (ACT_LOCAL, ACT_UAV)), (5, (ACT_BS, ACT_BS))]:
            state, out = env.step(state, actions, *rngs)
            total_e = sum(out.trans_energy) + sum(out.local_cp_energy) + sum(out.server_cp_energy)
            total_d = sum(out.ue_backlog) + out.uav_backlog + out.bs_backlog
            assert out.reward.e == pytest.approx(-total_e, rel=1e-12, abs=1e-15)
            assert out.reward.d == pytest.approx(-total_d, rel=1e-12, abs=1e-15)

    def test_single_ue_forced_channel_composition(self):
        """Full step() outcome equals hand-composition of the per-op pieces
        when the channel draws are pinned."""
        env = small_env(num_ues=1, base=5e5, peak=5e5)
        carried, fresh = 2.5e6, 5e5
        state = EnvState(
            t=0,
            uav_xy=(500.0, 500.0),
            ue_queues=(TaskQueue(carried, fresh),),
            uav_queue=TaskQueue(1e6, 0.0),
            bs_queue=TaskQueue(),
        )

        class PinnedRng:
            """uniform -> always LoS; exponential -> unit fade; jitter 0.5 -> x1.0"""

            def random(self):
                return 0.0

            def exponential(self):
                return 1.0

        pinned = PinnedRng()
        next_state, out = env.step(state, (0, (ACT_UAV,)), pinned, pinned, pinned)

        # hand-composed: UAV moved east 40 m; UE at (300, 460)
        uav_xy = (540.0, 500.0)
        d3 = math.sqrt((uav_xy[0] - 300.0) ** 2 + (uav_xy[1] - 460.0) ** 2 + 100.0**2)
        gain = ChannelParams().ref_gain * d3**-2  # LoS branch
        rate = achievable_rate(gain, ChannelParams())
        sent = deliverable_bits(rate, 2.0, 1000, carried + fresh)
        assert out.offloaded_bits[0] == sent
        assert out.trans_energy[0] == pytest.approx(1.0 * sent / rate, rel=1e-12)
        assert out.t_trans[0] == pytest.approx(sent / rate, rel=1e-12)
        # server: 1e6 pre-queued plus the arrival, f_uav = 1.6e9
        t_pre = 1e6 * 1e3 / 1.6e9
        own = sent * 1e3 / 1.6e9
        expect_tcp = min(2.0, t_pre + own)
        assert out.t_cp[0] == pytest.approx(expect_tcp, rel=1e-12)
        assert out.server_cp_energy[0] == pytest.approx(1e-27 * 1.6e9**3 * expect_tcp, rel=1e-12)
        assert out.ue_backlog[0] == carried + fresh - sent
        assert next_state.uav_queue.carried_bits == max(0.0, 1e6 + sent - 3.2e6)

    def test_times_bounded_by_slot(self):
        env = small_env(jitter=0.5, peak=5e6)
        state = env.initial_state()
        rngs = streams(9)
        rng_actions = np.random.default_rng(4)
        for _ in range(200):
            actions = (
                int(rng_actions.integers(8)),
                tuple(int(a) for a in rng_actions.integers(3, size=2)),
            )
            state, out = env.step(state, actions, *rngs)
            assert all(0.0 <= t <= 2.0 for t in out.t_cp)
            assert all(0.0 <= t <= 2.0 for t in out.t_trans)
            assert all(e >= 0.0 for e in out.trans_energy)
            assert all(e >= 0.0 for e in out.local_cp_energy)
            assert all(e >= 0.0 for e in out.server_cp_energy)
            assert all(b >= 0.0 for b in out.ue_backlog)
            assert out.uav_backlog >= 0.0 and out.bs_backlog >= 0.0

    def test_bit_conservation_over_run(self):
        env = small_env(num_ues=3, jitter=0.4, base=2e5, peak=4e6)
        state = EnvState(
            t=0,
            uav_xy=(500.0, 500.0),
            ue_queues=(TaskQueue(), TaskQueue(), TaskQueue()),
            uav_queue=TaskQueue(),
            bs_queue=TaskQueue(),
        )
        rngs = streams(17)
        rng_actions = np.random.default_rng(17)
        produced = processed = 0.0
        for _ in range(500):
            actions = (
                int(rng_actions.integers(8)),
                tuple(int(a) for a in rng_actions.integers(3, size=3)),
            )
            state, out = env.step(state, actions, *rngs)
            produced += sum(out.produced_bits)
            processed += out.processed_bits
            buffered = state.total_backlog_bits
            assert produced - processed == pytest.approx(buffered, abs=1e-6)

    def test_energy_identity_for_processing_events(self):
        # E_cp = kappa f^3 t_cp exactly for local and (total) server processing
        env = small_env(num_ues=2, jitter=0.0, base=1e6, peak=1e6)
        state = env.initial_state()
        rngs = streams(1)
        state, _ = env.step(state, (0, (ACT_LOCAL, ACT_LOCAL)), *rngs)  # queue production
        _, out = env.step(state, (0, (ACT_LOCAL, ACT_UAV)), *rngs)
        assert out.local_cp_energy[0] == pytest.approx(1e-28 * (8e8) ** 3 * out.t_cp[0], rel=1e-12)
        assert out.server_cp_energy[1] == pytest.approx(1e-27 * (1.6e9) ** 3 * out.t_cp[1], rel=1e-12)


class TestDeterminism:
    def test_same_seed_same_trajectory(self):
        def trace(seed):
            env = small_env(num_ues=2, jitter=0.3, peak=2e6)
            state = env.initial_state()
            rngs = streams(seed)
            rng_actions = np.random.default_rng(99)
            out_list = []
            for _ in range(100):
                actions = (
                    int(rng_actions.integers(8)),
                    tuple(int(a) for a in rng_actions.integers(3, size=2)),
                )
                state, out = env.step(state, actions, *rngs)
                out_list.append((out.reward.e, out.reward.d, state.uav_xy))
            return out_list

        assert trace(123) == trace(123)
        assert trace(123) != trace(124)

    def test_env_stream_consumption_independent_of_actions(self):
        """The same env streams produce the same channel draws no matter
        which actions are taken (draws happen for every UE every slot)."""
        env = small_env(num_ues=2, jitter=0.2, peak=2e6)

        def consumed(actions):
            rngs = streams(7)
            state = env.initial_state()
            for _ in range(50):
                state, _ = env.step(state, actions, *rngs)
            return tuple(r.bit_generator.state["state"]["state"] for r in rngs)

        all_local = consumed((0, (ACT_LOCAL, ACT_LOCAL)))
        all_offload = consumed((4, (ACT_UAV, ACT_BS)))
        assert all_local == all_offload
