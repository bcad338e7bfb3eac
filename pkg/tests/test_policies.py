import copy

import numpy as np
import pytest

import mobandit.policies as policies
from mobandit.errors import ArmMismatch, CapExceeded, NotInitialized
from mobandit.instances import Instance, gen_synthetic
from mobandit.objective import eta_floor
from mobandit.policies import (BaselinePolicy, MoBaiPolicy, MoBaiState,
                               dtrack_subroutine, mose_run)
from mobandit.simulate import sample_rewards
from conftest import random_unique_instance


def _init_state(inst, eta, rng):
    state = MoBaiState(inst.K, inst.M, eta)
    for arm in range(1, inst.K + 1):
        state.observe(arm, sample_rewards(inst, arm, rng))
    return state


class TestMoBaiSelection:
    def test_argmax_of_buffer_plus_surrogate(self):
        # the selection rule is argmax(buffer + s), lowest index on ties
        assert int(np.argmax(np.array([0.0, 0.0]) + np.array([0.7, 0.3]))) + 1 == 1
        assert int(np.argmax(np.array([-0.3, 0.3]) + np.array([0.5, 0.5]))) + 1 == 2
        assert int(np.argmax(np.array([0.0, 0.0]) + np.array([0.5, 0.5]))) + 1 == 1

    def test_select_consistent_with_state(self):
        inst = gen_synthetic(3, 2, seed=1)
        rng = np.random.default_rng(0)
        state = _init_state(inst, 0.1, rng)
        for _ in range(50):
            arm = state.select_arm()
            assert arm == int(np.argmax(state.buffer + state.pending_s)) + 1
            state.observe(arm, sample_rewards(inst, arm, rng))

    def test_not_initialized(self):
        state = MoBaiState(3, 2, 0.1)
        with pytest.raises(NotInitialized):
            state.select_arm()

    def test_observe_requires_selected_arm(self):
        inst = gen_synthetic(3, 2, seed=1)
        rng = np.random.default_rng(0)
        state = _init_state(inst, 0.1, rng)
        arm = state.select_arm()
        other = 1 + (arm % 3)
        with pytest.raises(ArmMismatch):
            state.observe(other, np.zeros(2))

    def test_observe_without_pending(self):
        inst = gen_synthetic(3, 2, seed=1)
        state = _init_state(inst, 0.1, np.random.default_rng(0))
        with pytest.raises(ArmMismatch):
            state.observe(1, np.zeros(2))


class TestBufferUpdate:
    def test_hand_update(self):
        inst = Instance(np.array([[1.0], [0.0]]))
        state = _init_state(inst, 0.1, np.random.default_rng(3))
        state.pending_s = np.array([0.7, 0.3])
        state._pending_arm = 1
        state.observe(1, np.array([0.0]))
        assert state.buffer == pytest.approx([-0.3, 0.3], abs=1e-15)

    def test_sum_conserved_and_reconstruction(self):
        inst = gen_synthetic(4, 2, seed=9)
        rng = np.random.default_rng(4)
        state = _init_state(inst, 0.1, rng)
        s_accum = np.zeros(4)
        counts_at_init = state.counts.copy()
        for _ in range(300):
            arm = state.select_arm()
            s_accum += state.pending_s
            state.observe(arm, sample_rewards(inst, arm, rng))
            assert abs(float(state.buffer.sum())) <= 1e-9
            recon = counts_at_init + s_accum
            assert np.max(np.abs(state.counts + state.buffer - recon)) <= 1e-9

    def test_invariants_on_medium_run(self):
        inst = gen_synthetic(3, 3, seed=21)
        rng = np.random.default_rng(5)
        state = _init_state(inst, 0.1, rng)
        floor = eta_floor(3, 0.1)
        for _ in range(2000):
            arm = state.select_arm()
            state.observe(arm, sample_rewards(inst, arm, rng))
            state.check_invariants()
            assert float(state.empirical_proportion().min()) >= floor - 1e-12


class TestSnapshotTiming:
    def test_refresh_exactly_at_powers_of_two(self):
        inst = gen_synthetic(3, 2, seed=2)
        rng = np.random.default_rng(6)
        state = _init_state(inst, 0.1, rng)
        seen = []
        last = None
        for _ in range(62):
            arm = state.select_arm()
            if state.snapshot is not last:
                seen.append(state.t + 1)  # the step for which selection ran
                last = state.snapshot
            state.observe(arm, sample_rewards(inst, arm, rng))
        # first selection happens at step K+1 = 4 (snapshot l=4); refreshes
        # then occur exactly when the step hits the next powers of two
        assert seen == [4, 8, 16, 32, 64]

    def test_between_refreshes_live_means_are_not_read(self):
        inst = gen_synthetic(3, 2, seed=2)
        rng = np.random.default_rng(7)
        state = _init_state(inst, 0.1, rng)
        rewards = [sample_rewards(inst, 1, rng) for _ in range(80)]
        # advance to just past the refresh at step 8
        k = 0
        while state.t < 8:
            arm = state.select_arm()
            state.observe(arm, rewards[k])
            k += 1
        twin = copy.deepcopy(state)
        # corrupt the live sums of one copy; selections must not diverge
        # until the next snapshot refresh at step 16
        state.reward_sums[:, :] += 1000.0
        while state.t + 1 < 16:
            a1 = state.select_arm()
            a2 = twin.select_arm()
            assert a1 == a2
            assert np.array_equal(state.pending_s, twin.pending_s)
            state.observe(a1, rewards[k])
            twin.observe(a2, rewards[k])
            k += 1
        state.select_arm()
        twin.select_arm()
        assert not np.array_equal(state.snapshot.means, twin.snapshot.means)


class TestBaseline:
    def test_forced_exploration_when_undersampled(self):
        pol = BaselinePolicy(2, 1, 5, False, np.random.default_rng(0))
        pol.counts = np.array([1, 3])
        pol.t = 4
        assert pol.select() == 1  # min count 1 < sqrt(4/2)

    def test_tracking_pulls_most_underpulled(self, monkeypatch):
        pol = BaselinePolicy(2, 1, 5, False, np.random.default_rng(0))
        pol.counts = np.array([5, 5])
        pol.reward_sums = np.array([[1.0], [0.0]])
        pol.t = 9
        monkeypatch.setattr(policies, "dtrack_subroutine",
                            lambda inst, it, init=None: np.array([0.3, 0.7]))
        # target shares 10*(0.3, 0.7) = (3, 7) vs counts (5, 5): arm 2 lags
        assert pol.select() == 2

    def test_tracking_tie_lowest_index(self, monkeypatch):
        pol = BaselinePolicy(2, 1, 5, False, np.random.default_rng(0))
        pol.counts = np.array([5, 5])
        pol.reward_sums = np.array([[1.0], [0.0]])
        pol.t = 9
        monkeypatch.setattr(policies, "dtrack_subroutine",
                            lambda inst, it, init=None: np.array([0.5, 0.5]))
        assert pol.select() == 1

    def test_forced_tie_seeded_uniform_reproducible(self):
        picks = []
        for _ in range(2):
            pol = BaselinePolicy(3, 1, 5, False, np.random.default_rng(123))
            pol.counts = np.array([1, 1, 1])
            pol.t = 12  # min 1 < sqrt(12/3): forced exploration, three-way tie
            picks.append([pol.select() for _ in range(5)])
        assert picks[0] == picks[1]
        assert set(picks[0]) <= {1, 2, 3}

    def test_warm_start_passes_last_weight(self, monkeypatch):
        seen_inits = []

        def fake_subroutine(inst, it, init=None):
            seen_inits.append(init)
            return np.array([0.6, 0.4])

        monkeypatch.setattr(policies, "dtrack_subroutine", fake_subroutine)
        pol = BaselinePolicy(2, 1, 5, True, np.random.default_rng(0))
        pol.counts = np.array([5, 5])
        pol.reward_sums = np.array([[1.0], [0.0]])
        pol.t = 10
        pol.select()
        pol.counts = np.array([6, 5])
        pol.t = 11
        pol.select()
        assert seen_inits[0] is None
        assert np.array_equal(seen_inits[1], [0.6, 0.4])


class TestSubroutine:
    def test_two_iterations(self):
        inst = Instance(np.array([[1.0], [0.0]]))
        assert dtrack_subroutine(inst, 2) == pytest.approx([0.5, 0.5], abs=1e-15)

    def test_single_iteration_vertex(self):
        inst = Instance(np.array([[1.0], [0.0]]))
        w = dtrack_subroutine(inst, 1)
        assert sorted(w.tolist()) == [0.0, 1.0]

    def test_always_a_proportion(self):
        rng = np.random.default_rng(88)
        for _ in range(10):
            inst = random_unique_instance(rng, 3, 2)
            w = dtrack_subroutine(inst, int(rng.integers(1, 8)))
            assert float(w.sum()) == pytest.approx(1.0, abs=1e-12)
            assert float(w.min()) >= -1e-15


class TestMoSe:
    def test_elimination_radius_schedule(self):
        # rig a noiseless two-arm environment with mean difference 4; the
        # radius sqrt(2 ln(4MK t^2 / delta) / sweeps) first drops below 2 at
        # sweep 5 (t = 10), so the round ends exactly there
        inst = Instance(np.array([[2.0], [-2.0]]))
        env = lambda arm: np.array([2.0]) if arm == 1 else np.array([-2.0])
        rec, t = mose_run(inst, 0.05, env, 1000)
        assert rec == (1,)
        assert t == 10
        a4 = np.sqrt(2 * np.log(4 * 1 * 2 * 8 ** 2 / 0.05) / 4)
        a5 = np.sqrt(2 * np.log(4 * 1 * 2 * 10 ** 2 / 0.05) / 5)
        assert 2 * a4 > 4.0 > 2 * a5

    def test_separated_instance_identified(self):
        inst = Instance(np.array([[1e6], [0.0]]))
        hits = 0
        for seed in range(10):
            rng = np.random.default_rng(seed)
            rec, t = mose_run(inst, 0.05, lambda a: sample_rewards(inst, a, rng), 10_000)
            hits += rec == (1,)
        assert hits == 10

    def test_rounds_shrink_and_terminate(self):
        inst = gen_synthetic(5, 2, seed=3)
        rng = np.random.default_rng(11)
        calls = []

        def env(arm):
            calls.append(arm)
            return sample_rewards(inst, arm, rng)

        rec, t = mose_run(inst, 0.1, env, 1_000_000)
        assert rec == (1, 2)
        assert len(calls) == t

    def test_cap_exceeded(self):
        inst = gen_synthetic(4, 2, seed=3)
        rng = np.random.default_rng(12)
        with pytest.raises(CapExceeded):
            mose_run(inst, 0.1, lambda a: sample_rewards(inst, a, rng), 10)

    def test_survivor_never_eliminated(self):
        # the per-round empirical best has self-gap zero, so a round can
        # never empty its active set
        inst = gen_synthetic(6, 3, seed=5)
        rng = np.random.default_rng(13)
        rec, _ = mose_run(inst, 0.2, lambda a: sample_rewards(inst, a, rng), 2_000_000)
        assert len(rec) == 3
        assert all(1 <= a <= 6 for a in rec)


class TestPolicyWrapper:
    def test_initial_pulls_in_order(self):
        pol = MoBaiPolicy(4, 2, 0.1)
        inst = gen_synthetic(4, 2, seed=1)
        rng = np.random.default_rng(14)
        for expected in (1, 2, 3, 4):
            arm = pol.select()
            assert arm == expected
            pol.observe(arm, sample_rewards(inst, arm, rng))
        assert pol.counts.tolist() == [1, 1, 1, 1]
