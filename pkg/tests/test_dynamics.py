import math

import numpy as np
import pytest

from entropy_collapse.dynamics import (
    ConstantSchedule,
    DynamicsParams,
    GAIN_SCALE,
    ShockSchedule,
    SinusoidalSchedule,
    UpdateRule,
    apply_feedback,
    apply_noise,
    evolve,
    expected_entropy_change,
    gain,
    inject_novelty,
    step,
)
from entropy_collapse.errors import ParameterError
from entropy_collapse.metrics import shannon_entropy
from entropy_collapse.simplex import (
    RngStream,
    StateDistribution,
    renormalize,
    sample_dirichlet_uniform,
    uniform,
)

from oracles import (
    max_abs_diff,
    oracle_entropy_change,
    oracle_feedback,
    oracle_novelty,
    oracle_step,
)

RULES = ("multiplicative", "softmax", "replicator")


def state(*values):
    return StateDistribution(np.array(values))


class TestGain:
    def test_steep_rules_cross_base_novelty_near_alpha_1_2(self):
        assert gain(1.2, "multiplicative") == pytest.approx(0.003, rel=1e-12)
        assert gain(1.2, "softmax") == pytest.approx(0.003, rel=1e-12)
        assert gain(1.1, "multiplicative") < 0.003 < gain(1.3, "multiplicative")

    def test_replicator_profile(self):
        assert gain(1.0, "replicator") == pytest.approx(0.027, rel=1e-12)
        assert gain(0.0, "replicator") == 0.0

    def test_monotone_in_alpha(self):
        alphas = np.linspace(0.0, 3.0, 31)
        for rule in RULES:
            values = [gain(a, rule) for a in alphas]
            assert all(b >= a for a, b in zip(values, values[1:]))

    def test_validation(self):
        with pytest.raises(ParameterError):
            gain(-0.1, "multiplicative")
        with pytest.raises(ParameterError):
            gain(1.0, "bogus")

    def test_scale_constant(self):
        assert GAIN_SCALE == pytest.approx(4.845167486695374e-04, rel=1e-14)


class TestApplyFeedback:
    def test_multiplicative_known_values(self):
        out = apply_feedback(state(0.8, 0.2), 1.0, "multiplicative")
        assert out.probs[0] == pytest.approx(0.8001074475985958, abs=1e-12)
        assert out.probs[1] == pytest.approx(0.1998925524014042, abs=1e-12)

    def test_multiplicative_known_values_alpha_two(self):
        out = apply_feedback(state(0.8, 0.2), 2.0, "multiplicative")
        assert out.probs[0] == pytest.approx(0.88835999287624, abs=1e-12)

    def test_softmax_known_values(self):
        out = apply_feedback(state(0.8, 0.2), 1.0, "softmax")
        assert out.probs[0] == pytest.approx(0.8000930109895867, abs=1e-12)

    def test_replicator_known_values(self):
        out = apply_feedback(state(0.8, 0.2), 1.0, "replicator")
        assert out.probs[0] == pytest.approx(0.80324, abs=1e-12)
        assert out.probs[1] == pytest.approx(0.19676, abs=1e-12)

    def test_alpha_zero_is_identity_bit_for_bit(self):
        rng = np.random.default_rng(21)
        for rule in RULES:
            s = sample_dirichlet_uniform(9, rng)
            out = apply_feedback(s, 0.0, rule)
            assert np.array_equal(out.probs, s.probs)

    def test_uniform_is_fixed_bit_for_bit(self):
        u = uniform(17)
        for rule in RULES:
            out = apply_feedback(u, 2.5, rule)
            assert np.array_equal(out.probs, u.probs)

    def test_entropy_never_increases(self):
        rng = np.random.default_rng(22)
        for _ in range(200):
            s = sample_dirichlet_uniform(int(rng.integers(2, 30)), rng)
            alpha = float(rng.uniform(0.0, 3.0))
            for rule in RULES:
                out = apply_feedback(s, alpha, rule)
                assert shannon_entropy(out) <= shannon_entropy(s) + 1e-12

    def test_preserves_ranking(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            s = sample_dirichlet_uniform(8, rng)
            order = np.argsort(s.probs)
            for rule in RULES:
                out = apply_feedback(s, 2.0, rule)
                reordered = out.probs[order]
                assert all(b >= a - 1e-15 for a, b in zip(reordered, reordered[1:]))

    def test_matches_oracle(self):
        rng = np.random.default_rng(24)
        for _ in range(40):
            n = int(rng.choice([2, 3, 5]))
            s = renormalize(rng.standard_exponential(n))
            alpha = float(rng.uniform(0.0, 2.5))
            for rule in RULES:
                out = apply_feedback(s, alpha, rule)
                assert max_abs_diff(out.probs, oracle_feedback(s.probs, alpha, rule)) < 1e-10

    def test_validation(self):
        s = state(0.5, 0.5)
        with pytest.raises(ParameterError):
            apply_feedback(s, -1.0, "multiplicative")
        with pytest.raises(ParameterError):
            apply_feedback(s, 1.0, "unknown")


class TestInjectNovelty:
    def test_beta_zero_is_identity_bit_for_bit(self):
        s = state(0.9, 0.06, 0.04)
        out = inject_novelty(s, 0.0)
        assert np.array_equal(out.probs, s.probs)

    def test_beta_one_gives_uniform(self):
        out = inject_novelty(state(0.9, 0.06, 0.04), 1.0)
        assert np.allclose(out.probs, 1.0 / 3.0, atol=1e-15)

    def test_uniform_is_fixed_bit_for_bit(self):
        u = uniform(11)
        out = inject_novelty(u, 0.25)
        assert np.array_equal(out.probs, u.probs)

    def test_total_variation_moved_is_beta_scaled(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            n = int(rng.integers(2, 40))
            s = sample_dirichlet_uniform(n, rng)
            beta = float(rng.uniform(0.0, 1.0))
            out = inject_novelty(s, beta)
            tv_moved = 0.5 * float(np.abs(out.probs - s.probs).sum())
            tv_to_uniform = 0.5 * float(np.abs(s.probs - 1.0 / n).sum())
            assert tv_moved <= beta + 1e-15
            assert tv_moved == pytest.approx(beta * tv_to_uniform, abs=1e-12)

    def test_matches_oracle(self):
        rng = np.random.default_rng(32)
        for _ in range(40):
            s = renormalize(rng.standard_exponential(int(rng.choice([2, 3, 5]))))
            beta = float(rng.uniform(0.0, 1.0))
            out = inject_novelty(s, beta)
            assert max_abs_diff(out.probs, oracle_novelty(s.probs, beta)) < 1e-10

    def test_validation(self):
        with pytest.raises(ParameterError):
            inject_novelty(state(0.5, 0.5), 1.5)
        with pytest.raises(ParameterError):
            inject_novelty(state(0.5, 0.5), -0.1)


class TestApplyNoise:
    def test_sigma_zero_is_identity_bit_for_bit(self):
        s = state(0.7, 0.3)
        out = apply_noise(s, 0.0)
        assert np.array_equal(out.probs, s.probs)

    def test_positive_sigma_requires_rng(self):
        with pytest.raises(ParameterError):
            apply_noise(state(0.5, 0.5), 0.1)

    def test_entries_stay_positive(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            s = sample_dirichlet_uniform(10, rng)
            out = apply_noise(s, 0.5, rng)
            assert np.all(out.probs > 0.0)

    def test_reproducible(self):
        s = state(0.6, 0.4)
        a = apply_noise(s, 0.2, np.random.default_rng(9))
        b = apply_noise(s, 0.2, np.random.default_rng(9))
        assert np.array_equal(a.probs, b.probs)

    def test_validation(self):
        with pytest.raises(ParameterError):
            apply_noise(state(0.5, 0.5), -0.2)


class TestSchedules:
    def test_constant(self):
        sched = ConstantSchedule()
        assert sched.beta_at(0, 0.003, 100) == 0.003
        assert sched.beta_at(99, 0.003, 100) == 0.003

    def test_sinusoidal_peaks_at_quarter_period(self):
        sched = SinusoidalSchedule(amplitude=0.5, period=8.0)
        assert sched.beta_at(0, 0.01, 100) == pytest.approx(0.01, abs=1e-15)
        assert sched.beta_at(2, 0.01, 100) == pytest.approx(0.015, abs=1e-15)

    def test_sinusoidal_default_period_tracks_horizon(self):
        sched = SinusoidalSchedule()
        # period = horizon / 4, so t = horizon / 16 sits at the first peak
        assert sched.beta_at(25, 0.01, 400) == pytest.approx(0.015, abs=1e-15)

    def test_sinusoidal_validation(self):
        with pytest.raises(ParameterError):
            SinusoidalSchedule(amplitude=1.5)
        with pytest.raises(ParameterError):
            SinusoidalSchedule(period=0.0)

    def test_shock_window_is_half_open(self):
        sched = ShockSchedule(start=50, end=100, multiplier=15.0)
        assert sched.beta_at(49, 0.003, 300) == 0.003
        assert sched.beta_at(50, 0.003, 300) == pytest.approx(0.045, abs=1e-15)
        assert sched.beta_at(99, 0.003, 300) == pytest.approx(0.045, abs=1e-15)
        assert sched.beta_at(100, 0.003, 300) == 0.003

    def test_shock_validation(self):
        with pytest.raises(ParameterError):
            ShockSchedule(start=10, end=10, multiplier=2.0)
        with pytest.raises(ParameterError):
            ShockSchedule(start=-1, end=10, multiplier=2.0)
        with pytest.raises(ParameterError):
            ShockSchedule(start=0, end=10, multiplier=-0.5)

    def test_effective_beta_must_stay_in_range(self):
        params = DynamicsParams(
            alpha=1.0, beta=0.1, schedule=ShockSchedule(start=0, end=5, multiplier=15.0)
        )
        with pytest.raises(ParameterError):
            step(state(0.6, 0.4), params)


class TestStep:
    def test_known_composition(self):
        out = step(state(0.8, 0.2), DynamicsParams(alpha=1.0, beta=0.1))
        assert out.probs[0] == pytest.approx(0.7700967028387362, abs=1e-12)
        assert out.probs[1] == pytest.approx(0.2299032971612638, abs=1e-12)

    def test_equals_manual_composition(self):
        s = state(0.5, 0.3, 0.2)
        params = DynamicsParams(alpha=1.4, beta=0.01, rule="softmax")
        manual = inject_novelty(apply_feedback(s, 1.4, "softmax"), 0.01)
        assert np.array_equal(step(s, params).probs, manual.probs)

    def test_matches_oracle(self):
        rng = np.random.default_rng(51)
        for _ in range(30):
            s = renormalize(rng.standard_exponential(int(rng.choice([2, 3, 5]))))
            alpha = float(rng.uniform(0.0, 2.5))
            beta = float(rng.uniform(0.0, 0.2))
            for rule in RULES:
                out = step(s, DynamicsParams(alpha=alpha, beta=beta, rule=rule))
                assert max_abs_diff(out.probs, oracle_step(s.probs, alpha, beta, rule)) < 1e-10

    def test_noise_requires_rng(self):
        with pytest.raises(ParameterError):
            step(state(0.5, 0.5), DynamicsParams(alpha=1.0, beta=0.01, noise_sigma=0.1))


class TestEvolve:
    def test_row_count_and_indexing(self):
        traj = evolve(uniform(5), DynamicsParams(alpha=1.0, beta=0.01), 20)
        assert len(traj.steps) == 21
        assert traj.steps[0].step == 0
        assert traj.steps[-1].step == 20

    def test_initial_row_matches_initial_state(self):
        s = state(0.7, 0.2, 0.1)
        traj = evolve(s, DynamicsParams(alpha=1.0, beta=0.01), 5)
        assert traj.steps[0].entropy == pytest.approx(shannon_entropy(s), abs=1e-15)
        assert traj.steps[0].dominant_share == 0.7

    def test_final_state_equals_repeated_steps(self):
        s = state(0.5, 0.3, 0.2)
        params = DynamicsParams(alpha=1.8, beta=0.003)
        traj = evolve(s, params, 40)
        current = s
        for t in range(40):
            current = step(current, params, t=t)
        assert np.array_equal(traj.final_state.probs, current.probs)

    def test_deterministic_with_noise(self):
        params = DynamicsParams(alpha=1.5, beta=0.003, noise_sigma=0.05)
        stream = RngStream(42, 7)
        s = uniform(12)
        a = evolve(s, params, 50, stream.generator())
        b = evolve(s, params, 50, stream.generator())
        assert np.array_equal(a.column("entropy_norm"), b.column("entropy_norm"))

    def test_observers_recorded(self):
        from entropy_collapse.metrics import EntropyMeasure

        traj = evolve(
            uniform(6),
            DynamicsParams(alpha=1.0, beta=0.01),
            10,
            observers=(EntropyMeasure("renyi", 2.0),),
        )
        assert traj.observer_labels == ("renyi_2",)
        col = traj.column("renyi_2")
        assert col.shape == (11,)
        assert col[0] == pytest.approx(1.0, abs=1e-12)

    def test_beta_effective_column_follows_schedule(self):
        params = DynamicsParams(
            alpha=1.0, beta=0.003, schedule=ShockSchedule(start=3, end=6, multiplier=10.0)
        )
        traj = evolve(uniform(4), params, 10)
        betas = traj.column("beta_effective")
        assert betas[2] == 0.003
        assert betas[3] == pytest.approx(0.03, abs=1e-15)
        assert betas[6] == 0.003

    def test_validation(self):
        with pytest.raises(ParameterError):
            evolve(uniform(4), DynamicsParams(alpha=1.0, beta=0.01), 0)
        with pytest.raises(ParameterError):
            evolve(uniform(4), DynamicsParams(alpha=1.0, beta=0.01, noise_sigma=0.1), 10)


class TestExpectedEntropyChange:
    def test_known_value(self):
        dh = expected_entropy_change(state(0.8, 0.2), DynamicsParams(alpha=1.0, beta=0.0))
        assert dh == pytest.approx(-0.00014899008297891096, abs=1e-12)

    def test_matches_oracle(self):
        rng = np.random.default_rng(61)
        for _ in range(30):
            s = renormalize(rng.standard_exponential(int(rng.choice([2, 3, 5]))))
            alpha = float(rng.uniform(0.0, 2.5))
            beta = float(rng.uniform(0.0, 0.1))
            for rule in RULES:
                dh = expected_entropy_change(s, DynamicsParams(alpha=alpha, beta=beta, rule=rule))
                assert max_abs_diff([dh], [oracle_entropy_change(s.probs, alpha, beta, rule)]) < 1e-10

    def test_novelty_dominates_at_low_alpha(self):
        concentrated = state(0.97, 0.01, 0.01, 0.01)
        dh = expected_entropy_change(concentrated, DynamicsParams(alpha=0.2, beta=0.01))
        assert dh > 0.0

    def test_feedback_dominates_at_high_alpha(self):
        s = state(0.4, 0.3, 0.2, 0.1)
        dh = expected_entropy_change(s, DynamicsParams(alpha=2.5, beta=0.003))
        assert dh < 0.0
