import math

import numpy as np
import pytest

from gevrey_flow import (
    BrownianPath,
    OmegaVerdict,
    omega_probability_closed_form,
    omega_probability_mc,
    omega_verdict,
    sample_path,
    zero_path,
)


class TestSamplePath:
    def test_same_seed_gives_identical_paths(self):
        a = sample_path(2.0, 1e-2, seed=99)
        b = sample_path(2.0, 1e-2, seed=99)
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.times, b.times)

    def test_starts_at_zero_and_covers_horizon(self):
        p = sample_path(1.05, 0.1, seed=1)
        assert p.values[0] == 0.0
        assert p.times[-1] >= 1.05 - 1e-12

    def test_terminal_variance(self):
        # 10^4 paths: sample variance of W(1) within 3 standard errors of 1
        n = 10_000
        rng_seeds = np.random.SeedSequence(7).spawn(n)
        terminal = np.array([sample_path(1.0, 0.05, s).values[-1] for s in rng_seeds])
        var = terminal.var(ddof=1)
        se_var = math.sqrt(2.0 / (n - 1))  # SE of the variance of N(0,1) samples
        assert abs(var - 1.0) <= 3 * se_var

    def test_terminal_mean_is_zero(self):
        n = 10_000
        rng_seeds = np.random.SeedSequence(8).spawn(n)
        terminal = np.array([sample_path(1.0, 0.05, s).values[-1] for s in rng_seeds])
        assert abs(terminal.mean()) <= 3.0 / math.sqrt(n)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            BrownianPath(times=[0.0, 1.0], values=[1.0, 0.0])  # W(0) != 0
        with pytest.raises(ValueError):
            BrownianPath(times=[0.0, 0.0], values=[0.0, 0.0])  # not increasing

    def test_index_lookup(self):
        p = zero_path(1.0, 0.25)
        assert p.index_of(0.5) == 2
        with pytest.raises(ValueError, match="not on the path grid"):
            p.index_of(0.3)


class TestOmegaVerdict:
    def test_zero_path_is_a_member_with_the_product_survival(self):
        p = zero_path(1.0, 0.1)
        v = omega_verdict(p, alpha=1.0, beta=1.0, nu=1.0)
        assert v.member
        # independent recomputation of the bridge product
        b = (1.0 + p.times) / 1.0
        expected = 1.0
        for i in range(len(p.times) - 1):
            expected *= 1.0 - math.exp(-2.0 * b[i] * b[i + 1] / 0.1)
        assert v.survival_prob_given_grid == pytest.approx(expected, rel=1e-12)

    def test_crossing_path_is_rejected(self):
        times = np.arange(5) * 0.25
        values = np.array([0.0, 0.5, 3.0, 0.5, 0.0])  # exceeds (1 + t) at t = 0.5
        v = omega_verdict(BrownianPath(times, values), 1.0, 1.0, 1.0)
        assert not v.member
        assert v.survival_prob_given_grid == 0.0

    def test_touching_the_barrier_kills_the_bridge_factor(self):
        times = np.array([0.0, 1.0])
        values = np.array([0.0, 2.0])  # margin (1 + 1) - 2 = 0 exactly
        v = omega_verdict(BrownianPath(times, values), 1.0, 1.0, 1.0)
        assert v.member
        assert v.survival_prob_given_grid == 0.0

    def test_member_false_forces_zero_survival(self):
        with pytest.raises(ValueError):
            OmegaVerdict(member=False, survival_prob_given_grid=0.5)

    def test_rejects_nonpositive_parameters(self):
        with pytest.raises(ValueError):
            omega_verdict(zero_path(1.0, 0.1), 0.0, 1.0, 1.0)


class TestOmegaMC:
    def test_bridge_correction_only_removes_mass(self):
        seeds = np.random.SeedSequence(21).spawn(200)
        for s in seeds[:50]:
            p = sample_path(1.0, 0.05, s)
            v = omega_verdict(p, 1.0, 1.0, 1.0)
            assert v.survival_prob_given_grid <= float(v.member)

    def test_estimate_is_order_invariant(self):
        seeds = np.random.SeedSequence(22).spawn(300)
        survivals = np.array(
            [
                omega_verdict(sample_path(1.0, 0.02, s), 1.0, 1.0, 1.0).survival_prob_given_grid
                for s in seeds
            ]
        )
        shuffled = survivals.copy()
        np.random.default_rng(0).shuffle(shuffled)
        assert survivals.mean() == pytest.approx(shuffled.mean(), rel=1e-15)

    def test_small_run_matches_closed_form(self):
        res = omega_probability_mc(1.0, 1.0, 1.0, n_paths=4000, horizon=1.0, dt=2e-3, seed=5)
        closed = omega_probability_closed_form(1.0, 1.0, 1.0)
        assert abs(res.estimate - closed) <= 3 * res.standard_error
        assert res.horizon > res.requested_horizon  # auto-extended

    def test_deterministic_diffusionless_limit(self):
        res = omega_probability_mc(1.0, 1.0, 0.05, n_paths=500, horizon=1.0, dt=1e-3, seed=6)
        assert res.estimate == pytest.approx(1.0, abs=1e-12)

    def test_doubling_paths_halves_the_standard_error(self):
        r1 = omega_probability_mc(1.0, 1.0, 1.0, n_paths=3000, horizon=1.0, dt=5e-3, seed=7)
        r2 = omega_probability_mc(1.0, 1.0, 1.0, n_paths=6000, horizon=1.0, dt=5e-3, seed=7)
        ratio = r2.standard_error / r1.standard_error
        assert abs(ratio - 1.0 / math.sqrt(2.0)) <= 0.2 / math.sqrt(2.0)

    def test_tail_bound_is_enforced(self):
        res = omega_probability_mc(1.0, 1.0, 1.0, n_paths=2000, horizon=0.1, dt=5e-3, seed=8)
        assert res.tail_bound <= 0.1 * res.standard_error + 1e-15

    def test_result_serialises(self):
        res = omega_probability_mc(1.0, 1.0, 1.0, n_paths=100, horizon=0.5, dt=1e-2, seed=9)
        doc = res.to_dict()
        assert {"estimate", "standard_error", "n_paths", "dt", "horizon", "seed"} <= set(doc)
