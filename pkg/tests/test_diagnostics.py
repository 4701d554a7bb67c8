import math

import numpy as np
import pytest

from gevrey_flow import (
    GevreyNormSpec,
    IntegratorConfig,
    InteractionMatrix,
    Lattice,
    ModelConfig,
    NormSchedule,
    NormSeries,
    PowerLawKernel,
    SpectralField,
    bilinear_shape_report,
    compute_zeta,
    dissipation_check,
    embedding_suite,
    fit_decay,
    linear_symbol,
    monotonicity_check,
    random_hermitian_field,
    rescale_equivalence_check,
    sample_path,
    series_from_result,
    simulate,
    smallness_margin,
    zero_path,
)
from gevrey_flow.diagnostics import holder_embedding_constant
from gevrey_flow.dynamics import SimState
from gevrey_flow.spectral import INF


def small_field(lat, seed=0, amp=0.05):
    f = random_hermitian_field(lat, seed, decay=0.5)
    return f * (amp / np.abs(f.coeffs).max())


class TestFitDecay:
    def test_exact_exponential_series(self):
        t = np.linspace(0.0, 5.0, 40)
        series = NormSeries(times=t, values=3.0 * np.exp(-0.2 * t))
        fit = fit_decay(series)
        assert fit.rate == pytest.approx(-0.2, abs=1e-12)
        assert fit.stderr <= 1e-12

    def test_affine_equivariance(self):
        t = np.linspace(0.0, 2.0, 30)
        rng = np.random.default_rng(0)
        v = np.exp(-0.5 * t + 0.05 * rng.standard_normal(30))
        r1 = fit_decay(NormSeries(times=t, values=v)).rate
        r2 = fit_decay(NormSeries(times=t, values=17.0 * v)).rate
        assert r1 == pytest.approx(r2, rel=1e-14)

    def test_needs_ten_samples(self):
        t = np.linspace(0, 1, 5)
        with pytest.raises(ValueError, match="10 samples"):
            fit_decay(NormSeries(times=t, values=np.exp(-t)))

    def test_nonpositive_values_rejected(self):
        t = np.linspace(0, 1, 12)
        v = np.exp(-t)
        v[5] = 0.0
        with pytest.raises(ValueError, match="nonpositive norm in window"):
            fit_decay(NormSeries(times=t, values=v))

    def test_window_selection(self):
        t = np.linspace(0.0, 10.0, 101)
        v = np.where(t < 5, np.exp(-t), np.exp(-5) * np.exp(-0.1 * (t - 5)))
        fit = fit_decay(NormSeries(times=t, values=v), window=(6.0, 10.0))
        assert fit.rate == pytest.approx(-0.1, abs=1e-10)

    def test_linear_regime_rate_matches_the_slowest_symbol(self, cfg_rotation_d2):
        # tiny data, antisymmetric matrix: the flow is essentially linear and
        # the unweighted norm decays at the rate of the lowest surviving mode
        lat = Lattice(2, 4)
        f = small_field(lat, 1, amp=1e-4)
        icfg = IntegratorConfig(dt=1e-3, snapshot_stride=20)
        sched = NormSchedule(kappa=0.0, r=2.0, mode="fixed", offset=0.0)
        res = simulate(f, zero_path(4.0, 1e-3), 4.0, icfg, cfg_rotation_d2, [sched])
        series = series_from_result(res)[0]
        fit = fit_decay(series, window=(2.0, 4.0))
        expected = -linear_symbol((1, 0), cfg_rotation_d2).real
        assert fit.rate == pytest.approx(expected, rel=2e-2)


class TestMonotonicity:
    def test_constant_zero_series_is_monotone(self):
        t = np.linspace(0, 1, 11)
        assert monotonicity_check(NormSeries(times=t, values=np.zeros(11))).monotone

    def test_violation_is_located(self):
        t = np.linspace(0, 1, 6)
        v = np.array([1.0, 0.9, 0.95, 0.8, 0.7, 0.6])
        verdict = monotonicity_check(NormSeries(times=t, values=v))
        assert not verdict.monotone
        assert verdict.first_violation_index == 2
        assert verdict.first_violation_time == pytest.approx(t[2])

    def test_tolerance_absorbs_rounding(self):
        t = np.linspace(0, 1, 4)
        v = np.array([1.0, 0.5, 0.5 * (1 + 1e-12), 0.25])
        assert monotonicity_check(NormSeries(times=t, values=v)).monotone


class TestSmallnessMargin:
    def test_zero_state_has_the_full_margin(self, cfg_repulsive_d1, lat16):
        zeta = compute_zeta(cfg_repulsive_d1)
        state = SimState(t=0.0, rho=SpectralField.zero(lat16), w=0.0,
                         phi=cfg_repulsive_d1.alpha)
        spec = GevreyNormSpec(a=0.15, kappa=0.9, r=1.0, s=1.0)
        margin = smallness_margin(state, spec, cfg_repulsive_d1, smallness_constant=1.0)
        assert margin == pytest.approx(zeta.value / 2.0, rel=1e-12)

    def test_doubling_the_constant_halves_the_threshold(self, cfg_repulsive_d1, lat16):
        state = SimState(t=0.0, rho=SpectralField.zero(lat16), w=0.0,
                         phi=cfg_repulsive_d1.alpha)
        spec = GevreyNormSpec(a=0.15, kappa=0.9, r=1.0, s=1.0)
        m1 = smallness_margin(state, spec, cfg_repulsive_d1, smallness_constant=1.0)
        m2 = smallness_margin(state, spec, cfg_repulsive_d1, smallness_constant=2.0)
        assert m2 == pytest.approx(m1 / 2.0, rel=1e-12)

    def test_margin_persists_along_admissible_runs(self, cfg_repulsive_d1):
        lat = Lattice(1, 16)
        zeta = compute_zeta(cfg_repulsive_d1)
        sched = NormSchedule(kappa=0.9, r=1.0, mode="phi", offset=0.0)
        f = random_hermitian_field(lat, 2, decay=0.5)
        f = f * (0.1 * zeta.value / gevrey0(f, sched, cfg_repulsive_d1))
        path = omega_path(cfg_repulsive_d1, horizon=2.0, dt=1e-3, start_seed=0)
        icfg = IntegratorConfig(dt=1e-3, snapshot_stride=100)
        res = simulate(f, path, 2.0, icfg, cfg_repulsive_d1, [sched])
        margins = [
            smallness_margin(s, sched.spec(cfg_repulsive_d1, s.t), cfg_repulsive_d1,
                             smallness_constant=1.0, zeta=zeta)
            for s in res.states
        ]
        assert margins[0] > 0
        assert all(m > 0 for m in margins)


def gevrey0(f, sched, cfg):
    from gevrey_flow import gevrey_norm

    return gevrey_norm(f, sched.spec(cfg, 0.0))


def omega_path(cfg, horizon, dt, start_seed):
    from gevrey_flow import omega_verdict

    children = np.random.SeedSequence(start_seed).spawn(4000)
    for child in children:
        p = sample_path(horizon, dt, child)
        if omega_verdict(p, cfg.alpha, cfg.beta, cfg.nu).member:
            return p
    raise RuntimeError("no barrier-event path found")


class TestEmbeddingSuite:
    def test_small_run_has_no_violations(self):
        report = embedding_suite(n_fields=120, seed=3)
        assert report.violations == 0
        assert set(report.max_ratios) == {
            "radius_monotone", "radius_smoothing_trade", "summability_embedding",
            "phys_l2", "phys_linf",
        }
        assert report.max_ratios["radius_monotone"] <= 1.0 + 1e-12

    def test_holder_constant_is_sharp_for_flat_fields(self):
        # a field spread evenly over the modes used in the Hoelder bound
        lat = Lattice(1, 6)
        delta, c = holder_embedding_constant(lat, p=1.0, r=INF, eps=0.01)
        coeffs = np.zeros(lat.n_modes, dtype=complex)
        kn = lat.mode_norms
        for i in range(lat.n_modes):
            if kn[i] > 0:
                coeffs[i] = kn[i] ** (-delta)
        f = SpectralField(lat, coeffs, real_valued=False)
        from gevrey_flow import fourier_lebesgue_norm

        lhs = fourier_lebesgue_norm(f, 0.0, 1.0)
        rhs = c * fourier_lebesgue_norm(f, delta, INF)
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestBilinearShape:
    def test_ratio_is_bounded_by_the_termwise_ceiling(self, cfg_repulsive_d1):
        lat = Lattice(1, 12)
        report = bilinear_shape_report(cfg_repulsive_d1, lat, n_samples=100, seed=5)
        ceiling = cfg_repulsive_d1.kernel.bound_constant() / (2 * math.pi) ** lat.d
        assert 0 < report.max_ratio <= ceiling * (1 + 1e-9)
        assert "reported" in report.note


class TestDissipation:
    @pytest.mark.filterwarnings("ignore::gevrey_flow.errors.OffOmegaWarning")
    def test_per_mode_inequality_holds_up_to_discretisation(self, cfg_repulsive_d1):
        lat = Lattice(1, 16)
        f = small_field(lat, 6, amp=0.05)
        sched = NormSchedule(kappa=0.9, r=1.0, mode="phi", offset=0.05)
        icfg = IntegratorConfig(dt=1e-3, snapshot_stride=1)
        res = simulate(f, sample_path(1.0, 1e-3, 11), 1.0, icfg, cfg_repulsive_d1, [sched])
        report = dissipation_check(res, max_pairs=100)
        assert report.max_scaled_residual <= 5.0


class TestRescaleEquivalence:
    @pytest.mark.filterwarnings("ignore::gevrey_flow.errors.OffOmegaWarning")
    def test_identity_at_m_one(self, cfg_repulsive_d1):
        lat = Lattice(1, 12)
        f = small_field(lat, 7, amp=0.02)
        path = sample_path(0.2, 1e-3, 13)
        icfg = IntegratorConfig(dt=1e-3, snapshot_stride=20)
        cfg = cfg_repulsive_d1
        assert rescale_equivalence_check(cfg, 1.0, path, f, 0.2, icfg) == 0.0

    @pytest.mark.filterwarnings("ignore::gevrey_flow.errors.OffOmegaWarning")
    def test_linear_regime_m_four(self, cfg_rotation_d2):
        lat = Lattice(2, 4)
        f = small_field(lat, 8, amp=1e-5)
        path = sample_path(0.2, 1e-3, 14)
        icfg = IntegratorConfig(dt=1e-3, snapshot_stride=20)
        disc = rescale_equivalence_check(cfg_rotation_d2, 4.0, path, f, 0.2, icfg)
        assert disc <= 1e-10

    @pytest.mark.filterwarnings("ignore::gevrey_flow.errors.OffOmegaWarning")
    def test_nonlinear_small_data_m_two(self, cfg_repulsive_d1):
        lat = Lattice(1, 12)
        cfg = cfg_repulsive_d1.replace(mass=2.0)
        f = small_field(lat, 9, amp=0.02)
        path = sample_path(0.4, 1e-3, 15)
        icfg = IntegratorConfig(dt=1e-3, snapshot_stride=40)
        disc = rescale_equivalence_check(cfg, 2.0, path, f, 0.4, icfg)
        assert disc <= 10 * 1e-3  # ten times the step-size tolerance
        assert disc <= 1e-10  # exact conjugacy of the discrete flows


class TestSeriesExtraction:
    def test_series_carry_labels_and_values(self, cfg_repulsive_d1):
        lat = Lattice(1, 8)
        f = small_field(lat, 10)
        sched = NormSchedule(kappa=0.9, r=1.0, mode="phi", offset=0.05)
        icfg = IntegratorConfig(dt=1e-2, snapshot_stride=5)
        res = simulate(f, zero_path(0.5, 1e-2), 0.5, icfg, cfg_repulsive_d1, [sched])
        series = series_from_result(res)
        assert len(series) == 1
        assert series[0].label == sched.label
        assert series[0].values[0] > 0
