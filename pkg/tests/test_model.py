import math

import numpy as np
import pytest

from gevrey_flow import (
    InteractionMatrix,
    ModelConfig,
    PowerLawKernel,
    TabulatedKernel,
    TailBoundError,
    check_admissibility,
    compute_lambda_k0,
    compute_zeta,
    derived_params,
    linear_symbol,
    omega_probability_closed_form,
    rescale_mass,
)
from gevrey_flow.model import _margin_expr


def make_cfg(d=1, matrix=None, gamma=2.0, s=1.0, nu=1.0, beta=0.1, alpha=0.1, **kw):
    if matrix is None:
        matrix = InteractionMatrix.scalar(-1.0) if d == 1 else InteractionMatrix.rotation()
    return ModelConfig(
        d=d, s=s, nu=nu, alpha=alpha, beta=beta, epsilon=kw.pop("epsilon", 0.0),
        matrix=matrix, kernel=PowerLawKernel(gamma), **kw,
    )


class TestKernelsAndMatrix:
    def test_power_law_values_and_zero_mode(self):
        k = PowerLawKernel(2.0)
        modes = np.array([[0], [1], [2], [-2]])
        vals = k.ghat(modes)
        assert vals[0] == 0.0
        assert vals[1] == 1.0
        assert vals[2] == vals[3] == 0.25
        assert k.bound_constant() == 1.0

    def test_tabulated_kernel_validation(self):
        with pytest.raises(ValueError, match="Hermitian"):
            TabulatedKernel(1.0, {(1,): 1.0 + 1.0j, (-1,): 1.0 + 1.0j})
        k = TabulatedKernel(1.0, {(1,): 0.5 + 0.25j, (-1,): 0.5 - 0.25j})
        assert k.table[(0,)] == 0.0
        assert k.coverage == 1
        assert k.bound_constant() == pytest.approx(abs(0.5 + 0.25j))

    def test_tabulated_kernel_refuses_uncovered_tails(self):
        k = TabulatedKernel(2.0, {(1,): 1.0, (-1,): 1.0})
        cfg = ModelConfig(
            d=1, s=1.0, nu=1.0, alpha=0.1, beta=0.1, epsilon=0.0,
            matrix=InteractionMatrix.scalar(-1.0), kernel=k,
        )
        with pytest.raises(TailBoundError, match="tail not controllable"):
            compute_zeta(cfg)

    def test_matrix_structure_flags(self):
        rot = InteractionMatrix.rotation()
        assert rot.is_antisymmetric and not rot.is_symmetric
        assert rot.op_norm == pytest.approx(1.0)
        assert rot.sym_op_norm == 0.0
        ident = InteractionMatrix.identity(2)
        assert ident.is_symmetric and ident.op_norm == pytest.approx(1.0)
        scalar = InteractionMatrix.scalar(-3.0)
        assert scalar.op_norm == pytest.approx(3.0)


class TestModelConfig:
    def test_window_violation_is_recorded_not_fatal(self):
        cfg = make_cfg(gamma=1.0, s=0.5)  # needs s > 1/2
        assert not cfg.s_window_ok
        assert any("window" in w for w in cfg.config_warnings)

    def test_nu_zero_allowed_with_warning(self):
        cfg = make_cfg(nu=0.0)
        assert any("nu=0" in w for w in cfg.config_warnings)

    def test_invalid_parameters_raise(self):
        with pytest.raises(ValueError):
            make_cfg(s=1.5)
        with pytest.raises(ValueError):
            make_cfg(nu=-1.0)
        with pytest.raises(ValueError):
            ModelConfig(
                d=2, s=1.0, nu=1.0, alpha=0.1, beta=0.1, epsilon=0.0,
                matrix=InteractionMatrix.scalar(1.0), kernel=PowerLawKernel(2.0),
            )


class TestLinearSymbol:
    def test_antisymmetric_matrix_leaves_pure_diffusion(self):
        cfg = make_cfg(d=2)
        for k in [(1, 0), (2, 1), (-3, 2)]:
            kn2 = k[0] ** 2 + k[1] ** 2
            assert linear_symbol(k, cfg) == pytest.approx(0.5 * kn2, rel=1e-15)

    def test_worked_example(self):
        cfg = make_cfg(d=1)  # M = (-1), ghat = |k|^-2, s = 1, nu = 1
        # independent recomputation: nu^2 k^2/2 - (k M k) ghat(k)
        k = 2
        expected = 0.5 * k**2 - (k * (-1.0) * k) * k**-2.0
        assert expected == 3.0
        assert linear_symbol([k], cfg) == pytest.approx(3.0, rel=1e-15)

    def test_zero_mode_vanishes(self):
        assert linear_symbol([0], make_cfg(d=1)) == 0.0
        assert linear_symbol((0, 0), make_cfg(d=2)) == 0.0


class TestZeta:
    def test_rotation_case_is_exact(self):
        z = compute_zeta(make_cfg(d=2))
        assert z.value == pytest.approx(0.4, abs=1e-15)
        assert z.width == 0.0
        assert z.attained

    def test_attractive_case_is_negative(self):
        z = compute_zeta(make_cfg(d=1, matrix=InteractionMatrix.scalar(1.0), beta=0.0))
        assert z.value == pytest.approx(-0.5, abs=1e-15)
        assert z.width == 0.0
        assert abs(z.argmin_mode[0]) == 1
        report = check_admissibility(
            make_cfg(d=1, matrix=InteractionMatrix.scalar(1.0), beta=0.0), 0.9, 1.0
        )
        assert report.condition("zeta_positive").ok is False
        assert not report.passed

    def test_repulsive_case_hits_the_tail_infimum(self):
        z = compute_zeta(make_cfg(d=1, beta=0.0))
        assert not z.attained
        assert z.width <= 1e-9
        assert z.value == pytest.approx(0.5, abs=2e-9)

    def test_bracket_is_stable_under_refinement(self):
        cfg = make_cfg(d=1, beta=0.05, gamma=1.5)
        coarse = compute_zeta(cfg, k_star=128)
        fine = compute_zeta(cfg, k_star=256)
        assert coarse.lower - 1e-15 <= fine.value <= coarse.upper + 1e-15

    def test_sign_flip_of_matrix_flips_the_kernel_term(self):
        cfg = make_cfg(d=1, beta=0.3, gamma=1.5)
        flipped = cfg.replace(matrix=-cfg.matrix)
        modes = np.arange(1, 50)[:, None]
        kn = np.abs(modes[:, 0]).astype(float)
        base = _margin_expr(cfg, modes, kn, -1.0)
        flip = _margin_expr(flipped, modes, kn, -1.0)
        diffusion = 0.5 * cfg.nu**2 - cfg.beta * kn**-cfg.s
        assert np.allclose(base + flip, 2 * diffusion, rtol=1e-14)

    def test_tail_refusal_when_uncontrollable(self):
        cfg = make_cfg(gamma=0.5, s=0.7)  # 2s = 1.4 < 2 - gamma = 1.5
        with pytest.raises(TailBoundError, match="tail not controllable"):
            compute_zeta(cfg)


class TestLambdaK0:
    def test_rotation_with_unit_beta(self):
        lk = compute_lambda_k0(make_cfg(d=2, beta=1.0))
        assert lk.lam == pytest.approx(0.5, abs=1e-15)
        assert lk.k0 == pytest.approx(2.0, abs=1e-15)

    def test_zero_beta_antisymmetric_is_degenerate(self):
        lk = compute_lambda_k0(make_cfg(d=2, beta=0.0))
        assert lk.lam == 0.0
        assert lk.k0 == 0.0

    def test_attractive_case(self):
        lk = compute_lambda_k0(
            make_cfg(d=1, matrix=InteractionMatrix.scalar(1.0), beta=0.0)
        )
        assert lk.lam == pytest.approx(0.5, abs=1e-15)
        assert lk.k0 == pytest.approx(1.0, abs=1e-15)

    def test_positive_part_is_confined_below_k0(self):
        def restricted_sup(cfg, k0):
            best = 0.0
            for k1 in range(-4, 5):
                for k2 in range(-4, 5):
                    kn = math.hypot(k1, k2)
                    if kn == 0 or kn > k0:
                        continue
                    best = max(best, cfg.beta * kn - 0.5 * kn**2)
            return best

        # growth margin is attained inside |k| <= k0 whether or not it is positive
        cfg = make_cfg(d=2, beta=1.0)
        lk = compute_lambda_k0(cfg)
        assert restricted_sup(cfg, lk.k0) == pytest.approx(lk.lam, abs=1e-15)
        # in the decaying regime (zeta > 0) the sup collapses to the zero mode
        cfg_dec = make_cfg(d=2, beta=0.4)
        assert compute_zeta(cfg_dec).value > 0
        lk_dec = compute_lambda_k0(cfg_dec)
        assert lk_dec.lam == 0.0 and lk_dec.k0 == 0.0
        assert restricted_sup(cfg_dec, lk_dec.k0) == lk_dec.lam

    def test_nu_zero_is_refused(self):
        with pytest.raises(TailBoundError, match="tail not controllable"):
            compute_lambda_k0(make_cfg(nu=0.0))


class TestAdmissibility:
    def test_reference_window_passes(self):
        report = check_admissibility(make_cfg(d=1), sigma=0.9, r=1.0)
        for name in ("s_window", "sigma_window", "lwp2_summability",
                     "lwp3_time_integrability", "zeta_positive"):
            assert report.condition(name).ok, name
        assert report.condition("smallness").ok is None
        assert report.passed

    def test_s_below_half_fails(self):
        report = check_admissibility(make_cfg(gamma=1.0, s=0.5), sigma=0.4, r=1.0)
        assert report.condition("s_window").ok is False

    def test_sigma_boundary_fails_strict_inequality(self):
        s = 1.0
        report = check_admissibility(make_cfg(d=1, s=s), sigma=(2 * s - 1) / s, r=1.0)
        assert report.condition("lwp3_time_integrability").ok is False
        assert report.condition("sigma_window").ok is False

    def test_smallness_branch(self):
        cfg = make_cfg(d=1)
        small = check_admissibility(cfg, 0.9, 1.0, smallness_constant=1.0, rho0_norm=1e-3)
        assert small.condition("smallness").ok is True
        big = check_admissibility(cfg, 0.9, 1.0, smallness_constant=1.0, rho0_norm=10.0)
        assert big.condition("smallness").ok is False

    def test_inf_summability_branches_evaluate(self):
        report = check_admissibility(make_cfg(d=1, gamma=2.0), sigma=0.9, r=float("inf"))
        assert report.condition("lwp2_summability").ok is not None

    def test_report_serialises(self):
        doc = check_admissibility(make_cfg(d=1), 0.9, 1.0).to_dict()
        assert {"passed", "conditions", "zeta", "zeta_bracket", "sign_note"} <= set(doc)


class TestOmegaClosedForm:
    def test_reference_value(self):
        assert omega_probability_closed_form(1, 1, 1) == pytest.approx(
            1 - math.exp(-2), rel=1e-15
        )
        assert omega_probability_closed_form(1, 1, 1) == pytest.approx(
            0.86466472, abs=1e-8
        )

    def test_small_alpha_limit(self):
        assert omega_probability_closed_form(1e-12, 1.0, 1.0) == pytest.approx(
            2e-12, rel=1e-9
        )

    def test_depends_only_on_the_product(self):
        assert omega_probability_closed_form(0.5, 2.0, 1.0) == pytest.approx(
            1 - math.exp(-2), rel=1e-15
        )

    def test_monotonicity_grid(self):
        alphas = np.linspace(0.2, 2.0, 8)
        vals = [omega_probability_closed_form(a, 1.0, 1.0) for a in alphas]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        nus = np.linspace(0.3, 3.0, 8)
        vals = [omega_probability_closed_form(1.0, 1.0, n) for n in nus]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_rejects_nonpositive_arguments(self):
        for bad in [(0, 1, 1), (1, -1, 1), (1, 1, 0)]:
            with pytest.raises(ValueError):
                omega_probability_closed_form(*bad)


class TestRescaleMass:
    def test_identity_at_m_one(self):
        cfg = make_cfg(d=1)
        cfg_m, resc = rescale_mass(cfg, 1.0)
        assert cfg_m.nu == cfg.nu and cfg_m.mass == cfg.mass
        assert resc.map_time(3.0) == 3.0
        assert resc.amplitude_factor == 1.0

    def test_m_four_maps(self):
        cfg = make_cfg(d=1)
        cfg_m, resc = rescale_mass(cfg, 4.0)
        assert cfg_m.nu == pytest.approx(0.5, rel=1e-15)
        assert resc.map_time(1.0) == pytest.approx(0.25, rel=1e-15)
        assert resc.amplitude_factor == pytest.approx(0.25, rel=1e-15)

    def test_path_transform_is_again_a_unit_path(self):
        from gevrey_flow import sample_path

        cfg = make_cfg(d=1)
        _, resc = rescale_mass(cfg, 4.0)
        path = sample_path(1.0, 1e-2, 3)
        mapped = resc.transform_path(path)
        assert mapped.times[-1] == pytest.approx(4.0, rel=1e-12)
        assert np.allclose(mapped.values, 2.0 * path.values, rtol=0, atol=0)


class TestDerivedParams:
    def test_report_keys_and_sign_note(self):
        doc = derived_params(make_cfg(d=2)).to_dict()
        for key in ("zeta", "zeta_bracket", "lambda", "k0", "omega_prob",
                    "zeta_alt", "sign_note", "search_radius"):
            assert key in doc
        assert doc["zeta"] == pytest.approx(0.4)
        # rotation kills the kernel term, so both sign conventions agree
        assert doc["zeta_alt"] == pytest.approx(doc["zeta"])

    def test_sign_conventions_differ_for_gradient_flows(self):
        dp = derived_params(make_cfg(d=1, beta=0.0))
        assert dp.zeta.value == pytest.approx(0.5, abs=2e-9)   # repulsive, minus form
        assert dp.zeta_alt.value == pytest.approx(-0.5, abs=1e-15)
