import numpy as np
import pytest

from steerlab import assemblage as am
from steerlab import lhs
from steerlab.errors import DomainError
from steerlab.filtering import apply_filter, averaged_output, paper_filter

from conftest import rand_assemblage, rand_product_assemblage


class TestStrategies:
    def test_count(self):
        assert len(lhs.deterministic_strategies(2, 2)) == 4
        assert len(lhs.deterministic_strategies(3, 2)) == 8

    def test_cap(self):
        with pytest.raises(DomainError):
            lhs.deterministic_strategies(4, 4)


class TestMembership:
    def test_product_assemblage_feasible(self, rng):
        for _ in range(10):
            asm = rand_product_assemblage(rng)
            feasible, model = lhs.lhs_membership(asm)
            assert feasible
            assert model.residual_against(asm.components) < 1e-6

    def test_failed_filter_output_feasible(self):
        out, _ = apply_filter(am.alpha_assemblage(0.8), paper_filter(0.8), 1)
        feasible, model = lhs.lhs_membership(out)
        assert feasible
        assert model is not None

    def test_singlet_infeasible(self):
        feasible, model = lhs.lhs_membership(am.singlet_assemblage())
        assert not feasible
        assert model is None

    def test_model_weights_psd(self, rng):
        _, model = lhs.lhs_membership(rand_product_assemblage(rng))
        for w in model.weights:
            assert np.linalg.eigvalsh(w)[0] >= -1e-12
        assert model.total_weight() == pytest.approx(1.0, abs=1e-6)


class TestRobustness:
    def test_lhs_assemblage_is_zero(self, rng):
        for _ in range(5):
            res = lhs.lhs_robustness(rand_product_assemblage(rng))
            assert res.t_star <= 1e-6

    def test_singlet_regression_value(self):
        res = lhs.lhs_robustness(am.singlet_assemblage())
        assert res.t_star == pytest.approx(lhs.SINGLET_ROBUSTNESS, abs=1e-6)
        # numerically (sqrt(2) - 1) / 2
        assert res.t_star == pytest.approx((np.sqrt(2) - 1) / 2, abs=1e-6)

    def test_generalized_flavor_singlet(self):
        res = lhs.lhs_robustness(am.singlet_assemblage(),
                                 lhs.FLAVOR_GENERALIZED)
        assert res.t_star == pytest.approx((np.sqrt(2) - 1) ** 2, abs=1e-6)
        assert res.t_star < lhs.SINGLET_ROBUSTNESS

    def test_unknown_flavor(self):
        with pytest.raises(DomainError):
            lhs.lhs_robustness(am.singlet_assemblage(), "bogus")

    def test_averaging_increases_robustness(self):
        single = lhs.lhs_robustness(am.alpha_assemblage(0.8)).t_star
        averaged = lhs.lhs_robustness(averaged_output(0.8, 2)).t_star
        assert averaged > single

    def test_monotone_in_imbalance(self):
        grid = [0.55, 0.65, 0.75, 0.85, 0.95]
        values = [lhs.lhs_robustness(am.alpha_assemblage(a2)).t_star
                  for a2 in grid]
        singlet = lhs.lhs_robustness(am.singlet_assemblage()).t_star
        for a2_val in values:
            assert singlet >= a2_val - 1e-8
        for lo, hi in zip(values[1:], values):
            assert lo <= hi + 1e-8

    def test_convexity(self, rng):
        for _ in range(5):
            a, b = rand_assemblage(rng), rand_assemblage(rng)
            p = rng.random()
            mixed = am.mix(a, b, p)
            t_mix = lhs.lhs_robustness(mixed).t_star
            t_a = lhs.lhs_robustness(a).t_star
            t_b = lhs.lhs_robustness(b).t_star
            assert t_mix <= p * t_a + (1 - p) * t_b + 1e-6

    def test_membership_iff_zero(self, rng):
        for _ in range(5):
            asm = rand_product_assemblage(rng)
            feasible, _ = lhs.lhs_membership(asm)
            t_star = lhs.lhs_robustness(asm).t_star
            assert feasible == (t_star <= 1e-6)

    def test_certificate_reconstructs_mixture(self, rng):
        cases = [am.singlet_assemblage(), am.alpha_assemblage(0.8),
                 rand_assemblage(rng), rand_product_assemblage(rng)]
        for asm in cases:
            res = lhs.lhs_robustness(asm)
            assert res.residual <= 1e-7
            mixed = asm.components / (1.0 + res.t_star)
            if res.noise is not None:
                assert am.validate(res.noise, tol=1e-6) == []
                mixed = mixed + res.t_star / (1.0 + res.t_star) * \
                    res.noise.components
            assert res.certificate.residual_against(np.asarray(mixed)) <= 1e-7

    def test_noise_is_lhs_for_default_flavor(self):
        res = lhs.lhs_robustness(am.singlet_assemblage())
        feasible, _ = lhs.lhs_membership(res.noise)
        assert feasible


class TestOracle:
    def test_singlet_agreement(self):
        val = lhs.robustness_oracle(am.singlet_assemblage())
        assert val == pytest.approx(lhs.SINGLET_ROBUSTNESS, abs=1e-3)

    def test_zero_on_product(self, rng):
        asm = rand_product_assemblage(rng)
        assert lhs.robustness_oracle(asm) == pytest.approx(0.0, abs=1e-3)

    def test_random_agreement(self, rng):
        for _ in range(8):
            asm = rand_assemblage(rng, pure=bool(rng.integers(2)))
            ip = lhs.lhs_robustness(asm).t_star
            oracle = lhs.robustness_oracle(asm)
            assert oracle == pytest.approx(ip, abs=1e-3)

    def test_generalized_agreement(self):
        ip = lhs.lhs_robustness(am.singlet_assemblage(),
                                lhs.FLAVOR_GENERALIZED).t_star
        oracle = lhs.robustness_oracle(am.singlet_assemblage(),
                                       lhs.FLAVOR_GENERALIZED)
        assert oracle == pytest.approx(ip, abs=1e-3)
