import types

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import ndtr, ndtri

from sqmckit import models as md
from sqmckit.resampling import multinomial_ancestors
from sqmckit.smc import SmcConfig, run_smc, substream
from sqmckit.sqmc import SqmcConfig, run_sqmc

_SQRT_2PI = np.sqrt(2 * np.pi)


def norm_pdf(x, mean=0.0, sd=1.0):
    return np.exp(-0.5 * ((x - mean) / sd) ** 2) / (sd * _SQRT_2PI)


class TestRareEvent:
    def test_bootstrap_potential_is_indicator(self):
        m = md.Ar1RareEventModel(phi=0.5)
        lg = m.log_G(1, np.zeros((3, 1)), np.array([[1.0], [-0.1], [0.0]]))
        assert lg.tolist() == [0.0, -np.inf, 0.0]

    def test_guided_proposal_density_integrates_to_one(self):
        phi = 0.6
        for xp in (-1.3, 0.0, 0.7, 2.5):
            total, err = quad(
                lambda x: norm_pdf(x - phi * xp) / ndtr(phi * xp), 0.0, np.inf
            )
            assert total == pytest.approx(1.0, abs=1e-6)

    def test_guided_sampler_matches_truncated_law(self):
        phi, xp = 0.8, -0.4
        m = md.Ar1RareEventGuided(phi=phi)
        u = np.linspace(0.001, 0.999, 2001)[:, None]
        x = m.gamma_t(1, np.full((2001, 1), xp), u)[:, 0]
        assert np.all(x >= 0)
        # quantile check: CDF of the truncated law at the sampled points = u
        cdf = (ndtr(x - phi * xp) - ndtr(-phi * xp)) / ndtr(phi * xp)
        assert np.abs(cdf - u[:, 0]).max() < 1e-9

    def test_guided_phi_zero_is_exact_with_zero_variance(self):
        m = md.Ar1RareEventGuided(phi=0.0)
        lls = [
            run_smc(m, SmcConfig(500, 4, seed=s)).log_likelihood[-1] for s in range(3)
        ]
        assert np.ptp(lls) == 0.0
        assert np.exp(lls[0]) == pytest.approx(2.0**-5)

    def test_phi_validation(self):
        with pytest.raises(ValueError):
            md.Ar1RareEventModel(phi=1.0)

    def test_bootstrap_and_guided_same_filter(self):
        horizon, n, reps, phi = 10, 2**13, 8, 0.8
        eb = np.array([
            run_smc(md.Ar1RareEventModel(phi), SmcConfig(n, horizon, seed=s)).moments["mean_x1"]
            for s in range(reps)
        ])
        eg = np.array([
            run_smc(md.Ar1RareEventGuided(phi), SmcConfig(n, horizon, seed=s + 50)).moments["mean_x1"]
            for s in range(reps)
        ])
        gap = np.abs(eb.mean(axis=0) - eg.mean(axis=0))
        joint_se = np.sqrt(eb.var(axis=0, ddof=1) / reps + eg.var(axis=0, ddof=1) / reps)
        assert np.mean(gap <= 3 * joint_se) >= 0.9


class TestStochVol:
    def test_guided_proposal_is_the_normalized_linearized_density(self):
        # completing the square must reproduce the linearized kernel up to
        # a constant: check the ratio is flat and the density integrates to 1
        m = md.StochVolModel(y=np.array([0.9, -2.1]), mu=-0.5, phi=0.9, sigma=0.4,
                             variant="guided")
        t, xp = 1, np.array([[0.3]])
        prior_mean = m.mu + m.phi * (xp[0, 0] - m.mu)
        y = m.y[t]

        def linearized_kernel(x):
            lin = np.exp(-prior_mean) * (1.0 + prior_mean - x)
            return np.exp(
                -0.5 * (x - prior_mean) ** 2 / m.sigma**2 - x / 2 - y**2 * lin / 2
            )

        mean, sd = m._proposal(t, xp)
        mean, sd = float(mean[0, 0]), float(sd)
        xs = np.linspace(mean - 6 * sd, mean + 6 * sd, 301)
        ratio = linearized_kernel(xs) / norm_pdf(xs, mean, sd)
        assert np.ptp(ratio) / ratio.mean() < 1e-9
        total, _ = quad(lambda x: norm_pdf(x, mean, sd), -np.inf, np.inf)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_stationary_initial_distribution(self):
        m = md.StochVolModel(y=np.zeros(1), mu=-1.0, phi=0.95, sigma=0.3)
        u = np.random.default_rng(0).random((200_000, 1))
        x0 = m.gamma0(u)[:, 0]
        assert x0.mean() == pytest.approx(-1.0, abs=0.01)
        assert x0.std() == pytest.approx(0.3 / np.sqrt(1 - 0.95**2), abs=0.01)

    def test_bootstrap_and_guided_same_filter(self):
        horizon, n, reps = 20, 2**13, 8
        _, y = md.simulate_stochvol(-1.0, 0.9, 0.5, horizon, seed=4)
        boot = md.StochVolModel(y, -1.0, 0.9, 0.5, variant="bootstrap")
        guid = md.StochVolModel(y, -1.0, 0.9, 0.5, variant="guided")
        eb = np.array([
            run_smc(boot, SmcConfig(n, horizon, seed=s)).moments["mean_x1"]
            for s in range(reps)
        ])
        eg = np.array([
            run_smc(guid, SmcConfig(n, horizon, seed=s + 50)).moments["mean_x1"]
            for s in range(reps)
        ])
        gap = np.abs(eb.mean(axis=0) - eg.mean(axis=0))
        joint_se = np.sqrt(eb.var(axis=0, ddof=1) / reps + eg.var(axis=0, ddof=1) / reps)
        assert np.mean(gap <= 3 * joint_se) >= 0.9

    def test_guided_weights_have_lower_variance(self):
        horizon, n = 25, 4096
        _, y = md.simulate_stochvol(-1.0, 0.9, 0.5, horizon, seed=6)
        variances = {}
        for variant in ("bootstrap", "guided"):
            m = md.StochVolModel(y, -1.0, 0.9, 0.5, variant=variant)
            rng_u = substream(3, 0, 0)
            x = m.gamma0(rng_u.random((n, 1)))
            w = np.full(n, 1.0 / n)
            per_t = []
            for t in range(1, horizon + 1):
                anc = multinomial_ancestors(w, n, substream(3, t, 1))
                xp = x[anc]
                x = m.gamma_t(t, xp, substream(3, t, 2).random((n, 1)))
                lg = m.log_G(t, xp, x)
                per_t.append(np.var(lg))
                from sqmckit.core import normalize_weights

                w, _ = normalize_weights(lg, t)
            variances[variant] = np.median(per_t)
        assert variances["guided"] < variances["bootstrap"]


class TestLinGauss:
    def test_transition_matrix_properties(self):
        f = md.ar_transition_matrix(5, 0.4)
        assert np.array_equal(f, f.T)
        assert np.abs(np.linalg.eigvals(f)).max() < 1.0
        assert f[0, 0] == pytest.approx(0.4)

    def test_alpha_zero_forgets_the_past(self):
        y = np.zeros((3, 1))
        m = md.LinGaussModel(y, d=1, alpha=0.0, variant="bootstrap")
        v = np.random.default_rng(0).random((6, 1))
        a = m.gamma_t(1, np.zeros((6, 1)), v)
        b = m.gamma_t(1, np.full((6, 1), 9.9), v)
        assert np.array_equal(a, b)

    def test_guided_weight_constant_in_new_state(self):
        _, y = md.simulate_lingauss(3, 0.4, 2, seed=1)
        m = md.LinGaussModel(y, d=3, alpha=0.4, variant="guided")
        xp = np.random.default_rng(2).normal(size=(5, 3))
        x1 = np.random.default_rng(3).normal(size=(5, 3))
        x2 = np.random.default_rng(4).normal(size=(5, 3))
        assert np.array_equal(m.log_G(1, xp, x1), m.log_G(1, xp, x2))

    def test_bootstrap_and_guided_same_filter(self):
        horizon, n, reps = 15, 2**13, 8
        _, y = md.simulate_lingauss(2, 0.4, horizon, seed=9)
        boot = md.LinGaussModel(y, d=2, alpha=0.4, variant="bootstrap")
        guid = md.LinGaussModel(y, d=2, alpha=0.4, variant="guided")
        eb = np.array([
            run_smc(boot, SmcConfig(n, horizon, seed=s)).moments["mean_x1"]
            for s in range(reps)
        ])
        eg = np.array([
            run_smc(guid, SmcConfig(n, horizon, seed=s + 50)).moments["mean_x1"]
            for s in range(reps)
        ])
        gap = np.abs(eb.mean(axis=0) - eg.mean(axis=0))
        joint_se = np.sqrt(eb.var(axis=0, ddof=1) / reps + eg.var(axis=0, ddof=1) / reps)
        assert np.mean(gap <= 3 * joint_se) >= 0.9

    def test_observation_shape_validated(self):
        with pytest.raises(ValueError):
            md.LinGaussModel(np.zeros((3, 2)), d=3, alpha=0.4)


class TestDiffusionEuler:
    def test_constant_path_when_drift_and_noise_vanish(self):
        degenerate = types.SimpleNamespace(kappa=0.0, omega=0.0, mu_x=0.8)
        out = md.euler_propagate(degenerate, 4, np.array([0.37]), np.zeros((1, 4)))
        assert np.all(out == 0.37)

    def test_single_step_algebra(self):
        p = md.DiffusionSVParams(kappa=0.3, omega=0.2, mu_x=0.5)
        x, dw = -0.25, 0.6
        out = md.euler_propagate(p, 1, np.array([x]), np.array([[dw]]))
        drift = (p.kappa * (p.mu_x - np.exp(x)) - 0.5 * p.omega**2) * np.exp(-x)
        expected = x + 1.0 * drift + p.omega * np.exp(-x / 2) * dw
        assert out[0, 0] == pytest.approx(expected, abs=1e-14)

    def test_matches_straight_line_reimplementation(self):
        p = md.DiffusionSVParams(kappa=0.1, omega=0.3, mu_x=0.2, rho=0.1)
        rng = np.random.default_rng(5)
        m = 4
        x0 = rng.normal(size=7)
        incs = rng.normal(scale=0.5, size=(7, m))
        out = md.euler_propagate(p, m, x0, incs)
        for i in range(7):
            prev = x0[i]
            for j in range(m):
                e = np.exp(-prev)
                drift = p.kappa * (p.mu_x - np.exp(prev)) * e - 0.5 * p.omega**2 * e
                prev = prev + drift / m + p.omega * np.exp(-prev / 2) * incs[i, j]
                assert out[i, j] == pytest.approx(prev, abs=0.0)

    def test_overflow_raises_with_diagnostics(self):
        p = md.DiffusionSVParams()
        with pytest.raises(FloatingPointError, match="exp"):
            md.euler_propagate(p, 2, np.array([-710.0]), np.zeros((1, 2)))


class TestDiffusionLogG:
    def test_unit_volatility_reduces_to_standard_gaussian(self):
        p = md.DiffusionSVParams(rho=0.5, beta=0.0, mu_y=0.0)
        p0 = md.DiffusionSVParams(kappa=p.kappa, omega=p.omega, mu_x=p.mu_x,
                                  mu_y=0.0, beta=0.0, rho=0.0)
        x = np.zeros((3, 4))
        incs = np.random.default_rng(0).normal(size=(3, 4))
        y_prev, y = 0.2, 1.1
        lg = md.diffusion_log_G(p0, 4, np.zeros(3), x, y_prev, y, incs)
        expected = -0.5 * (np.log(2 * np.pi) + (y - y_prev) ** 2)
        assert np.allclose(lg, expected)

    def test_rho_zero_ignores_previous_state(self):
        p = md.DiffusionSVParams(rho=0.0)
        y = md.simulate_diffusion_sv(p, 4, seed=3, m_sim=20)
        model = md.DiffusionSVModel(y, p, m=3)
        rng = np.random.default_rng(1)
        x = rng.normal(0.8, 0.3, size=(6, 3))
        a = model.log_G(2, np.full((6, 3), 0.5), x)
        b = model.log_G(2, np.full((6, 3), 1.5), x)
        # the rho * Z term carries the only x_prev dependence
        assert np.array_equal(a, b)

    def test_against_duplicate_implementation(self):
        p = md.DiffusionSVParams(kappa=0.05, omega=0.2, mu_x=0.6, mu_y=0.01,
                                 beta=0.3, rho=-0.3)
        rng = np.random.default_rng(7)
        m = 5
        x = rng.normal(0.6, 0.4, size=(4, m))
        incs = rng.normal(scale=0.4, size=(4, m))
        y_prev, y = 0.3, -0.9
        lg = md.diffusion_log_G(p, m, np.zeros(4), x, y_prev, y, incs)
        for i in range(4):
            s2 = np.mean([np.exp(x[i, j]) for j in range(m)])
            z = sum(np.exp(x[i, j] / 2) * incs[i, j] for j in range(m))
            mean = y_prev + p.mu_y + p.beta * s2 + p.rho * z
            var = (1 - p.rho**2) * s2
            ref = -0.5 * (np.log(2 * np.pi * var) + (y - mean) ** 2 / var)
            assert lg[i] == pytest.approx(ref, rel=1e-12)

    def test_rho_one_rejected(self):
        with pytest.raises(ValueError):
            md.DiffusionSVParams(rho=1.0)


class TestDiffusionModelContract:
    def test_lambda_invariance_exact(self):
        # everything may depend on x_prev only through its last component
        p = md.DiffusionSVParams()
        y = md.simulate_diffusion_sv(p, 5, seed=11, m_sim=20)
        model = md.DiffusionSVModel(y, p, m=4, construction="bridge")
        rng = np.random.default_rng(2)
        xp1 = rng.normal(0.8, 0.3, size=(9, 4))
        xp2 = xp1.copy()
        xp2[:, :-1] = rng.normal(0.8, 0.3, size=(9, 3))  # scramble non-lambda coords
        v = rng.random((9, 4))
        assert np.array_equal(model.gamma_t(2, xp1, v), model.gamma_t(2, xp2, v))
        x = model.gamma_t(2, xp1, v)
        assert np.array_equal(model.log_G(2, xp1, x), model.log_G(2, xp2, x))
        assert np.array_equal(model.lam(xp1), xp1[:, -1:])

    def test_initial_distribution_moments(self):
        p = md.DiffusionSVParams(kappa=0.08, omega=0.2, mu_x=0.5)
        y = np.zeros(2)
        model = md.DiffusionSVModel(y, p, m=3)
        u = np.random.default_rng(0).random((200_000, 3))
        x0 = model.gamma0(u)
        assert np.all(x0 == x0[:, :1])  # constant across the grid
        assert x0[:, 0].mean() == pytest.approx(0.5, abs=0.005)
        assert x0[:, 0].std() == pytest.approx(0.2 / np.sqrt(0.16), abs=0.005)

    def test_g0_is_unit(self):
        p = md.DiffusionSVParams()
        model = md.DiffusionSVModel(np.zeros(3), p, m=2)
        assert np.all(model.log_G(0, None, np.zeros((5, 2))) == 0.0)


class TestSimulators:
    def test_lingauss_reproducible(self):
        a = md.simulate_lingauss(2, 0.4, 10, seed=3)
        b = md.simulate_lingauss(2, 0.4, 10, seed=3)
        assert np.array_equal(a[1], b[1])

    def test_diffusion_constant_vol_moments(self):
        # kappa = omega = 0 freezes the volatility at x0 = mu_x, so
        # increments are N(mu_y + beta e^{mu_x}, e^{mu_x})
        p = types.SimpleNamespace(kappa=1e-12, omega=1e-12, mu_x=0.4, mu_y=0.1,
                                  beta=0.2, rho=0.0)
        y = md.simulate_diffusion_sv(p, 4000, seed=8, m_sim=5)
        inc = np.diff(y)
        assert inc.mean() == pytest.approx(0.1 + 0.2 * np.exp(0.4), abs=0.05)
        assert inc.var() == pytest.approx(np.exp(0.4), abs=0.08)
