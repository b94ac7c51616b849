"""Concrete Feynman-Kac models: AR(1) rare event, stochastic volatility,
linear-Gaussian, and the Euler-discretized diffusion-driven SV model.

Each model implements the deterministic-uniform interface of
`sqmckit.core.FeynmanKacModel`; guided variants pair a proposal kernel
with the Radon-Nikodym potential G = p f / m so that the filtering law
is unchanged.  Samplers use inverse CDFs throughout (no rejection), so
the same model drives both SMC and SQMC.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri

from sqmckit.brownian import PathSpec, increments
from sqmckit.core import FeynmanKacModel

_LOG_2PI = np.log(2.0 * np.pi)
_U_CLAMP = 1e-15


def _inv_gauss(u):
    return ndtri(np.clip(u, _U_CLAMP, 1.0 - _U_CLAMP))


def _norm_logpdf(x, mean, var):
    return -0.5 * (_LOG_2PI + np.log(var) + (x - mean) ** 2 / var)


# ---------------------------------------------------------------------------
# AR(1) rare event (all potentials are survival indicators or their averages)

class Ar1RareEventModel(FeynmanKacModel):
    """Bootstrap formalism: N(phi x, 1) moves, indicator-of-R+ potential."""

    d = 1

    def __init__(self, phi=0.0):
        if not -1.0 < phi < 1.0:
            raise ValueError("phi must be in (-1, 1)")
        self.phi = phi

    def gamma0(self, u):
        return _inv_gauss(u[:, :1])

    def gamma_t(self, t, x_prev, v):
        return self.phi * x_prev + _inv_gauss(v[:, :1])

    def log_G(self, t, x_prev, x):
        return np.where(x[:, 0] >= 0.0, 0.0, -np.inf)


class Ar1RareEventGuided(FeynmanKacModel):
    """Optimal-kernel formalism: moves truncated to R+, G_t = Phi(phi x_prev)."""

    d = 1

    def __init__(self, phi=0.0):
        if not -1.0 < phi < 1.0:
            raise ValueError("phi must be in (-1, 1)")
        self.phi = phi

    def gamma0(self, u):
        return _inv_gauss(0.5 + 0.5 * np.clip(u[:, :1], 0.0, 1.0 - _U_CLAMP))

    def gamma_t(self, t, x_prev, v):
        a = self.phi * x_prev
        lo = ndtr(-a)
        p = lo + np.clip(v[:, :1], 0.0, 1.0 - _U_CLAMP) * (1.0 - lo)
        return a + _inv_gauss(p)

    def log_G(self, t, x_prev, x):
        if t == 0:
            return np.full(x.shape[0], np.log(0.5))
        return log_ndtr(self.phi * x_prev[:, 0])


# ---------------------------------------------------------------------------
# Discrete-time stochastic volatility

class StochVolModel(FeynmanKacModel):
    """Log-volatility AR(1) with N(0, e^x) observations.

    ``variant="guided"`` uses the proposal obtained by linearizing
    exp(-x) around the prior mean, which completes to a Gaussian with
    the prior variance and a data-shifted mean.
    """

    d = 1

    def __init__(self, y, mu=-1.0, phi=0.9, sigma=0.5, variant="bootstrap"):
        if sigma <= 0 or not -1.0 < phi < 1.0:
            raise ValueError("need sigma > 0 and |phi| < 1")
        if variant not in ("bootstrap", "guided"):
            raise ValueError("variant must be 'bootstrap' or 'guided'")
        self.y = np.asarray(y, dtype=np.float64)
        self.mu, self.phi, self.sigma = mu, phi, sigma
        self.sd0 = sigma / np.sqrt(1.0 - phi**2)
        self.variant = variant

    def _prior(self, t, x_prev):
        if t == 0:
            return self.mu, self.sd0
        return self.mu + self.phi * (x_prev[:, :1] - self.mu), self.sigma

    def _proposal(self, t, x_prev):
        mean, sd = self._prior(t, x_prev)
        shift = 0.5 * sd**2 * (self.y[t] ** 2 * np.exp(-mean) - 1.0)
        return mean + shift, sd

    def _log_obs(self, t, x):
        return -0.5 * (_LOG_2PI + x[:, 0] + self.y[t] ** 2 * np.exp(-x[:, 0]))

    def gamma0(self, u):
        if self.variant == "bootstrap":
            return self.mu + self.sd0 * _inv_gauss(u[:, :1])
        mean, sd = self._proposal(0, None)
        return mean + sd * _inv_gauss(u[:, :1])

    def gamma_t(self, t, x_prev, v):
        if self.variant == "bootstrap":
            mean, sd = self._prior(t, x_prev)
        else:
            mean, sd = self._proposal(t, x_prev)
        return mean + sd * _inv_gauss(v[:, :1])

    def log_G(self, t, x_prev, x):
        if self.variant == "bootstrap":
            return self._log_obs(t, x)
        p_mean, p_sd = self._prior(t, x_prev)
        m_mean, m_sd = self._proposal(t, x_prev)
        log_p = _norm_logpdf(x[:, :1], p_mean, p_sd**2)[:, 0]
        log_m = _norm_logpdf(x[:, :1], m_mean, m_sd**2)[:, 0]
        return log_p + self._log_obs(t, x) - log_m


def simulate_stochvol(mu, phi, sigma, horizon, seed):
    """Draw (x, y) paths of length horizon+1 from the SV model itself."""
    rng = np.random.default_rng(seed)
    x = np.empty(horizon + 1)
    x[0] = mu + sigma / np.sqrt(1 - phi**2) * rng.standard_normal()
    for t in range(1, horizon + 1):
        x[t] = mu + phi * (x[t - 1] - mu) + sigma * rng.standard_normal()
    y = np.exp(x / 2.0) * rng.standard_normal(horizon + 1)
    return x, y


# ---------------------------------------------------------------------------
# Linear-Gaussian benchmark

def ar_transition_matrix(d, alpha):
    """F = (alpha^(1+|i-j|)): banded AR coupling with spectral radius < 1."""
    i = np.arange(d)
    return alpha ** (1 + np.abs(i[:, None] - i[None, :]))


class LinGaussModel(FeynmanKacModel):
    """X_t = F X_{t-1} + V_t, Y_t = X_t + W_t, unit noises, X_0 ~ N(0, I).

    The guided variant samples the locally optimal kernel
    N((y_t + F x)/2, I/2) with constant-in-x potential N(y_t; F x_{t-1}, 2 I).
    """

    def __init__(self, y, d=1, alpha=0.4, variant="bootstrap"):
        if not -1.0 < alpha < 1.0:
            raise ValueError("alpha must be in (-1, 1)")
        if variant not in ("bootstrap", "guided"):
            raise ValueError("variant must be 'bootstrap' or 'guided'")
        self.y = np.atleast_2d(np.asarray(y, dtype=np.float64))
        if self.y.shape[1] != d:
            raise ValueError("observations do not match dimension")
        self.d = d
        self.alpha = alpha
        self.F = ar_transition_matrix(d, alpha)
        self.variant = variant

    def gamma0(self, u):
        if self.variant == "bootstrap":
            return _inv_gauss(u)
        return 0.5 * self.y[0] + _inv_gauss(u) / np.sqrt(2.0)

    def gamma_t(self, t, x_prev, v):
        drift = x_prev @ self.F.T
        if self.variant == "bootstrap":
            return drift + _inv_gauss(v)
        return 0.5 * (self.y[t] + drift) + _inv_gauss(v) / np.sqrt(2.0)

    def log_G(self, t, x_prev, x):
        if self.variant == "bootstrap":
            resid = self.y[t] - x
            return -0.5 * (self.d * _LOG_2PI + np.sum(resid**2, axis=1))
        if t == 0:
            sq = np.full(x.shape[0], np.sum(self.y[0] ** 2))
        else:
            resid = self.y[t] - x_prev @ self.F.T
            sq = np.sum(resid**2, axis=1)
        return -0.5 * (self.d * (_LOG_2PI + np.log(2.0)) + 0.5 * sq)


def simulate_lingauss(d, alpha, horizon, seed):
    """Draw (x, y) from the linear-Gaussian model."""
    rng = np.random.default_rng(seed)
    f = ar_transition_matrix(d, alpha)
    x = np.empty((horizon + 1, d))
    x[0] = rng.standard_normal(d)
    for t in range(1, horizon + 1):
        x[t] = f @ x[t - 1] + rng.standard_normal(d)
    y = x + rng.standard_normal((horizon + 1, d))
    return x, y


# ---------------------------------------------------------------------------
# Diffusion-driven stochastic volatility, Euler-discretized

@dataclass(frozen=True)
class DiffusionSVParams:
    kappa: float = 0.02
    omega: float = 0.1
    mu_x: float = 0.8
    mu_y: float = 0.0
    beta: float = 0.0
    rho: float = -0.4

    def __post_init__(self):
        if self.kappa <= 0 or self.omega <= 0:
            raise ValueError("need kappa > 0 and omega > 0")
        if not -1.0 < self.rho < 1.0:
            raise ValueError("rho must be in (-1, 1); +-1 degenerates the variance")


def _drift(x, p):
    e = np.exp(-x)
    return p.kappa * (p.mu_x - np.exp(x)) * e - 0.5 * p.omega**2 * e


def _vol(x, p):
    return p.omega * np.exp(-0.5 * x)


def euler_propagate(params, m, x_prev_last, incs):
    """Fill the M-vector state by the Euler recursion from the previous
    interval's endpoint, given per-step Brownian increments."""
    x_prev_last = np.asarray(x_prev_last, dtype=np.float64)
    incs = np.atleast_2d(np.asarray(incs, dtype=np.float64))
    delta = 1.0 / m
    out = np.empty_like(incs)
    prev = x_prev_last
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(m):
            prev = prev + delta * _drift(prev, params) + _vol(prev, params) * incs[:, j]
            out[:, j] = prev
    if not np.all(np.isfinite(out)):
        bad = out[~np.isfinite(out).all(axis=1)]
        raise FloatingPointError(
            f"Euler step overflowed (exp(-x) blew up); first bad state: {bad[:1]}"
        )
    return out


def diffusion_log_G(params, m, x_prev_last, x, y_prev, y, incs):
    """Log density of the observation increment given the volatility path.

    sigma2 = mean exp(x(m)); Z = sum exp(x(m)/2) dW_m; the increment is
    N(y_prev + mu_y + beta sigma2 + rho Z, (1 - rho^2) sigma2).
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    incs = np.atleast_2d(np.asarray(incs, dtype=np.float64))
    ex = np.exp(x)
    sigma2 = ex.mean(axis=1)
    z = np.sum(np.sqrt(ex) * incs, axis=1)
    mean = y_prev + params.mu_y + params.beta * sigma2 + params.rho * z
    var = (1.0 - params.rho**2) * sigma2
    return _norm_logpdf(np.asarray(y, dtype=np.float64), mean, var)


class DiffusionSVModel(FeynmanKacModel):
    """State = the M-vector of log-volatility on the delta grid of one
    observation interval; only its last entry feeds the next interval,
    exposed through ``lam``.
    """

    lambda_dim = 1

    def __init__(self, y, params=DiffusionSVParams(), m=5, construction="forward"):
        self.y = np.asarray(y, dtype=np.float64)
        self.params = params
        self.m = m
        self.d = m
        self.path = PathSpec(steps=m, construction=construction)

    def lam(self, x):
        return x[:, -1:]

    def gamma0(self, u):
        p = self.params
        z = p.mu_x + p.omega / np.sqrt(2.0 * p.kappa) * _inv_gauss(u[:, 0])
        return np.tile(z[:, None], (1, self.m))

    def gamma_t(self, t, x_prev, v):
        incs = increments(v, self.path)
        return euler_propagate(self.params, self.m, x_prev[:, -1], incs)

    def log_G(self, t, x_prev, x):
        if t == 0:
            return np.zeros(x.shape[0])
        incs = self._recover_increments(x_prev[:, -1], x)
        return diffusion_log_G(
            self.params, self.m, x_prev[:, -1], x, self.y[t - 1], self.y[t], incs
        )

    def _recover_increments(self, x_prev_last, x):
        # invert the Euler recursion; exact given (x_prev(M), x)
        delta = 1.0 / self.m
        prevs = np.concatenate([x_prev_last[:, None], x[:, :-1]], axis=1)
        return (x - prevs - delta * _drift(prevs, self.params)) / _vol(prevs, self.params)


def simulate_diffusion_sv(params, horizon, seed, m_sim=200):
    """Observation levels y_0..y_T from a fine-grid Euler simulation.

    The latent path runs at m_sim steps per unit interval; observations
    are the accumulated increments at integer times, with Y_0 = 0.
    """
    rng = np.random.default_rng(seed)
    delta = 1.0 / m_sim
    x = params.mu_x + params.omega / np.sqrt(2.0 * params.kappa) * rng.standard_normal()
    y = np.zeros(horizon + 1)
    for t in range(1, horizon + 1):
        dwx = np.sqrt(delta) * rng.standard_normal(m_sim)
        dwy = params.rho * dwx + np.sqrt(1 - params.rho**2) * np.sqrt(delta) * rng.standard_normal(m_sim)
        level = y[t - 1]
        for j in range(m_sim):
            x = x + delta * _drift(x, params) + _vol(x, params) * dwx[j]
            level += delta * (params.mu_y + params.beta * np.exp(x)) + np.exp(0.5 * x) * dwy[j]
        y[t] = level
    return y
