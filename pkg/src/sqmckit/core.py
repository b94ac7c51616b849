"""Feynman-Kac model interface and shared particle-system bookkeeping.

A Feynman-Kac model here is the deterministic-uniform formulation used by
both engines: samplers are functions of uniforms (gamma0, gamma_t), the
potential is evaluated in log space (log_G), and an optional projection
``lam`` exposes the statistic of the previous state that the transition
and potential actually depend on.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp


class ParticleDeathError(RuntimeError):
    """Raised when every particle receives zero weight (log G = -inf)."""

    def __init__(self, t):
        self.t = t
        super().__init__(f"particle death at t={t}: all weights are zero")


class FeynmanKacModel(abc.ABC):
    """Behavioral interface: initial/transition samplers and log potential.

    All methods are vectorized over particles: states are (N, d) arrays,
    uniforms (N, d), log potentials (N,).  ``gamma_t`` and ``log_G`` must
    be pure functions of their arguments.
    """

    d: int
    lambda_dim = None

    @abc.abstractmethod
    def gamma0(self, u):
        """Map (N, d) uniforms to initial states (houses M_0)."""

    @abc.abstractmethod
    def gamma_t(self, t, x_prev, v):
        """Map ancestor states and (N, d) uniforms to time-t states (houses M_t)."""

    @abc.abstractmethod
    def log_G(self, t, x_prev, x):
        """Log potential; -inf for zero potential, never NaN. x_prev is None at t=0."""

    def lam(self, x):
        """Projection of the state that gamma_t/log_G depend on, if any."""
        raise NotImplementedError("model does not expose a lambda projection")


def normalize_weights(log_w, t=None):
    """Normalized weights and the log mean unnormalized weight.

    Returns ``(w, log_mean)`` with ``w = softmax(log_w)`` renormalized so
    its float sum is exactly 1, and ``log_mean = logsumexp(log_w) - log N``
    (the time-t increment of the normalizing-constant estimate).

    Raises
    ------
    ParticleDeathError
        If every entry is -inf.
    """
    log_w = np.asarray(log_w, dtype=np.float64)
    if np.any(np.isnan(log_w)):
        raise ValueError("log weights contain NaN")
    m = np.max(log_w)
    if m == -np.inf:
        raise ParticleDeathError(t)
    lse = logsumexp(log_w)
    w = np.exp(log_w - lse)
    w /= w.sum()
    if math.fsum(w) != 1.0:
        # set the largest weight to the exact complement of the others,
        # so the exactly-rounded sum lands on 1
        top = int(np.argmax(w))
        rest = math.fsum(w) - w[top]
        w[top] = 1.0 - rest
        for _ in range(4):
            resid = 1.0 - math.fsum(w)
            if resid == 0.0:
                break
            w[top] += resid
    return w, lse - np.log(log_w.size)


def log_likelihood_estimate(increments):
    """Log of the product-of-mean-weights normalizing-constant estimate."""
    increments = np.asarray(increments, dtype=np.float64)
    if increments.size == 0:
        raise ValueError("no increments")
    return float(increments.sum())


@dataclass
class ParticleSystem:
    """State of one engine at time t."""

    t: int
    states: np.ndarray
    log_weights: np.ndarray
    norm_weights: np.ndarray
    ancestors: np.ndarray
    log_lt_increments: list = field(default_factory=list)

    @classmethod
    def initial(cls, states, log_g):
        w, inc = normalize_weights(log_g, t=0)
        return cls(
            t=0,
            states=states,
            log_weights=log_g,
            norm_weights=w,
            ancestors=np.arange(states.shape[0]),
            log_lt_increments=[inc],
        )

    def advance(self, states, log_g, ancestors):
        self.t += 1
        w, inc = normalize_weights(log_g, t=self.t)
        self.states = states
        self.log_weights = log_g
        self.norm_weights = w
        self.ancestors = ancestors
        self.log_lt_increments.append(inc)

    def log_likelihood(self):
        return log_likelihood_estimate(self.log_lt_increments)


@dataclass
class RunResult:
    """Per-step filtering estimates and likelihood path for one run."""

    engine: str
    seed: int
    moments: dict
    log_likelihood: np.ndarray
    wall_time: float
    metadata: dict = field(default_factory=dict)

    @property
    def horizon(self):
        return len(self.log_likelihood) - 1


DEFAULT_MOMENTS = {"mean_x1": lambda x: x[:, 0]}


def weighted_moments(states, w, moment_fns):
    """Evaluate each registered test function under the weighted cloud."""
    return {name: float(np.dot(w, fn(states))) for name, fn in moment_fns.items()}
