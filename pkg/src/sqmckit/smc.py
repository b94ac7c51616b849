"""Generic SMC sampler: multinomial resampling at every step.

Randomness is drawn from per-(seed, t, purpose) substreams of a
SeedSequence tree, so replications can run in any order or in parallel
and still reproduce bit-identically.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from sqmckit.core import DEFAULT_MOMENTS, ParticleSystem, RunResult, weighted_moments
from sqmckit.resampling import multinomial_ancestors

_INIT, _RESAMPLE, _PROPAGATE = 0, 1, 2


def substream(seed, *key):
    """Independent generator keyed by (seed, *key)."""
    return np.random.default_rng(
        np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    )


@dataclass
class SmcConfig:
    n_particles: int
    horizon: int
    seed: int = 0
    moments: dict = field(default_factory=lambda: dict(DEFAULT_MOMENTS))

    def __post_init__(self):
        if self.n_particles < 2:
            raise ValueError("need at least 2 particles")
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")


def run_smc(model, cfg):
    """Run the bootstrap/guided SMC recursion for the given model.

    Returns a RunResult with per-step weighted moments and the running
    log normalizing-constant estimate.
    """
    start = time.perf_counter()
    n, horizon = cfg.n_particles, cfg.horizon
    u = substream(cfg.seed, 0, _INIT).random((n, model.d))
    x = model.gamma0(u)
    ps = ParticleSystem.initial(x, model.log_G(0, None, x))
    moments = {
        name: [val]
        for name, val in weighted_moments(ps.states, ps.norm_weights, cfg.moments).items()
    }

    for t in range(1, horizon + 1):
        anc = multinomial_ancestors(ps.norm_weights, n, substream(cfg.seed, t, _RESAMPLE))
        x_prev = ps.states[anc]
        v = substream(cfg.seed, t, _PROPAGATE).random((n, model.d))
        x = model.gamma_t(t, x_prev, v)
        ps.advance(x, model.log_G(t, x_prev, x), anc)
        for name, val in weighted_moments(x, ps.norm_weights, cfg.moments).items():
            moments[name].append(val)

    return RunResult(
        engine="smc",
        seed=cfg.seed,
        moments={k: np.array(v) for k, v in moments.items()},
        log_likelihood=np.cumsum(ps.log_lt_increments),
        wall_time=time.perf_counter() - start,
    )
