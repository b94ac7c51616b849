"""Particle filtering with sequential Monte Carlo and sequential quasi-Monte Carlo."""

from sqmckit.core import FeynmanKacModel, ParticleDeathError, RunResult
from sqmckit.smc import SmcConfig, run_smc
from sqmckit.sqmc import SqmcConfig, run_sqmc

__all__ = [
    "FeynmanKacModel",
    "ParticleDeathError",
    "RunResult",
    "SmcConfig",
    "run_smc",
    "SqmcConfig",
    "run_sqmc",
]
