"""Experiment harness: simulate data, run replicated engine grids, report gains.

A grid is the cross product {engine} x {formalism} x {construction} x {N},
replicated R times with per-replication seeds derived from the master seed
and the replication index only, so results are independent of execution
order.  Runs are persisted as tidy CSV; the report aggregates them into
per-(engine, N, t) MSE (against the Kalman oracle, when one exists) or
across-replication variance, and gains against a reference engine.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from sqmckit.core import ParticleDeathError
from sqmckit.kalman import kalman_filter
from sqmckit.models import (
    Ar1RareEventGuided,
    Ar1RareEventModel,
    DiffusionSVModel,
    DiffusionSVParams,
    LinGaussModel,
    StochVolModel,
    ar_transition_matrix,
    simulate_diffusion_sv,
    simulate_lingauss,
    simulate_stochvol,
)
from sqmckit.smc import SmcConfig, run_smc
from sqmckit.sqmc import SqmcConfig, run_sqmc

RUNS_COLUMNS = [
    "model", "engine", "formalism", "construction", "N", "M", "T", "t",
    "replication", "estimate_mean_x1", "log_likelihood",
]
REPORT_COLUMNS = ["model", "engine", "N", "t", "mse", "variance", "gain"]


@dataclass
class ExperimentConfig:
    model: dict
    horizon: int
    data_seed: int = 0
    m_sim: int = 200
    engines: list = field(default_factory=lambda: ["smc", "sqmc"])
    formalisms: list = field(default_factory=lambda: ["bootstrap"])
    constructions: list = field(default_factory=lambda: ["none"])
    particles: list = field(default_factory=lambda: [1024])
    replications: int = 10
    seed: int = 0
    workers: int = 1
    replication_seeds: list | None = None
    reference: str | None = None
    metric: str = "auto"

    def __post_init__(self):
        if self.model.get("id") not in ("lingauss", "sv", "diffusion_sv", "rare_event"):
            raise ValueError(f"unknown model id: {self.model.get('id')}")
        if self.replications < 2 and self.replication_seeds is None:
            raise ValueError("need at least 2 replications for variance estimates")
        bad = [e for e in self.engines if e not in ("smc", "sqmc")]
        if bad:
            raise ValueError(f"unknown engines: {bad}")
        if self.model["id"] == "diffusion_sv":
            if any(f != "bootstrap" for f in self.formalisms):
                raise ValueError("the diffusion model only has a bootstrap formalism")
        elif any(c != "none" for c in self.constructions):
            raise ValueError("path constructions only apply to the diffusion model")

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            raw = json.load(fh)
        model = raw["model"]
        data = raw.get("data", {})
        run = raw.get("run", {})
        report = raw.get("report", {})
        return cls(
            model=model,
            horizon=int(data.get("horizon", 50)),
            data_seed=int(data.get("seed", 0)),
            m_sim=int(data.get("m_sim", 200)),
            engines=list(run.get("engines", ["smc", "sqmc"])),
            formalisms=list(run.get("formalisms", ["bootstrap"])),
            constructions=list(run.get("constructions", ["none"])),
            particles=[int(n) for n in run.get("particles", [1024])],
            replications=int(run.get("replications", 10)),
            seed=int(run.get("seed", 0)),
            workers=int(run.get("workers", 1)),
            replication_seeds=run.get("replication_seeds"),
            reference=report.get("reference"),
            metric=report.get("metric", "auto"),
        )


@dataclass
class GainTable:
    frame: pd.DataFrame
    metric: str
    flags: list = field(default_factory=list)


def combo_label(engine, formalism, construction):
    label = f"{engine}-{formalism}"
    if construction and construction != "none":
        label += f"-{construction}"
    return label


# -- data ------------------------------------------------------------------

def simulate_observations(cfg):
    """Observations drawn from the configured model's own generative law."""
    m = cfg.model
    if m["id"] == "lingauss":
        _, y = simulate_lingauss(m.get("d", 1), m.get("alpha", 0.4), cfg.horizon, cfg.data_seed)
        return y
    if m["id"] == "sv":
        _, y = simulate_stochvol(
            m.get("mu", -1.0), m.get("phi", 0.9), m.get("sigma", 0.5), cfg.horizon, cfg.data_seed
        )
        return y[:, None]
    if m["id"] == "diffusion_sv":
        y = simulate_diffusion_sv(
            _diffusion_params(m), cfg.horizon, cfg.data_seed, m_sim=cfg.m_sim
        )
        return y[:, None]
    # rare event: the implicit all-ones observation sequence
    return np.ones((cfg.horizon + 1, 1))


def write_observations(path, y):
    y = np.atleast_2d(y)
    cols = {f"y{k + 1}": y[:, k] for k in range(y.shape[1])}
    pd.DataFrame({"t": np.arange(len(y)), **cols}).to_csv(path, index=False)


def read_observations(path):
    df = pd.read_csv(path)
    return df[[c for c in df.columns if c.startswith("y")]].to_numpy()


def _diffusion_params(m):
    keys = ("kappa", "omega", "mu_x", "mu_y", "beta", "rho")
    return DiffusionSVParams(**{k: m[k] for k in keys if k in m})


def build_model(model_cfg, formalism, construction, y):
    mid = model_cfg["id"]
    if mid == "lingauss":
        return LinGaussModel(
            y, d=model_cfg.get("d", 1), alpha=model_cfg.get("alpha", 0.4), variant=formalism
        )
    if mid == "sv":
        return StochVolModel(
            y[:, 0],
            mu=model_cfg.get("mu", -1.0),
            phi=model_cfg.get("phi", 0.9),
            sigma=model_cfg.get("sigma", 0.5),
            variant=formalism,
        )
    if mid == "diffusion_sv":
        return DiffusionSVModel(
            y[:, 0],
            _diffusion_params(model_cfg),
            m=model_cfg.get("m", 5),
            construction=construction if construction != "none" else "forward",
        )
    if formalism == "guided":
        return Ar1RareEventGuided(phi=model_cfg.get("phi", 0.0))
    return Ar1RareEventModel(phi=model_cfg.get("phi", 0.0))


# -- running ---------------------------------------------------------------

def replication_seed(master, r, override=None):
    if override is not None:
        return int(override[r])
    return int(np.random.SeedSequence(int(master), spawn_key=(int(r),)).generate_state(1)[0])


def _run_one(task):
    cfg, y, engine, formalism, construction, n, r = task
    model = build_model(cfg.model, formalism, construction, y)
    seed = replication_seed(cfg.seed, r, cfg.replication_seeds)
    try:
        if engine == "smc":
            res = run_smc(model, SmcConfig(n, cfg.horizon, seed=seed))
        else:
            res = run_sqmc(model, SqmcConfig(n, cfg.horizon, seed=seed))
    except ParticleDeathError as err:
        # a dead replication is recorded, not fatal to the batch
        return task, err
    return task, res


def grid_combos(cfg):
    """(engine, formalism, construction) triples of the grid.  Path
    constructions only distinguish SQMC runs on the diffusion model."""
    combos = []
    for engine in cfg.engines:
        for formalism in cfg.formalisms:
            if cfg.model["id"] == "diffusion_sv" and engine == "sqmc":
                cons = cfg.constructions
            else:
                cons = ["none"]
            for construction in cons:
                combos.append((engine, formalism, construction))
    return list(dict.fromkeys(combos))


def run_grid(cfg, y=None):
    """Run the configured grid; returns a tidy DataFrame (RUNS_COLUMNS)."""
    if y is None:
        y = simulate_observations(cfg)
    m_steps = cfg.model.get("m", 5) if cfg.model["id"] == "diffusion_sv" else 0
    tasks = [
        (cfg, y, engine, formalism, construction, n, r)
        for engine, formalism, construction in grid_combos(cfg)
        for n in cfg.particles
        for r in range(cfg.replications)
    ]

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_one, tasks, chunksize=1))
    else:
        results = [_run_one(t) for t in tasks]

    rows = []
    for (_, _, engine, formalism, construction, n, r), res in results:
        if isinstance(res, ParticleDeathError):
            est = np.full(cfg.horizon + 1, np.nan)
            ll = est
        else:
            est = res.moments["mean_x1"]
            ll = res.log_likelihood
        for t in range(cfg.horizon + 1):
            rows.append(
                (
                    cfg.model["id"], engine, formalism, construction, n, m_steps,
                    cfg.horizon, t, r, est[t], ll[t],
                )
            )
    frame = pd.DataFrame(rows, columns=RUNS_COLUMNS)
    return frame.sort_values(
        ["engine", "formalism", "construction", "N", "replication", "t"]
    ).reset_index(drop=True)


# -- reporting ---------------------------------------------------------------

def kalman_truth(model_cfg, y):
    f = ar_transition_matrix(model_cfg.get("d", 1), model_cfg.get("alpha", 0.4))
    return kalman_filter(f, y)


def gain_table(runs, reference=None, metric="auto", truth=None):
    """Aggregate runs into per-(engine, N, t) metrics and gains.

    ``metric`` is "mse" (needs ``truth``: per-t oracle values of the
    first-component filtering mean), "variance" (spread around the pooled
    per-t grand mean), or "auto" (mse when truth is given).
    """
    if metric == "auto":
        metric = "mse" if truth is not None else "variance"
    if metric == "mse" and truth is None:
        raise ValueError("mse metric needs oracle truth values")

    runs = runs.copy()
    runs["engine_label"] = [
        combo_label(e, f, c)
        for e, f, c in zip(runs["engine"], runs["formalism"], runs["construction"])
    ]
    model = runs["model"].iloc[0]
    flags = []
    rows = []
    for (label, n, t), grp in runs.groupby(["engine_label", "N", "t"], sort=True):
        est = grp["estimate_mean_x1"].to_numpy()
        dead = int(np.sum(~np.isfinite(est)))
        if dead and t == 0:
            flags.append(f"particle-death: {label} N={n} in {dead} replication(s)")
        est = est[np.isfinite(est)]
        if len(est) == 0:
            rows.append((model, label, n, t, np.nan, np.nan, np.nan))
            continue
        var = float(np.var(est, ddof=1)) if len(est) > 1 else 0.0
        mse = float(np.mean((est - truth[t]) ** 2)) if truth is not None else np.nan
        value = mse if metric == "mse" else var
        if value == 0.0:
            flags.append(f"degenerate-zero-{metric}: {label} N={n} t={t}")
        rows.append((model, label, n, t, mse, var, value))
    frame = pd.DataFrame(
        rows, columns=["model", "engine", "N", "t", "mse", "variance", "_value"]
    )

    if reference is None:
        reference = frame["engine"].iloc[0]
    if reference not in set(frame["engine"]):
        raise ValueError(f"reference engine {reference!r} not in the grid")
    ref = frame[frame["engine"] == reference].set_index(["N", "t"])["_value"]

    def one_gain(row):
        if row["engine"] == reference:
            return 1.0
        denom = row["_value"]
        numer = ref.get((row["N"], row["t"]), np.nan)
        return numer / denom if denom > 0 else np.nan

    frame["gain"] = frame.apply(one_gain, axis=1)
    frame = frame.drop(columns="_value")
    return GainTable(frame=frame[REPORT_COLUMNS].copy(), metric=metric, flags=flags)


# -- persistence -------------------------------------------------------------

def write_runs(path, runs):
    runs.to_csv(path, index=False)


def read_runs(path):
    return pd.read_csv(path)


def write_report(path, table):
    table.frame.to_csv(path, index=False)


def read_report(path):
    return pd.read_csv(path)
