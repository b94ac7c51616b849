"""Desk-scale rerun of the linear-Gaussian gain study (violin-plot data).

Runs bootstrap and guided formalisms for both engines against the Kalman
oracle and writes runs.csv / report.csv under --out.  Feed report.csv to
the frontend plots tool with --kind violin.
"""

import argparse
import pathlib

from sqmckit import bench

HERE = pathlib.Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=HERE / "configs" / "lingauss_d5_guided.json")
    ap.add_argument("--out", default="out/lingauss_gains")
    args = ap.parse_args()

    cfg = bench.ExperimentConfig.from_json(args.config)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    y = bench.simulate_observations(cfg)
    bench.write_observations(out / "observations.csv", y)
    runs = bench.run_grid(cfg, y)
    bench.write_runs(out / "runs.csv", runs)

    truth = bench.kalman_truth(cfg.model, y).means[:, 0]
    table = bench.gain_table(runs, reference=cfg.reference, metric="mse", truth=truth)
    bench.write_report(out / "report.csv", table)

    med = table.frame.groupby("engine")["gain"].median()
    print("median-over-t gains vs", cfg.reference)
    print(med.to_string())


if __name__ == "__main__":
    main()
