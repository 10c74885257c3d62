"""
Comparación en pointnav: offtrc (CVaR, alpha=0.125) frente a sin restricción y frente a la
restricción de coste medio (alpha=1), con varias semillas.

uv run python scripts/compare_constraints.py --epochs 100 --seeds 5 --out runs/compare_constraints

Escribe <out>/<variante>_seed<k>/ por ejecución y <out>/summary.csv con score y tasa de coste
medios de las últimas 20 epochs y el CV acumulado final.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

import pandas as pd

from harness.config import load_config
from harness.train import train

log = logging.getLogger(__name__)

VARIANTS = {
    "offtrc": {"mode": "offtrc"},
    "unconstrained": {"mode": "unconstrained"},
    "mean_cost": {"mode": "offtrc", "alpha": "1.0"},
}


def run(epochs: int, seeds: int, out: Path) -> pd.DataFrame:
    rows = []
    for name, overrides in VARIANTS.items():
        for seed in range(seeds):
            cfg = load_config(None, {**overrides, "env": "pointnav", "epochs": str(epochs), "seed": str(seed),
                                     "out_dir": str(out / f"{name}_seed{seed}")})
            res = train(cfg)
            m = res.run_log.metrics_frame()
            tail = m.tail(20)
            rows.append({
                "variant": name, "seed": seed,
                "score_mean": float(tail["score_mean"].mean()),
                "cost_rate": float(tail["cost_rate"].mean()),
                "cv_cumulative": int(m["cv_cumulative"].iloc[-1]) if len(m) else 0,
                "aborted": res.aborted,
            })
            log.info("%s seed=%d done", name, seed)
    df = pd.DataFrame(rows)
    out.mkdir(parents=True, exist_ok=True)
    df.to_csv(out / "summary.csv", index=False, float_format="%.10g", lineterminator="\n")
    return df


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--epochs", type=int, default=100)
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--out", default="runs/compare_constraints")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s:%(name)s:%(message)s")

    df = run(args.epochs, args.seeds, Path(args.out))
    print(df.groupby("variant")[["score_mean", "cost_rate", "cv_cumulative"]].agg(["mean", "std"]).to_string())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
