"""
Surrogates off-policy con el ajuste de la región de confianza frente a tratar el batch del replay
como si fuera on-policy (mode=onpolicy_surrogate). Se compara el CV acumulado durante el
entrenamiento.

uv run python scripts/compare_onpolicy_surrogate.py --epochs 100 --seeds 3
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

import pandas as pd

from harness.config import load_config
from harness.train import train

log = logging.getLogger(__name__)


def main() -> int:
    parser = argparse.ArgumentParser(description="offtrc vs onpolicy_surrogate: CV acumulado")
    parser.add_argument("--env", default="pointnav")
    parser.add_argument("--epochs", type=int, default=100)
    parser.add_argument("--seeds", type=int, default=3)
    parser.add_argument("--out", default="runs/compare_onpolicy_surrogate")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s:%(name)s:%(message)s")

    out = Path(args.out)
    curves = []
    for mode in ("offtrc", "onpolicy_surrogate"):
        for seed in range(args.seeds):
            cfg = load_config(None, {"env": args.env, "mode": mode, "epochs": str(args.epochs), "seed": str(seed),
                                     "out_dir": str(out / f"{mode}_seed{seed}")})
            m = train(cfg).run_log.metrics_frame()
            curves.append(m[["epoch", "cv_cumulative"]].assign(mode=mode, seed=seed))

    df = pd.concat(curves, ignore_index=True)
    out.mkdir(parents=True, exist_ok=True)
    df.to_csv(out / "cv_curves.csv", index=False, lineterminator="\n")
    final = df.sort_values("epoch").groupby(["mode", "seed"]).tail(1)
    print(final.groupby("mode")["cv_cumulative"].agg(["mean", "std", "min", "max"]).to_string())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
