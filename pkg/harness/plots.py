from __future__ import annotations

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from harness.rows import moving_average  # noqa: E402

log = logging.getLogger(__name__)

# svg reproducible: ids con sal fija y sin fecha en los metadatos
plt.rcParams["svg.hashsalt"] = "offtrc-lab"

_PANELS = (
    ("score.svg", "score_mean", "score"),
    ("cost_rate.svg", "cost_rate", "cost rate"),
    ("cumulative_cv.svg", "cv_cumulative", "total CV"),
)


def plot_run(metrics: pd.DataFrame, out_dir: str | Path, *, cost_limit: float | None = None,
             window: int = 20) -> list[Path]:
    """Score, tasa de coste y CV acumulado frente a pasos de entorno, un SVG por panel."""
    out = Path(out_dir) / "plots"
    out.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []
    if metrics.empty:
        log.info("no epochs logged; skipping plots")
        return paths

    x = metrics["env_steps"].to_numpy()
    for fname, column, label in _PANELS:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        y = metrics[column].to_numpy(dtype=float)
        if column == "cv_cumulative":
            ax.plot(x, y)
        else:
            ax.plot(x, y, alpha=0.3)
            ax.plot(x, moving_average(y, window), label=f"{window}-epoch mean")
            ax.legend(loc="best")
        if column == "cost_rate" and cost_limit is not None:
            ax.axhline(cost_limit, color="k", linestyle="--", linewidth=0.8)
        ax.set_xlabel("environment steps")
        ax.set_ylabel(label)
        fig.tight_layout()
        path = out / fname
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        paths.append(path)
    return paths
