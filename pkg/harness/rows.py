from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from cmdp_core.envs.collect import CollectResult
from trc_optimizer.types import CriticUpdateReport, UpdateDiagnostics

METRIC_COLUMNS = [
    "epoch", "env_steps", "episodes", "reward_sum_mean", "score_mean",
    "cv_epoch", "cv_cumulative", "cost_rate", "cv_per_episode", "cv_per_episode_normalized",
]
DIAGNOSTIC_COLUMNS = [
    "epoch", "J_C", "J_S", "approx_cvar", "c_slack", "m_hat", "delta_old", "delta_eff", "kl",
    "lam", "nu", "recovery", "accepted", "backtracks", "sigma_floored", "objective", "short_batch",
    "loss_V", "loss_V_C", "loss_S_C",
]

_FLOAT_FORMAT = "%.10g"


@dataclass
class RunLog:
    """
    Filas por epoch de métricas (metrics.csv) y del optimizador (diagnostics.csv).
    cv_epoch / cv_cumulative son CVs brutos de la recogida de entrenamiento; cost_rate = cv_epoch / S.
    cv_per_episode_normalized divide los CVs de cada episodio terminado por su longitud.
    """
    metrics: list[dict] = field(default_factory=list)
    diagnostics: list[dict] = field(default_factory=list)
    cumulative_cv: int = 0
    env_steps: int = 0

    def add_epoch(self, epoch: int, collected: CollectResult, diag: UpdateDiagnostics, critics: CriticUpdateReport,
                  *, short_batch: bool = False) -> dict:
        self.env_steps += collected.n_steps
        self.cumulative_cv += collected.cv_count
        eps = collected.finished
        row = {
            "epoch": epoch,
            "env_steps": self.env_steps,
            "episodes": len(eps),
            "reward_sum_mean": float(np.mean([e.reward_sum for e in eps])) if eps else float("nan"),
            "score_mean": float(np.mean([e.score for e in eps])) if eps else float("nan"),
            "cv_epoch": collected.cv_count,
            "cv_cumulative": self.cumulative_cv,
            "cost_rate": collected.cv_count / collected.n_steps if collected.n_steps else 0.0,
            "cv_per_episode": float(np.mean([e.cv_count for e in eps])) if eps else float("nan"),
            "cv_per_episode_normalized": float(np.mean([e.cost_rate for e in eps])) if eps else float("nan"),
        }
        self.metrics.append(row)

        self.diagnostics.append({
            "epoch": epoch,
            "J_C": diag.J_C, "J_S": diag.J_S, "approx_cvar": diag.approx_cvar, "c_slack": diag.c_slack,
            "m_hat": diag.m_hat, "delta_old": diag.delta_old, "delta_eff": diag.delta_eff, "kl": diag.kl,
            "lam": diag.lam, "nu": diag.nu, "recovery": int(diag.recovery), "accepted": int(diag.accepted),
            "backtracks": diag.backtracks, "sigma_floored": int(diag.sigma_floored), "objective": diag.objective,
            "short_batch": int(short_batch),
            "loss_V": critics.final("V"), "loss_V_C": critics.final("V_C"), "loss_S_C": critics.final("S_C"),
        })
        return row

    def truncate(self, epoch: int, env_steps: int, cumulative_cv: int) -> None:
        """Descarta las filas posteriores a `epoch` (rollback a un checkpoint)."""
        self.metrics = [r for r in self.metrics if r["epoch"] <= epoch]
        self.diagnostics = [r for r in self.diagnostics if r["epoch"] <= epoch]
        self.env_steps = env_steps
        self.cumulative_cv = cumulative_cv

    def metrics_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.metrics, columns=METRIC_COLUMNS)

    def diagnostics_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.diagnostics, columns=DIAGNOSTIC_COLUMNS)

    def write(self, out_dir: str | Path) -> tuple[Path, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        m_path = out_dir / "metrics.csv"
        d_path = out_dir / "diagnostics.csv"
        self.metrics_frame().to_csv(m_path, index=False, float_format=_FLOAT_FORMAT, lineterminator="\n")
        self.diagnostics_frame().to_csv(d_path, index=False, float_format=_FLOAT_FORMAT, lineterminator="\n")
        return m_path, d_path


def moving_average(values, window: int = 20) -> np.ndarray:
    s = pd.Series(np.asarray(values, dtype=float))
    return s.rolling(window, min_periods=1).mean().to_numpy()
