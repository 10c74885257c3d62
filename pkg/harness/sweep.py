from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

import pandas as pd

from cmdp_core.types import RejectedInputError
from constants import SWEEP_VALUES
from harness.schemas import TrainConfig
from harness.train import train

log = logging.getLogger(__name__)

# parámetro de la CLI -> campo de TrainConfig
SWEEP_FIELDS = {
    "batch": "batch_steps",
    "collect": "collect_steps",
    "replay": "replay_steps",
    "alpha": "alpha",
}


def parse_values(param: str, raw: str | None) -> list[float | int]:
    if param not in SWEEP_FIELDS:
        raise RejectedInputError(f"unknown sweep parameter {param!r}; expected one of {sorted(SWEEP_FIELDS)}")
    if not raw:
        return list(SWEEP_VALUES[param])
    cast = float if param == "alpha" else int
    try:
        return [cast(v) for v in raw.split(",") if v.strip()]
    except ValueError as e:
        raise RejectedInputError(f"bad sweep values {raw!r}") from e


def run_sweep(base: TrainConfig, param: str, values: Sequence[float | int], window: int = 20) -> pd.DataFrame:
    """
    Un entrenamiento por valor en <out_dir>/<param>_<valor>. Resumen por ejecución: score y tasa de
    coste medios de las últimas `window` epochs y CV acumulado final. Se escribe sweep.csv.
    """
    field = SWEEP_FIELDS[param]
    root = Path(base.out_dir)
    rows = []
    for value in values:
        cfg = base.model_copy(update={field: value, "out_dir": str(root / f"{param}_{value}")})
        cfg = TrainConfig.model_validate(cfg.model_dump())
        log.info("sweep %s=%s -> %s", param, value, cfg.out_dir)
        res = train(cfg)
        m = res.run_log.metrics_frame()
        tail = m.tail(window)
        rows.append({
            "param": param,
            "value": value,
            "epochs": len(m),
            "score_mean": float(tail["score_mean"].mean()) if len(m) else float("nan"),
            "cost_rate": float(tail["cost_rate"].mean()) if len(m) else float("nan"),
            "cv_cumulative": int(m["cv_cumulative"].iloc[-1]) if len(m) else 0,
            "aborted": res.aborted,
        })

    df = pd.DataFrame(rows)
    root.mkdir(parents=True, exist_ok=True)
    df.to_csv(root / "sweep.csv", index=False, float_format="%.10g", lineterminator="\n")
    return df
