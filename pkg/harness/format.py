from __future__ import annotations

import math

import pandas as pd

from harness.evaluate import EvalReport
from harness.train import TrainResult
from tabular_oracle.suite import VerificationReport

BEGIN = "===RUN_SUMMARY_BEGIN==="
END = "===RUN_SUMMARY_END==="


def _f(x: float, nd: int = 4) -> str:
    return "nan" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.{nd}f}"


def _pm(pair: tuple[float, float], nd: int = 3) -> str:
    return f"{_f(pair[0], nd)} ± {_f(pair[1], nd)}"


def format_train_result(res: TrainResult) -> str:
    m = res.run_log.metrics_frame()
    lines = [f"Run {res.out_dir}", ""]
    if m.empty:
        lines.append("  (sin epochs)")
    else:
        last = m.iloc[-1]
        tail = m.tail(20)
        lines.append(f"epochs: {int(last['epoch'])}  |  env steps: {int(last['env_steps'])}")
        lines.append(f"score (últimas 20): {_f(float(tail['score_mean'].mean()), 3)}")
        lines.append(f"cost rate (últimas 20): {_f(float(tail['cost_rate'].mean()))}")
        lines.append(f"CV total: {int(last['cv_cumulative'])}")
    if res.aborted:
        lines.append(f"ABORTADO: {res.abort_reason}")
    lines.append(f"checkpoint: {res.last_checkpoint}")
    return "\n".join(lines)


def format_eval_report(rep: EvalReport) -> str:
    lines = [
        f"episodios: {len(rep.episodes)}",
        f"reward sum: {_pm(rep.reward)}",
        f"CV: {_pm(rep.cv)}",
        f"CV / longitud: {_pm(rep.cv_normalized, 4)}",
        f"score: {_pm(rep.score)}",
        f"retorno descontado: {_pm(rep.discounted_return)}",
        f"coste descontado: {_pm(rep.discounted_cost)}",
    ]
    return "\n".join(lines)


def format_verification(rep: VerificationReport) -> str:
    df = rep.rows.assign(ok=rep.rows["ok"] | ~rep.rows["gating"])
    lines = [f"instancias: {rep.n_instances}  |  comprobaciones: {len(df)}", ""]
    summary = (
        df.assign(alpha=df["alpha"].map(lambda a: "-" if pd.isna(a) else f"{float(a):g}"))
          .groupby(["check", "alpha"], sort=True)
          .agg(n=("ok", "size"), failed=("ok", lambda s: int((~s).sum())), min_gap=("gap", "min"))
          .reset_index()
    )
    for row in summary.itertuples(index=False):
        lines.append(f"  {row.check:<22} alpha={row.alpha:<6} n={row.n:<5} fallos={row.failed:<4} "
                     f"gap mín={row.min_gap:.3e}")
    lines.append("")
    lines.append("RESULTADO: OK" if rep.passed else f"RESULTADO: {len(rep.failures)} FALLOS")
    return "\n".join(lines)


def format_sweep(df: pd.DataFrame) -> str:
    lines = []
    for row in df.itertuples(index=False):
        lines.append(f"  {row.param}={row.value}: score={_f(row.score_mean, 3)} cost_rate={_f(row.cost_rate)} "
                     f"CV={row.cv_cumulative}{'  (abortado)' if row.aborted else ''}")
    return "\n".join(lines)


def wrap(block: str) -> str:
    return f"{BEGIN}\n{block}\n{END}"
