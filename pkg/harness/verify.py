from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

from tabular_oracle.instances import DEFAULT_GAMMAS
from tabular_oracle.suite import DEFAULT_ALPHAS, VerificationReport, run_verification

log = logging.getLogger(__name__)


def verify(instances: int = 500, seed: int = 0, *, out_dir: str | Path | None = None,
           gammas: Sequence[float] = DEFAULT_GAMMAS, alphas: Sequence[float] = DEFAULT_ALPHAS) -> VerificationReport:
    """Suite completa del oráculo; con out_dir escribe verification.csv (una fila por comprobación)."""
    report = run_verification(instances, seed, gammas=gammas, alphas=alphas)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        report.rows.to_csv(out / "verification.csv", index=False, float_format="%.12g", lineterminator="\n")
        log.info("verification rows written to %s", out / "verification.csv")
    return report
