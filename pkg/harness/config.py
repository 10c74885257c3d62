from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Iterable, Mapping

from pydantic import ValidationError

from cmdp_core.types import RejectedInputError
from constants import SEED_ENV
from harness.schemas import TrainConfig

log = logging.getLogger(__name__)


def read_key_values(path: str | Path) -> dict[str, str]:
    """
    Fichero plano `clave = valor`, una por línea. '#' inicia un comentario; las líneas vacías se ignoran.
    """
    values: dict[str, str] = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise RejectedInputError(f"{path}:{n}: expected key=value, got {raw!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def parse_overrides(args: Iterable[str]) -> dict[str, str]:
    """['--batch_steps', '2000', '--alpha=1.0'] -> {'batch_steps': '2000', 'alpha': '1.0'}"""
    out: dict[str, str] = {}
    items = list(args)
    i = 0
    while i < len(items):
        tok = items[i]
        if not tok.startswith("--"):
            raise RejectedInputError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        elif i + 1 < len(items):
            value = items[i + 1]
            i += 2
        else:
            raise RejectedInputError(f"missing value for {tok}")
        out[key.replace("-", "_")] = value
    return out


def load_config(path: str | Path | None = None, overrides: Mapping[str, str] | None = None) -> TrainConfig:
    """Valores por defecto <- fichero <- OFFTRC_SEED <- overrides de la CLI."""
    merged: dict[str, str] = {}
    if path is not None:
        merged.update(read_key_values(path))
    if SEED_ENV in os.environ:
        log.info("seed set by %s=%s", SEED_ENV, os.environ[SEED_ENV])
        merged["seed"] = os.environ[SEED_ENV]
    if overrides:
        merged.update(overrides)
    merged = {k: (None if v.lower() in ("none", "") else v) for k, v in merged.items()}

    try:
        return TrainConfig(**merged)
    except ValidationError as e:
        raise RejectedInputError(f"invalid training config: {e}") from e
