"""
Public API for the `harness` package: configuration, training loop, evaluation,
verification, sweeps, checkpoints and run outputs (CSV, SVG, text summaries).
"""

from __future__ import annotations

from .checkpoint import Agent, CheckpointMismatchError, load_checkpoint, make_agent, save_checkpoint
from .config import load_config, parse_overrides, read_key_values
from .evaluate import EvalReport, evaluate, evaluate_policy
from .rows import RunLog
from .schemas import CheckpointMeta, TrainConfig
from .sweep import run_sweep
from .train import TrainResult, train
from .verify import verify

__all__ = [
    "TrainConfig",
    "CheckpointMeta",
    "load_config",
    "parse_overrides",
    "read_key_values",
    "train",
    "TrainResult",
    "RunLog",
    "evaluate",
    "evaluate_policy",
    "EvalReport",
    "verify",
    "run_sweep",
    "Agent",
    "make_agent",
    "save_checkpoint",
    "load_checkpoint",
    "CheckpointMismatchError",
]
