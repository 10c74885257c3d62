# harness/schemas.py
from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from constants import (BATCH_STEPS, CHECKPOINT_EVERY, COLLECT_STEPS, COST_LIMIT, CRITIC_ROUNDS, DISCOUNT, EPOCHS,
                       HIDDEN_LAYERS, HIDDEN_WIDTH, REPLAY_STEPS, RISK_LEVEL, TRACE_DECAY, TRUST_REGION_DELTA,
                       VALUE_LR)
from trc_optimizer.config import CVaRConfig, UpdateSettings

CHECKPOINT_VERSION = 1


class TrainConfig(BaseModel):
    """
    Configuración completa de una ejecución. Se guarda como config.json en el directorio de salida.
    Prioridad al construirla: CLI > fichero key=value > valores por defecto de constants.py.
    """
    model_config = ConfigDict(extra="forbid")

    env: str = "pointnav"
    epochs: int = Field(EPOCHS, ge=0, description="P")
    collect_steps: int = Field(COLLECT_STEPS, gt=0, description="S")
    batch_steps: int = Field(BATCH_STEPS, gt=0, description="B")
    replay_steps: int = Field(REPLAY_STEPS, gt=0, description="L")
    delta: float = Field(TRUST_REGION_DELTA, gt=0.0)
    alpha: float = Field(RISK_LEVEL, gt=0.0, le=1.0)
    cost_limit: float = Field(COST_LIMIT, ge=0.0, description="d, por paso")
    gamma: float = Field(DISCOUNT, gt=0.0, lt=1.0)
    trace_decay: float = Field(TRACE_DECAY, ge=0.0, le=1.0)
    lr: float = Field(VALUE_LR, gt=0.0)
    hidden_width: int = Field(HIDDEN_WIDTH, gt=0)
    hidden_layers: int = Field(HIDDEN_LAYERS, ge=0)
    critic_rounds: int = Field(CRITIC_ROUNDS, gt=0)
    mode: Literal["offtrc", "unconstrained", "onpolicy_surrogate"] = "offtrc"
    seed: int = 0
    out_dir: str = "runs/default"
    checkpoint_every: int = Field(CHECKPOINT_EVERY, gt=0)
    max_episode_steps: Optional[int] = Field(None, gt=0)

    @model_validator(mode="after")
    def _check_lengths(self) -> TrainConfig:
        if not self.collect_steps <= self.batch_steps <= self.replay_steps:
            raise ValueError(
                f"need collect_steps <= batch_steps <= replay_steps, got "
                f"{self.collect_steps}, {self.batch_steps}, {self.replay_steps}"
            )
        return self

    @property
    def hidden(self) -> tuple[int, ...]:
        return (self.hidden_width,) * self.hidden_layers

    def update_settings(self) -> UpdateSettings:
        return UpdateSettings(
            cvar=CVaRConfig(alpha=self.alpha, limit=self.cost_limit, gamma=self.gamma),
            delta=self.delta,
            trace_decay=self.trace_decay,
            mode=self.mode,
        )


class CheckpointMeta(BaseModel):
    """Cabecera JSON de un checkpoint; los vectores de parámetros van en el .npz hermano."""
    model_config = ConfigDict(extra="forbid")

    version: Literal[1] = CHECKPOINT_VERSION
    env: str
    obs_dim: int
    policy_kind: Literal["gaussian", "categorical"]
    policy_sizes: list[int]
    critic_sizes: list[int]
    epoch: int
    env_steps: int
    cumulative_cv: int
    rng_state: dict[str, Any]
    config: TrainConfig
