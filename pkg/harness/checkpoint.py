from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import gymnasium as gym
import numpy as np

from diff_engine.critics import CRITIC_NAMES, CriticSet
from diff_engine.mlp import Mlp
from diff_engine.optim import Adam
from diff_engine.policies import CategoricalPolicy, GaussianPolicy
from harness.schemas import CheckpointMeta, TrainConfig

log = logging.getLogger(__name__)


class CheckpointMismatchError(ValueError):
    pass


@dataclass
class Agent:
    policy: GaussianPolicy | CategoricalPolicy
    critics: CriticSet
    optimizers: dict[str, Adam]

    @property
    def policy_kind(self) -> str:
        return "categorical" if isinstance(self.policy, CategoricalPolicy) else "gaussian"


def make_agent(env: gym.Env, cfg: TrainConfig, rng: np.random.Generator) -> Agent:
    """Política según el espacio de acciones (Discrete -> categórica) y los tres críticos."""
    obs_dim = int(env.observation_space.shape[0])
    if isinstance(env.action_space, gym.spaces.Discrete):
        policy = CategoricalPolicy.init(obs_dim, int(env.action_space.n), cfg.hidden, rng)
    else:
        space = env.action_space
        policy = GaussianPolicy.init(obs_dim, int(space.shape[0]), cfg.hidden, rng)
        policy.low, policy.high = float(np.min(space.low)), float(np.max(space.high))
    critics = CriticSet.init(obs_dim, cfg.hidden, rng)
    optimizers = {name: Adam(critics.nets[name].n_params, cfg.lr) for name in CRITIC_NAMES}
    return Agent(policy=policy, critics=critics, optimizers=optimizers)


# -----------------------------
# Guardar / cargar
# -----------------------------

def checkpoint_path(out_dir: str | Path, epoch: int) -> Path:
    return Path(out_dir) / "checkpoints" / f"epoch_{epoch:05d}.npz"


def save_checkpoint(path: str | Path, agent: Agent, *, cfg: TrainConfig, epoch: int, env_steps: int,
                    cumulative_cv: int, rng: np.random.Generator) -> Path:
    """`<name>.npz` con los vectores planos y momentos de Adam, `<name>.json` con la cabecera."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    arrays: dict[str, np.ndarray] = {"policy": agent.policy.get_flat()}
    for name in CRITIC_NAMES:
        arrays[f"critic_{name}"] = agent.critics.nets[name].get_flat()
        for key, value in agent.optimizers[name].state_dict().items():
            arrays[f"adam_{name}_{key}"] = value
    np.savez(path, **arrays)

    meta = CheckpointMeta(
        env=cfg.env,
        obs_dim=agent.critics.nets["V"].n_in,
        policy_kind=agent.policy_kind,
        policy_sizes=list(agent.policy.net.sizes),
        critic_sizes=list(agent.critics.nets["V"].sizes),
        epoch=epoch,
        env_steps=env_steps,
        cumulative_cv=cumulative_cv,
        rng_state=rng.bit_generator.state,
        config=cfg,
    )
    path.with_suffix(".json").write_text(meta.model_dump_json(indent=2), encoding="utf-8")
    log.debug("checkpoint written: %s", path)
    return path


def load_checkpoint(path: str | Path) -> tuple[CheckpointMeta, Agent]:
    path = Path(path)
    meta_path = path.with_suffix(".json")
    if not path.exists() or not meta_path.exists():
        raise FileNotFoundError(f"checkpoint {path} (or its .json header) not found")
    meta = CheckpointMeta.model_validate_json(meta_path.read_text(encoding="utf-8"))

    with np.load(path) as data:
        arrays = {k: data[k] for k in data.files}

    if meta.policy_kind == "categorical":
        policy = CategoricalPolicy(Mlp(meta.policy_sizes))
    else:
        policy = GaussianPolicy(Mlp(meta.policy_sizes), np.zeros(meta.policy_sizes[-1]))
    if arrays["policy"].shape != (policy.n_params,):
        raise CheckpointMismatchError(f"policy vector in {path} does not match layout {meta.policy_sizes}")
    policy.set_flat(arrays["policy"])

    critics = CriticSet(*(Mlp(meta.critic_sizes) for _ in CRITIC_NAMES))
    optimizers: dict[str, Adam] = {}
    for name in CRITIC_NAMES:
        critics.nets[name].set_flat(arrays[f"critic_{name}"])
        opt = Adam(critics.nets[name].n_params, meta.config.lr)
        opt.load_state_dict({k: arrays[f"adam_{name}_{k}"] for k in ("m", "v", "t")})
        optimizers[name] = opt
    return meta, Agent(policy=policy, critics=critics, optimizers=optimizers)


def restore_into(agent: Agent, path: str | Path, rng: np.random.Generator) -> CheckpointMeta:
    """Rollback en memoria: copia parámetros, momentos y estado del rng desde un checkpoint."""
    meta, saved = load_checkpoint(path)
    agent.policy.set_flat(saved.policy.get_flat())
    agent.critics.set_flat(saved.critics.get_flat())
    for name in CRITIC_NAMES:
        agent.optimizers[name].load_state_dict(saved.optimizers[name].state_dict())
    rng.bit_generator.state = meta.rng_state
    return meta


def check_env_matches(meta: CheckpointMeta, env_id: str, env: gym.Env) -> None:
    if env_id != meta.env:
        raise CheckpointMismatchError(f"checkpoint was trained on {meta.env!r}, not {env_id!r}")
    if int(env.observation_space.shape[0]) != meta.obs_dim:
        raise CheckpointMismatchError(
            f"observation size {env.observation_space.shape[0]} does not match checkpoint ({meta.obs_dim})")
    discrete = isinstance(env.action_space, gym.spaces.Discrete)
    if discrete != (meta.policy_kind == "categorical"):
        raise CheckpointMismatchError("action space kind does not match the checkpoint policy")
