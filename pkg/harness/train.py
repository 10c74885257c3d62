from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from cmdp_core.buffer import ReplayBuffer
from cmdp_core.envs import EnvRunner, make_env
from diff_engine.mlp import NonFiniteError
from harness.checkpoint import Agent, checkpoint_path, make_agent, restore_into, save_checkpoint
from harness.plots import plot_run
from harness.rows import RunLog
from harness.schemas import TrainConfig
from trc_optimizer.critics_update import update_critics
from trc_optimizer.retrace import retrace_targets
from trc_optimizer.types import NumericalAbort
from trc_optimizer.update import as_on_policy, policy_update

log = logging.getLogger(__name__)


@dataclass
class TrainResult:
    run_log: RunLog
    out_dir: Path
    agent: Agent
    last_checkpoint: Path
    aborted: bool = False
    abort_reason: str = ""


def train(cfg: TrainConfig) -> TrainResult:
    """
    Bucle por epoch:
      1. recoger S pasos con pi   2. J_C, J_S del rollout (dentro de policy_update)
      3. rollout -> buffer        4. batch de B pasos
      5. retrace con pi_old, ventajas, paso de política
      6. retrace con pi_new y actualización de V, V_C, S_C
    Checkpoint cada `checkpoint_every` epochs y al final. Ante NumericalAbort se restaura el último
    checkpoint, se escriben los logs acumulados y se devuelve aborted=True.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(cfg.model_dump_json(indent=2), encoding="utf-8")

    rng = np.random.default_rng(cfg.seed)
    env = make_env(cfg.env, max_episode_steps=cfg.max_episode_steps)
    agent = make_agent(env, cfg, rng)
    buffer = ReplayBuffer(cfg.replay_steps)
    runner = EnvRunner(env, seed=cfg.seed)
    settings = cfg.update_settings()
    run_log = RunLog()

    last = save_checkpoint(checkpoint_path(out, 0), agent, cfg=cfg, epoch=0, env_steps=0, cumulative_cv=0, rng=rng)
    aborted, reason = False, ""
    epoch = 0

    try:
        for epoch in range(1, cfg.epochs + 1):
            collected = runner.collect(agent.policy, cfg.collect_steps, rng)
            buffer.append(collected.trajectories)
            batch = buffer.sample(cfg.batch_steps, rng)

            upd = policy_update(agent.policy, agent.critics, batch, collected.trajectories, settings)

            segments = [tr for tr in batch.trajectories if len(tr)]
            if settings.mode == "onpolicy_surrogate":
                segments = as_on_policy(segments, agent.policy, agent.policy.get_flat())
            targets = retrace_targets(segments, agent.critics, agent.policy, cfg.trace_decay, cfg.gamma)
            states = np.concatenate([tr.states() for tr in segments])
            report = update_critics(states, targets, agent.critics, agent.optimizers, cfg.critic_rounds)

            row = run_log.add_epoch(epoch, collected, upd.diagnostics, report, short_batch=batch.short)
            log.info("epoch %d steps=%d score=%.3f cost_rate=%.4f cv_total=%d cvar=%.4f kl=%.2e",
                     epoch, row["env_steps"], row["score_mean"], row["cost_rate"], row["cv_cumulative"],
                     upd.diagnostics.approx_cvar, upd.diagnostics.kl)

            if epoch % cfg.checkpoint_every == 0:
                last = save_checkpoint(checkpoint_path(out, epoch), agent, cfg=cfg, epoch=epoch,
                                       env_steps=run_log.env_steps, cumulative_cv=run_log.cumulative_cv, rng=rng)
    except (NumericalAbort, NonFiniteError) as e:
        aborted, reason = True, str(e)
        log.error("numerical abort at epoch %d: %s; rolling back to %s", epoch, e, last)
        meta = restore_into(agent, last, rng)
        run_log.truncate(meta.epoch, meta.env_steps, meta.cumulative_cv)

    if not aborted and cfg.epochs % cfg.checkpoint_every != 0:
        last = save_checkpoint(checkpoint_path(out, cfg.epochs), agent, cfg=cfg, epoch=cfg.epochs,
                               env_steps=run_log.env_steps, cumulative_cv=run_log.cumulative_cv, rng=rng)

    run_log.write(out)
    plot_run(run_log.metrics_frame(), out, cost_limit=cfg.cost_limit)
    return TrainResult(run_log=run_log, out_dir=out, agent=agent, last_checkpoint=last,
                       aborted=aborted, abort_reason=reason)
