from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from tabular_oracle.bounds import (cost_bound_check, cvar_bound_check, reward_bound_check, square_bound_check,
                                   trust_region_chain_check)
from tabular_oracle.cvar import empirical_cvar, gaussian_cvar
from tabular_oracle.exact import exact_J, sample_cost_returns, surrogate_J
from tabular_oracle.instances import DEFAULT_GAMMAS, random_instance
from tabular_oracle.types import BoundCheck

log = logging.getLogger(__name__)

DEFAULT_ALPHAS = (0.125, 0.25, 0.5, 1.0)
BOUND_TOL = 1e-9
IDENTITY_TOL = 1e-9
EQUALITY_EVERY = 10  # una de cada 10 instancias usa pi' = pi
MC_EPISODES = 200
# filas informativas: se escriben pero no cuentan para el resultado
ADVISORY_CHECKS = frozenset({"empirical_cvar"})


@dataclass(frozen=True)
class VerificationReport:
    rows: pd.DataFrame
    n_instances: int

    @property
    def failures(self) -> pd.DataFrame:
        return self.rows[~self.rows["ok"] & self.rows["gating"]]

    @property
    def passed(self) -> bool:
        return self.failures.empty


def _bound_row(iid: int, check: BoundCheck, *, alpha: float | None, gamma: float, same: bool) -> dict:
    if same and check.name == "cvar_bound":
        ok = abs(check.gap) <= BOUND_TOL
    else:
        ok = check.holds(BOUND_TOL)
    return {
        "instance": iid, "check": check.name, "alpha": alpha, "gamma": gamma, "same_policy": same,
        "lhs": check.lhs, "rhs": check.rhs, "gap": check.gap, "defined": check.defined, "ok": bool(ok),
        "gating": check.name not in ADVISORY_CHECKS,
    }


def _identity_row(iid: int, name: str, lhs: float, rhs: float, *, gamma: float, same: bool) -> dict:
    return {
        "instance": iid, "check": name, "alpha": None, "gamma": gamma, "same_policy": same,
        "lhs": lhs, "rhs": rhs, "gap": rhs - lhs, "defined": True, "ok": bool(abs(rhs - lhs) <= IDENTITY_TOL),
        "gating": True,
    }


def run_verification(
        n_instances: int = 500,
        seed: int = 0,
        *,
        gammas: Sequence[float] = DEFAULT_GAMMAS,
        alphas: Sequence[float] = DEFAULT_ALPHAS,
        mc_episodes: int = MC_EPISODES,
) -> VerificationReport:
    """
    Suite del oráculo tabular: cota del CVaR para cada alpha, cota de J_S, cotas de coste/recompensa,
    cadena del trust region, identidades de las sustitutas y acuerdo de las dos rutas de J_C/J_S.
    Con mc_episodes > 0 añade, como diagnóstico, el CVaR empírico de retornos simulados frente al
    CVaR gaussiano de pi' (filas que no cuentan para `passed`).
    """
    rng = np.random.default_rng(seed)
    rows: list[dict] = []

    for iid in range(n_instances):
        same = iid % EQUALITY_EVERY == 0
        inst = random_instance(rng, gammas=gammas, same_policy=same)
        m, mu, pi, pi_new = inst.cmdp, inst.mu, inst.pi, inst.pi_new
        g = m.gamma

        for alpha in alphas:
            rows.append(_bound_row(iid, cvar_bound_check(m, mu, pi, pi_new, alpha), alpha=alpha, gamma=g, same=same))
        for check in (square_bound_check(m, mu, pi, pi_new),
                      cost_bound_check(m, mu, pi, pi_new),
                      reward_bound_check(m, mu, pi, pi_new),
                      trust_region_chain_check(mu, pi, pi_new)):
            rows.append(_bound_row(iid, check, alpha=None, gamma=g, same=same))

        # sustitutas en pi' = pi
        exact = exact_J(m, pi)
        at_pi = surrogate_J(m, mu, pi, pi)
        rows.append(_identity_row(iid, "surrogate_J_C", exact["J_C"], at_pi["J_C"], gamma=g, same=same))
        rows.append(_identity_row(iid, "surrogate_J_S", exact["J_S"], at_pi["J_S"], gamma=g, same=same))
        rows.append(_identity_row(iid, "routes_J_C", exact["J_C"], exact["J_C_dist"], gamma=g, same=same))
        rows.append(_identity_row(iid, "routes_J_S", exact["J_S"], exact["J_S_dist"], gamma=g, same=same))

        if mc_episodes > 0:
            samples = sample_cost_returns(m, pi_new, mc_episodes, np.random.default_rng([seed, iid]))
            new = exact_J(m, pi_new)
            for alpha in alphas:
                if mc_episodes * alpha < 1.0:
                    continue
                check = BoundCheck(name="empirical_cvar", lhs=empirical_cvar(samples, alpha),
                                   rhs=gaussian_cvar(new["J_C"], new["J_S"], alpha))
                rows.append(_bound_row(iid, check, alpha=alpha, gamma=g, same=same))

    df = pd.DataFrame(rows)
    report = VerificationReport(rows=df, n_instances=n_instances)
    if report.passed:
        log.info("verification passed: %d instances, %d checks", n_instances, len(df))
    else:
        log.warning("verification FAILED: %d of %d checks", len(report.failures), len(df))
    return report
