"""
Cálculo exacto, sobre CMDPs finitos, de valores, ventajas, distribuciones de estado descontadas
y de las funciones sustitutas off-policy. Todo por sistemas lineales (numpy.linalg.solve).
"""

from __future__ import annotations

import numpy as np

from tabular_oracle.types import ExactQuantities, OracleInputError, TabularCMDP, TabularPolicy


def _check(m: TabularCMDP, pi: TabularPolicy) -> None:
    if pi.pi.shape != (m.nS, m.nA):
        raise OracleInputError(f"policy shape {pi.pi.shape} does not match CMDP ({m.nS}, {m.nA})")


def _P_pi(m: TabularCMDP, pi: TabularPolicy) -> np.ndarray:
    return np.einsum("sa,sat->st", pi.pi, m.P)


def _solve(m: TabularCMDP, P_pi: np.ndarray, discount: float, rhs: np.ndarray) -> np.ndarray:
    system = np.eye(m.nS) - discount * P_pi
    try:
        return np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as e:
        raise OracleInputError(f"singular Bellman system: {e}") from e


def _values_for(m: TabularCMDP, pi: TabularPolicy, signal: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """V, Q, A para una señal [s, a, s'] (recompensa o coste)."""
    P_pi = _P_pi(m, pi)
    r_sa = np.einsum("sat,sat->sa", m.P, signal)
    r_pi = np.einsum("sa,sa->s", pi.pi, r_sa)
    V = _solve(m, P_pi, m.gamma, r_pi)
    Q = r_sa + m.gamma * np.einsum("sat,t->sa", m.P, V)
    return V, Q, Q - V[:, None]


def solve_values(m: TabularCMDP, pi: TabularPolicy) -> dict[str, np.ndarray]:
    """V, Q, A de la recompensa y V_C, Q_C, A_C del coste, resolviendo (I - gamma P_pi) V = r_pi."""
    _check(m, pi)
    V, Q, A = _values_for(m, pi, m.R)
    V_C, Q_C, A_C = _values_for(m, pi, m.C)
    return {"V": V, "Q": Q, "A": A, "V_C": V_C, "Q_C": Q_C, "A_C": A_C}


def _square_signal(m: TabularCMDP, V_C: np.ndarray) -> np.ndarray:
    # c^2 + 2 gamma c V_C(s')
    return m.C ** 2 + 2.0 * m.gamma * m.C * V_C[None, None, :]


def solve_square_values(m: TabularCMDP, pi: TabularPolicy, V_C: np.ndarray | None = None) -> dict[str, np.ndarray]:
    """
    S_C(s, a) = E[c^2 + 2 gamma c V_C(s') + gamma^2 S_C(s')], S_C(s) = E_pi[S_C(s, a)],
    A_S = S_C(s, a) - S_C(s).
    """
    _check(m, pi)
    if V_C is None:
        V_C = _values_for(m, pi, m.C)[0]
    P_pi = _P_pi(m, pi)
    q_sa = np.einsum("sat,sat->sa", m.P, _square_signal(m, V_C))
    q_pi = np.einsum("sa,sa->s", pi.pi, q_sa)
    S = _solve(m, P_pi, m.gamma ** 2, q_pi)
    SQ = q_sa + m.gamma ** 2 * np.einsum("sat,t->sa", m.P, S)
    return {"S_C": S, "SQ_C": SQ, "A_S": SQ - S[:, None]}


def discounted_dists(m: TabularCMDP, pi: TabularPolicy) -> tuple[np.ndarray, np.ndarray]:
    """d = (1-g) rho^T (I - g P_pi)^-1 y d2 = (1-g^2) rho^T (I - g^2 P_pi)^-1."""
    _check(m, pi)
    P_pi = _P_pi(m, pi)
    g = m.gamma
    d = (1.0 - g) * _solve(m, P_pi.T, g, m.rho)
    d2 = (1.0 - g * g) * _solve(m, P_pi.T, g * g, m.rho)
    return d / d.sum(), d2 / d2.sum()


def exact_quantities(m: TabularCMDP, pi: TabularPolicy) -> ExactQuantities:
    vals = solve_values(m, pi)
    sq = solve_square_values(m, pi, vals["V_C"])
    d, d2 = discounted_dists(m, pi)
    return ExactQuantities(
        V=vals["V"], Q=vals["Q"], A=vals["A"],
        V_C=vals["V_C"], Q_C=vals["Q_C"], A_C=vals["A_C"],
        S_C=sq["S_C"], SQ_C=sq["SQ_C"], A_S=sq["A_S"],
        d=d, d2=d2,
        J=float(m.rho @ vals["V"]),
        J_C=float(m.rho @ vals["V_C"]),
        J_S=float(m.rho @ sq["S_C"]),
    )


def exact_J(m: TabularCMDP, pi: TabularPolicy) -> dict[str, float]:
    """
    (J, J_C, J_S) por dos caminos: rho^T V y la forma con distribuciones de estado
    J_C = E_{d}[c] / (1 - g), J_S = E_{d2}[c^2 + 2 g c V_C(s')] / (1 - g^2).
    """
    q = exact_quantities(m, pi)
    g = m.gamma
    per_state_c = np.einsum("sa,sat,sat->s", pi.pi, m.P, m.C)
    per_state_r = np.einsum("sa,sat,sat->s", pi.pi, m.P, m.R)
    per_state_s = np.einsum("sa,sat,sat->s", pi.pi, m.P, _square_signal(m, q.V_C))
    return {
        "J": q.J,
        "J_C": q.J_C,
        "J_S": q.J_S,
        "J_dist": float(q.d @ per_state_r / (1.0 - g)),
        "J_C_dist": float(q.d @ per_state_c / (1.0 - g)),
        "J_S_dist": float(q.d2 @ per_state_s / (1.0 - g * g)),
    }


def _check_support(mu: TabularPolicy, pi_new: TabularPolicy) -> None:
    if np.any((mu.pi <= 0.0) & (pi_new.pi > 0.0)):
        raise OracleInputError("behavior policy has zero probability on the support of the new policy")


def surrogate_J(m: TabularCMDP, mu: TabularPolicy, pi: TabularPolicy, pi_new: TabularPolicy) -> dict[str, float]:
    """
    Sustitutas off-policy evaluadas exactamente:
      J^{mu,pi}(pi')   = J(pi)   + 1/(1-g)   E_{d^mu, mu}[pi'/mu A^pi]
      J_C^{mu,pi}(pi') = J_C(pi) + 1/(1-g)   E_{d^mu, mu}[pi'/mu A_C^pi]
      J_S^{mu,pi}(pi') = J_S(pi) + 1/(1-g^2) E_{d2^mu, mu}[pi'/mu A_S^pi]
    """
    for p in (mu, pi, pi_new):
        _check(m, p)
    _check_support(mu, pi_new)

    q = exact_quantities(m, pi)
    d_mu, d2_mu = discounted_dists(m, mu)
    g = m.gamma
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(mu.pi > 0.0, pi_new.pi / mu.pi, 0.0)
    w = mu.pi * ratio  # = pi_new en el soporte de mu

    return {
        "J": q.J + float(np.einsum("s,sa,sa->", d_mu, w, q.A)) / (1.0 - g),
        "J_C": q.J_C + float(np.einsum("s,sa,sa->", d_mu, w, q.A_C)) / (1.0 - g),
        "J_S": q.J_S + float(np.einsum("s,sa,sa->", d2_mu, w, q.A_S)) / (1.0 - g * g),
    }


def max_tv(p: TabularPolicy, q: TabularPolicy) -> float:
    """D(p, q) = max_s 1/2 sum_a |p(a|s) - q(a|s)|."""
    return float(0.5 * np.abs(p.pi - q.pi).sum(axis=1).max())


def max_kl(p: TabularPolicy, q: TabularPolicy) -> float:
    """max_s KL(p(.|s) || q(.|s)); inf si q no cubre el soporte de p."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p.pi > 0.0, p.pi * (np.log(p.pi) - np.log(q.pi)), 0.0)
    return float(terms.sum(axis=1).max())


def sample_cost_returns(m: TabularCMDP, pi: TabularPolicy, n_episodes: int, rng: np.random.Generator,
                        *, tail_tol: float = 1e-8) -> np.ndarray:
    """
    Muestras de Monte Carlo del retorno de coste sum_t g^t c_t, simulando n_episodes en paralelo.
    El horizonte se corta cuando g^t * max(C) / (1 - g) < tail_tol.
    """
    _check(m, pi)
    if n_episodes <= 0:
        raise OracleInputError(f"n_episodes must be > 0, got {n_episodes}")
    g = m.gamma
    c_max = float(m.C.max())
    horizon = 1
    if c_max > 0.0:
        horizon = max(1, int(np.ceil(np.log(tail_tol * (1.0 - g) / c_max) / np.log(g))))

    cum_pi = np.cumsum(pi.pi, axis=1)
    cum_P = np.cumsum(m.P, axis=2)
    s = rng.choice(m.nS, size=n_episodes, p=m.rho)
    total = np.zeros(n_episodes)
    disc = 1.0
    for _ in range(horizon):
        a = np.minimum((rng.random(n_episodes)[:, None] > cum_pi[s]).sum(axis=1), m.nA - 1)
        s_next = np.minimum((rng.random(n_episodes)[:, None] > cum_P[s, a]).sum(axis=1), m.nS - 1)
        total += disc * m.C[s, a, s_next]
        disc *= g
        s = s_next
    return total
