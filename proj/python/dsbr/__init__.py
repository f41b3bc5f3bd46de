"""Payoff-based independent learning in two-player zero-sum games.

Thin wrapper around the native extension: doubly smoothed best-response
dynamics for matrix and Markov games, exact Nash-gap / minimax-value oracles,
policy-induced chain analysis, and the Lyapunov diagnostics logged by the
simulation harness.
"""

from ._dsbr import (
    MarkovGame,
    MatrixGame,
    NumericalError,
    Policy,
    ValidationError,
    appendix_d_game,
    appendix_d_mixing_lower_bound,
    appendix_d_occupancy,
    appendix_d_policy,
    apply_T,
    best_response_value,
    dsbr_vi_run,
    ell_tau,
    entropy,
    game_to_json,
    generate_game,
    induce_chain,
    lyapunov_V,
    marginal_payoff,
    markov_nash_gap,
    matrix_game_value,
    matrix_nash_gap,
    minimax_value_iteration,
    mixing_time,
    parse_game_json,
    policy_value,
    q_target,
    rho_delta,
    run_dsbr,
    softmax,
    stationary_distribution,
    tv_distance,
    uniform_mixing_bound,
)

__all__ = [
    "MarkovGame",
    "MatrixGame",
    "NumericalError",
    "Policy",
    "ValidationError",
    "appendix_d_game",
    "appendix_d_mixing_lower_bound",
    "appendix_d_occupancy",
    "appendix_d_policy",
    "apply_T",
    "best_response_value",
    "dsbr_vi_run",
    "ell_tau",
    "entropy",
    "game_to_json",
    "generate_game",
    "induce_chain",
    "lyapunov_V",
    "marginal_payoff",
    "markov_nash_gap",
    "matrix_game_value",
    "matrix_nash_gap",
    "minimax_value_iteration",
    "mixing_time",
    "parse_game_json",
    "policy_value",
    "q_target",
    "rho_delta",
    "run_dsbr",
    "softmax",
    "stationary_distribution",
    "tv_distance",
    "uniform_mixing_bound",
]

__version__ = "0.1.0"
