"""Overflow probabilities of tandem queues: exact, closed-form and simulated."""

from ._core import (
    DomainError,
    EqualRates,
    Error,
    NotConverged,
    Rates,
    UnstableRates,
    discriminant,
    eval_p,
    horizon_dp,
    real_section,
    simulate_pn,
    solve_alpha,
    solve_pn,
    sweep,
    transform_tn,
    verify,
    w_star,
)

__all__ = [
    "DomainError",
    "EqualRates",
    "Error",
    "NotConverged",
    "Rates",
    "UnstableRates",
    "discriminant",
    "eval_p",
    "horizon_dp",
    "real_section",
    "simulate_pn",
    "solve_alpha",
    "solve_pn",
    "sweep",
    "transform_tn",
    "verify",
    "w_star",
]
