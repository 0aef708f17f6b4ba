"""Infeasibility measure, merit function and penalty update."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InvariantViolation(RuntimeError):
    """An algorithmic invariant that theory guarantees did not hold."""


@dataclass(frozen=True)
class InfeasibilityRule:
    """Sample-size infeasibility ``h(N)``.

    ``n_max=None`` selects the unbounded rule ``h(N) = 1/N``; otherwise the
    finite-sum rule ``h(N) = (n_max - N) / n_max``.
    """

    n_max: int | None = None

    def __post_init__(self):
        if self.n_max is not None and self.n_max < 1:
            raise ValueError("n_max must be a positive integer")

    @property
    def finite_sum(self) -> bool:
        return self.n_max is not None

    def __call__(self, N) -> float:
        return h(self, N)


def h(rule: InfeasibilityRule, N) -> float:
    if N < 1:
        raise ValueError(f"sample size must be >= 1, got {N}")
    if rule.n_max is None:
        return 1.0 / N
    if N > rule.n_max:
        raise ValueError(f"sample size {N} exceeds n_max={rule.n_max}")
    return (rule.n_max - N) / rule.n_max


def merit(f_val, h_val, theta) -> float:
    return theta * f_val + (1.0 - theta) * h_val


def s2_holds(theta, f_diff, h_Nk, h_Ntilde, r, tol=0.0) -> bool:
    """Merit decrease test of the penalty update, for a given ``theta``."""
    lhs = merit(f_diff, h_Ntilde - h_Nk, theta)
    return lhs <= 0.5 * (1.0 - r) * (h_Ntilde - h_Nk) + tol


def penalty_update(theta_k, f_diff, h_Nk, h_Ntilde, r, theta_floor=0.0) -> float:
    """Return the next penalty parameter.

    ``f_diff`` is ``f_{N~}(x_k) - f_{N_k}(x_k)``. The parameter is kept when
    the merit already decreases enough; otherwise it is replaced by the
    largest value for which the decrease holds.
    """
    if s2_holds(theta_k, f_diff, h_Nk, h_Ntilde, r):
        return theta_k
    dh = h_Nk - h_Ntilde
    denom = 2.0 * (f_diff + dh)
    if not denom > 0.0:
        raise InvariantViolation(
            f"penalty update denominator {denom!r} <= 0 "
            f"(f_diff={f_diff!r}, dh={dh!r}, theta={theta_k!r})")
    theta = (1.0 + r) * dh / denom
    if not 0.0 < theta <= theta_k:
        raise InvariantViolation(f"penalty update produced theta={theta!r} from {theta_k!r}")
    if theta <= theta_floor:
        raise InvariantViolation(f"penalty parameter collapsed to {theta!r}")
    return theta


def theta_floor(theta0) -> float:
    return float(np.finfo(float).eps) * theta0
