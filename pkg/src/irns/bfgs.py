"""Safeguarded BFGS directions for nonsmooth sample-average functions."""

from __future__ import annotations

import numpy as np


class QuasiNewtonState:
    """Inverse-Hessian approximation ``B`` with a curvature skip rule.

    Parameters
    ----------
    n : int
        Dimension.
    skip_threshold : float
        An update is skipped when ``y^T s < skip_threshold * ||y||^2``.
    m_lower : float
        Constant of the descent test ``sup g^T p <= -(m/2) ||g_bar||^2``.
    """

    def __init__(self, n, skip_threshold=1e-4, m_lower=1e-8):
        self.n = int(n)
        self.B = np.eye(self.n)
        self.skip_threshold = float(skip_threshold)
        self.m_lower = float(m_lower)
        self.n_updates = 0
        self.n_skips = 0
        self.n_resets = 0

    def reset(self):
        self.B = np.eye(self.n)
        self.n_resets += 1


def direction(state: QuasiNewtonState, g_bar, fev=None) -> np.ndarray:
    """``p = -B g_bar``."""
    if fev is not None:
        fev.charge(state.n)
    return -(state.B @ np.asarray(g_bar, dtype=float))


def descent_check(state: QuasiNewtonState, evaluation, N, p, g_bar, fev=None, gamma=0.0,
                  alpha_min=0.0):
    """Certify ``p`` against the exact directional supremum of ``f_N``.

    ``p`` passes when ``sup g^T p <= -(m/2) ||g_bar||^2`` and, for
    ``gamma > 0``, also ``sup g^T p <= -2 gamma ||p||^2``; the second test
    bounds the curvature of ``B`` so that an Armijo step with constant
    ``gamma`` exists.

    Returns ``(p, status)`` with status ``"ok"``, ``"reset"`` or
    ``"stationary"``. On failure ``B`` is reset to the identity and the
    subgradient direction is tried; if that fails too, the point is treated
    as stationary for ``f_N`` and ``p = 0`` is returned.

    With ``alpha_min > 0`` the supremum is taken over the whole segment
    ``[x, x + alpha_min p]``, so that passing also guarantees the Armijo
    condition at ``alpha_min`` even when a kink lies just ahead of ``x``.
    """
    g_bar = np.asarray(g_bar, dtype=float)
    if not np.any(g_bar):
        return np.zeros_like(g_bar), "ok"
    if fev is not None:
        fev.charge(2)
    g2 = float(g_bar @ g_bar)
    bound = -0.5 * state.m_lower * g2

    def passes(p, p2):
        sup = (evaluation.segment_sup(N, p, alpha_min) if alpha_min > 0.0
               else evaluation.directional_sup(N, p))
        return sup <= min(bound, -2.0 * gamma * p2)

    if passes(p, float(p @ p)):
        return p, "ok"
    state.reset()
    p = -g_bar
    if passes(p, g2):
        return p, "reset"
    return np.zeros_like(g_bar), "stationary"


def update(state: QuasiNewtonState, s, y, fev=None) -> bool:
    """Inverse BFGS update with the curvature skip rule; returns True if applied."""
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    if fev is not None:
        fev.charge(2)
    ys = float(y @ s)
    yy = float(y @ y)
    if yy == 0.0 or ys <= 0.0 or ys < state.skip_threshold * yy:
        state.n_skips += 1
        return False
    if fev is not None:
        fev.charge(state.n + 1)
    rho = 1.0 / ys
    By = state.B @ y
    yBy = float(y @ By)
    B = (state.B - rho * (np.outer(s, By) + np.outer(By, s))
         + (rho * rho * yBy + rho) * np.outer(s, s))
    state.B = 0.5 * (B + B.T)
    state.n_updates += 1
    return True
