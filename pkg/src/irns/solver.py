"""Inexact-restoration variable sample size solver (IR-NS).

Each iteration enlarges the sample (restoration), adjusts the merit penalty,
then backtracks over step sizes ``0.5**j`` trying up to three sample sizes
no larger than the restored one, and finally updates the BFGS matrix.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import bfgs
from .merit import (InfeasibilityRule, InvariantViolation, h, merit, penalty_update, s2_holds,
                    theta_floor)
from .sampling import FevCounter, PointEvaluation, Problem, SampleAverage

logger = logging.getLogger(__name__)

STRATEGIES = ("ir", "heuristic", "full")


class LineSearchError(RuntimeError):
    """Backtracking fell below ``alpha_min`` without an acceptable step."""


class BetaViolation(RuntimeError):
    """Restored sample raised the objective by more than ``beta * h(N_k)``."""


@dataclass
class SolverConfig:
    theta0: float = 0.9
    r: float = 0.95
    gamma: float = 1e-4
    gamma_bar: float = 1.0
    beta: float = 1e6
    n0: int | None = None
    max_fev: int = 10**6
    alpha_min: float = 2.0**-30
    seed: int = 0
    skip_threshold: float = 1e-4
    m_lower: float = 1e-8
    strict_beta: bool = False
    gtol: float | None = None
    max_iter: int | None = None

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"r must lie in (0, 1), got {self.r}")
        if not 0.0 < self.theta0 < 1.0:
            raise ValueError(f"theta0 must lie in (0, 1), got {self.theta0}")
        if self.gamma <= 0 or self.gamma_bar <= 0:
            raise ValueError("gamma and gamma_bar must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.n0 is not None and self.n0 < 1:
            raise ValueError("n0 must be a positive integer")
        if self.max_fev < 1:
            raise ValueError("max_fev must be a positive integer")
        if not 0.0 < self.alpha_min <= 1.0:
            raise ValueError("alpha_min must lie in (0, 1]")


@dataclass
class Iterate:
    x: np.ndarray
    N: int
    theta: float
    qn: bfgs.QuasiNewtonState
    k: int = 0
    fev: FevCounter = field(default_factory=FevCounter)
    prev_dir_norm_sq: float = 0.0

    @property
    def B(self) -> np.ndarray:
        return self.qn.B


@dataclass(frozen=True)
class TraceRecord:
    run_id: int
    k: int
    fev: int
    N_k: int
    theta_k: float
    alpha_k: float
    metric: float
    wall_time_ms: float


@dataclass(frozen=True)
class IterationLog:
    """Everything needed to re-check one accepted iteration."""

    k: int
    N_k: int
    N_tilde: int
    N_next: int
    N_trial: int
    theta_k: float
    theta_next: float
    alpha: float
    f_Nk: float
    f_tilde: float
    f_next: float
    p_norm_sq: float
    h_Nk: float
    h_tilde: float
    h_next: float
    backtracks: int
    fev: int
    sum_h: float
    beta_ok: bool
    x_k: np.ndarray = field(repr=False, default=None)
    x_next: np.ndarray = field(repr=False, default=None)


@dataclass
class BetaCheck:
    ok: bool
    ratio: float


@dataclass
class PhaseResult:
    x_next: np.ndarray
    N_next: int
    alpha: float
    p: np.ndarray
    g_bar: np.ndarray
    evaluation: PointEvaluation
    f_next: float
    p_norm_sq: float
    N_trial: int
    backtracks: int


@dataclass
class SolveResult:
    x: np.ndarray
    iterate: Iterate
    trace: list
    log: list
    beta_max_ratio: float
    beta_violations: int
    strategy: str
    samples: object = None
    N0: int | None = None

    @property
    def fev(self) -> int:
        return self.iterate.fev.count


def ceil_int(v) -> int:
    """Ceiling that snaps values within rounding noise of an integer."""
    nearest = round(v)
    if abs(v - nearest) <= 1e-9 * max(1.0, abs(v)):
        return int(nearest)
    return int(math.ceil(v))


def restoration(rule: InfeasibilityRule, N_k, r) -> int:
    """Restored sample size with ``h(N~) <= r h(N_k)`` and ``N~ >= N_k``."""
    if rule.n_max is None:
        return max(N_k, ceil_int(N_k / r))
    n = rule.n_max
    return min(n, max(N_k, ceil_int(n - r * (n - N_k))))


def beta_monitor(f_tilde, f_Nk, h_Nk, beta) -> BetaCheck:
    diff = f_tilde - f_Nk
    if h_Nk <= 0.0:
        return BetaCheck(diff <= 0.0, 0.0 if diff <= 0.0 else math.inf)
    ratio = diff / h_Nk
    return BetaCheck(diff <= beta * h_Nk, ratio)


def trial_sample_size(rule: InfeasibilityRule, N_k, N_tilde, theta_next, alpha,
                      prev_dir_norm_sq, f_tilde, f_Nk, N0, r, gamma) -> int:
    """Lower-bound estimate for the sample size of the optimization phase.

    The squared norm of the previous direction stands in for the unknown
    current one. The result is clamped to ``[N0, N_tilde]``.
    """
    slack = gamma * alpha * prev_dir_norm_sq - f_tilde + f_Nk
    if rule.n_max is not None:
        theta_hat = rule.n_max * theta_next / (1.0 - theta_next)
        raw = (N_k + 0.5 * (1.0 - r) * (N_tilde - N_k) / (1.0 - theta_next)
               - theta_hat * slack)
    else:
        denom = (0.5 * (1.0 - r) * (N_k - N_tilde) / (N_tilde * N_k)
                 + (1.0 - theta_next) / N_k + theta_next * slack)
        if not denom > 0.0:
            return int(N_tilde)
        raw = (1.0 - theta_next) / denom
    if not math.isfinite(raw):
        return int(N_tilde) if raw > 0 else int(min(N0, N_tilde))
    return int(min(max(ceil_int(raw), N0), N_tilde))


def candidate_sizes(N_trial, N_tilde) -> list:
    return sorted({N_trial, ceil_int(0.5 * (N_trial + N_tilde)), N_tilde})


def _merit_tol(*vals) -> float:
    return 1e-12 * (1.0 + max(abs(v) for v in vals))


def optimization_phase(saa: SampleAverage, current: PointEvaluation, rule, N_k, N_tilde,
                       f_Nk, f_tilde, theta_next, qn, config: SolverConfig,
                       prev_dir_norm_sq, N0, strategy="ir") -> PhaseResult:
    """Backtracking search over ``(alpha, N)`` with ``N <= N_tilde``.

    For each ``alpha = 0.5**j`` the candidates are scanned in ascending
    order; the first one satisfying the Armijo condition against
    ``f_{N~}(x_k)``, the infeasibility slack and the merit decrease wins.
    """
    fev = saa.fev
    x = current.x
    h_k = h(rule, N_k)
    h_t = h(rule, N_tilde)
    target = 0.5 * (1.0 - config.r) * (h_t - h_k)
    phi_k = merit(f_Nk, h_k, theta_next)
    directions = {}

    j = 0
    while True:
        alpha = 0.5**j
        if alpha < config.alpha_min:
            raise LineSearchError(
                f"no acceptable step with alpha >= {config.alpha_min} (N~={N_tilde})")
        if strategy == "ir":
            N_trial = trial_sample_size(rule, N_k, N_tilde, theta_next, alpha,
                                        prev_dir_norm_sq, f_tilde, f_Nk, N0,
                                        config.r, config.gamma)
            cands = candidate_sizes(N_trial, N_tilde)
        else:
            N_trial = N_tilde
            cands = [N_tilde]
        for N in cands:
            h_N = h(rule, N)
            slack = (h_N - h_t) / (config.gamma_bar * alpha * alpha)
            if N not in directions:
                g = current.subgradient(N)
                p = bfgs.direction(qn, g, fev)
                p2, g2 = float(p @ p), float(g @ g)
                # the certified direction is p, -g or 0: skip the (costly)
                # certificate when none of them can meet the slack test
                if slack > max(p2, g2):
                    fev.charge(2)
                    continue
                p, _ = bfgs.descent_check(qn, current, N, p, g, fev, config.gamma,
                                          config.alpha_min)
                directions[N] = (p, g, float(p @ p))
            p, g, p2 = directions[N]
            if not h_N <= h_t + config.gamma_bar * alpha * alpha * p2:
                continue
            if p2 == 0.0:
                trial, x_new = current, x
            else:
                x_new = x + alpha * p
                trial = saa.at(x_new)
            f_new = trial.value(N)
            if not f_new - f_tilde <= -config.gamma * alpha * p2:
                continue
            phi_new = merit(f_new, h_N, theta_next)
            if phi_new - phi_k <= target + _merit_tol(phi_new, phi_k):
                return PhaseResult(x_new, N, alpha, p, g, trial, f_new, p2, N_trial, j)
        j += 1


def solve(problem: Problem, config: SolverConfig | None = None, strategy="ir", x0=None,
          run_id=0, samples=None, metric=None, record_timing=False) -> SolveResult:
    """Run IR-NS until the FEV budget is spent.

    Parameters
    ----------
    problem : Problem
    config : SolverConfig
    strategy : {"ir", "heuristic", "full"}
        ``"ir"`` tries three candidate sample sizes per backtracking step,
        ``"heuristic"`` always takes the restored size, ``"full"`` runs on
        the full sample of a finite-sum problem from the start.
    x0 : array, optional
        Starting point; uniform on ``[0, 1]^n`` from the config seed if omitted.
    samples : SampleSet, optional
        Realization stream; built from the config seed if omitted.
    metric : callable, optional
        ``metric(x) -> float`` recorded in the trace (never charged);
        defaults to ``problem.metric``.
    """
    config = config or SolverConfig()
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    if strategy == "full" and not problem.finite_sum:
        raise ValueError("the full-sample strategy needs a finite-sum problem")
    metric = metric or problem.metric
    seq = np.random.SeedSequence(config.seed)
    x0_seq, sample_seq = seq.spawn(2)
    if x0 is None:
        x0 = np.random.default_rng(x0_seq).uniform(0.0, 1.0, problem.n)
    x0 = np.asarray(x0, dtype=float).copy()
    if x0.shape != (problem.n,):
        raise ValueError(f"x0 must have shape ({problem.n},)")
    if samples is None:
        samples = problem.make_samples(sample_seq)

    rule = InfeasibilityRule(problem.n_max)
    N0 = problem.n_max if strategy == "full" else (config.n0 or problem.default_n0())
    if problem.finite_sum and N0 > problem.n_max:
        raise ValueError(f"n0={N0} exceeds the full sample size {problem.n_max}")

    fev = FevCounter()
    saa = SampleAverage(problem, samples, fev)
    qn = bfgs.QuasiNewtonState(problem.n, config.skip_threshold, config.m_lower)
    it = Iterate(x0, N0, config.theta0, qn, 0, fev, 0.0)
    floor = theta_floor(config.theta0)
    t_start = time.perf_counter()

    def record(alpha):
        wall = (time.perf_counter() - t_start) * 1e3 if record_timing else 0.0
        trace.append(TraceRecord(run_id, it.k, fev.count, it.N, it.theta, alpha,
                                 float(metric(it.x)), wall))

    current = saa.at(it.x)
    f_N = current.value(it.N)
    trace, log = [], []
    beta_max, beta_bad = -math.inf, 0
    sum_h = h(rule, it.N)
    record(0.0)

    while fev.count < config.max_fev:
        if config.max_iter is not None and it.k >= config.max_iter:
            break
        # restoration
        N_t = restoration(rule, it.N, config.r)
        h_k, h_t = h(rule, it.N), h(rule, N_t)
        if not h_t <= config.r * h_k + 1e-12:
            raise InvariantViolation(f"restoration gave h({N_t})={h_t} > r h({it.N})")
        f_t = current.value(N_t)
        chk = beta_monitor(f_t, f_N, h_k, config.beta)
        if h_k > 0:
            beta_max = max(beta_max, chk.ratio)
        if not chk.ok:
            beta_bad += 1
            logger.debug("beta condition violated at k=%d (ratio %.3g)", it.k, chk.ratio)
            if config.strict_beta:
                raise BetaViolation(f"k={it.k}: (f~ - f)/h = {chk.ratio:.6g} > beta={config.beta}")
        # penalty
        theta_next = penalty_update(it.theta, f_t - f_N, h_k, h_t, config.r, floor)
        if not s2_holds(theta_next, f_t - f_N, h_k, h_t, config.r,
                        tol=_merit_tol(f_t, f_N, h_k)):
            raise InvariantViolation(f"merit test fails after penalty update at k={it.k}")
        # optimization phase
        ph = optimization_phase(saa, current, rule, it.N, N_t, f_N, f_t, theta_next, qn,
                                config, it.prev_dir_norm_sq, N0, strategy)
        h_next = h(rule, ph.N_next)
        _check_accepted(ph, it, N_t, N0, f_N, f_t, h_k, h_t, h_next, theta_next, config)
        # iterate and quasi-Newton update
        nxt = ph.evaluation
        if ph.p_norm_sq > 0.0:
            g_new = nxt.subgradient(ph.N_next)
            bfgs.update(qn, ph.x_next - it.x, g_new - ph.g_bar, fev)
        else:
            g_new = ph.g_bar
        sum_h += h_next
        log.append(IterationLog(it.k, it.N, N_t, ph.N_next, ph.N_trial, it.theta, theta_next,
                                ph.alpha, f_N, f_t, ph.f_next, ph.p_norm_sq, h_k, h_t, h_next,
                                ph.backtracks, fev.count, sum_h, chk.ok, it.x, ph.x_next))
        fixed_point = ph.p_norm_sq == 0.0 and ph.N_next == N_t == it.N
        it.x, it.N, it.theta = ph.x_next, ph.N_next, theta_next
        it.prev_dir_norm_sq = ph.p_norm_sq
        it.k += 1
        current, f_N = nxt, ph.f_next
        record(ph.alpha)
        if config.gtol is not None and float(np.linalg.norm(g_new)) <= config.gtol:
            break
        if fixed_point:
            # full sample and no certified direction: every further iteration
            # would repeat this one exactly
            logger.debug("stationary fixed point at k=%d", it.k)
            break

    return SolveResult(it.x, it, trace, log, beta_max, beta_bad, strategy, samples, N0)


def _check_accepted(ph, it, N_t, N0, f_N, f_t, h_k, h_t, h_next, theta_next, config):
    tol = _merit_tol(f_N, f_t, ph.f_next, h_k)
    a, p2 = ph.alpha, ph.p_norm_sq
    ok = (ph.f_next - f_t <= -config.gamma * a * p2 + tol
          and h_next <= h_t + config.gamma_bar * a * a * p2 + tol
          and (merit(ph.f_next, h_next, theta_next) - merit(f_N, h_k, theta_next)
               <= 0.5 * (1.0 - config.r) * (h_t - h_k) + tol)
          and 0.0 < theta_next <= it.theta
          and N0 <= ph.N_next <= N_t
          and a >= config.alpha_min)
    if not ok:
        raise InvariantViolation(f"accepted step violates the step conditions at k={it.k}")
