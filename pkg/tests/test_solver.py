import math

import numpy as np
import pytest

from irns import (BetaViolation, HingeProblem, InfeasibilityRule, SlcpProblem, SolverConfig,
                  generate_slcp, h, make_separable_hinge, restoration, solve,
                  trial_sample_size)
from irns.solver import beta_monitor, candidate_sizes, ceil_int

from toys import AbsProblem

FS = InfeasibilityRule(1000)
UNB = InfeasibilityRule()


def test_restoration_finite_sum_example():
    assert restoration(FS, 100, 0.95) == 145


def test_restoration_fixed_point_at_full_sample():
    assert restoration(FS, 1000, 0.95) == 1000


def test_restoration_unbounded_example():
    assert restoration(UNB, 1000, 0.95) == 1053


@pytest.mark.parametrize("rule,N", [(FS, 1), (FS, 100), (FS, 999), (UNB, 1), (UNB, 37)])
def test_restoration_reduces_infeasibility(rule, N):
    Nt = restoration(rule, N, 0.95)
    assert Nt >= N
    assert h(rule, Nt) <= 0.95 * h(rule, N) + 1e-15


def test_ceil_snaps_rounding_noise():
    assert ceil_int(145.00000000000003) == 145
    assert ceil_int(145.001) == 146
    assert ceil_int(-0.5) == 0


def test_beta_monitor_examples():
    assert beta_monitor(0.3, 0.3, 0.5, 1e-9).ok
    assert beta_monitor(1.4, 1.0, 0.5, 1.0).ok
    chk = beta_monitor(2.0, 1.0, 0.5, 1.0)
    assert not chk.ok and chk.ratio == 2.0


def test_trial_size_first_iteration_example():
    # 100 + 0.025 * 45 / 0.1 - 9000 * 0 = 111.25
    N = trial_sample_size(FS, 100, 145, 0.9, 1.0, 0.0, 0.7, 0.7, 10, 0.95, 1e-4)
    assert N == 112


def test_trial_size_clamped_below_by_n0():
    # a large objective increase drives the raw value far below N0
    N = trial_sample_size(FS, 100, 145, 0.9, 1.0, 0.0, 0.0, 5.0, 60, 0.95, 1e-4)
    assert N == 60


def test_trial_size_clamped_above_by_restored_size():
    N = trial_sample_size(FS, 100, 145, 0.9, 1.0, 0.0, 5.0, 0.0, 10, 0.95, 1e-4)
    assert N == 145


def test_trial_size_erm_nonpositive_denominator():
    N = trial_sample_size(UNB, 1000, 1053, 0.5, 1.0, 0.0, 10.0, 0.0, 1000, 0.95, 1e-4)
    assert N == 1053


def test_trial_size_erm_formula():
    th, N_k, N_t, r = 0.5, 1000, 1053, 0.95
    denom = 0.5 * (1 - r) * (N_k - N_t) / (N_t * N_k) + (1 - th) / N_k + th * (1e-4 * 0.5 * 2.0)
    raw = (1 - th) / denom
    got = trial_sample_size(UNB, N_k, N_t, th, 0.5, 2.0, 0.0, 0.0, 10, r, 1e-4)
    assert got == min(max(math.ceil(raw), 10), N_t)


def test_candidates_ascending_and_unique():
    assert candidate_sizes(112, 145) == [112, 129, 145]
    assert candidate_sizes(145, 145) == [145]


def test_abs_example_accepts_unit_step():
    # f(x) = |x|, x = 1, p = -1: f(0) - f(1) = -1 <= -1e-4
    res = solve(AbsProblem(), SolverConfig(max_fev=1000), x0=np.array([1.0]))
    first = res.log[0]
    assert first.alpha == 1.0
    np.testing.assert_array_equal(first.x_next, [0.0])
    # the kink is stationary: no certified direction, zero step, run stops
    assert res.trace[-1].metric == 0.0


def test_budget_smaller_than_one_iteration():
    pb = HingeProblem(make_separable_hinge(100, 5, seed=0))
    res = solve(pb, SolverConfig(max_fev=5))
    assert len(res.trace) == 1
    assert res.trace[0].k == 0 and res.trace[0].alpha_k == 0.0


def test_deterministic_rerun():
    pb = SlcpProblem(generate_slcp(5, 1.0, seed=0))
    cfg = SolverConfig(max_fev=3000, n0=10, seed=4)
    a, b = solve(pb, cfg), solve(pb, cfg)
    assert a.trace == b.trace
    np.testing.assert_array_equal(a.x, b.x)


def test_full_sample_reached_and_kept():
    pb = HingeProblem(make_separable_hinge(200, 10, seed=1))
    res = solve(pb, SolverConfig(max_fev=10**5, seed=0))
    Ns = [r.N_k for r in res.trace]
    first = Ns.index(200)
    assert all(N == 200 for N in Ns[first:])
    assert len({L.sum_h for L in res.log[first:]}) == 1


def test_run_invariants():
    pb = HingeProblem(make_separable_hinge(300, 6, seed=2))
    res = solve(pb, SolverConfig(max_fev=30000, seed=1))
    thetas = [r.theta_k for r in res.trace]
    assert all(a >= b > 0 for a, b in zip(thetas, thetas[1:]))
    for L in res.log:
        assert res.N0 <= L.N_next <= L.N_tilde
        assert L.h_tilde <= 0.95 * L.h_Nk + 1e-15
    fevs = [r.fev for r in res.trace]
    assert fevs == sorted(fevs)
    assert [r.k for r in res.trace] == list(range(len(res.trace)))


def test_budget_checked_between_iterations():
    pb = HingeProblem(make_separable_hinge(300, 6, seed=2))
    res = solve(pb, SolverConfig(max_fev=10000, seed=1))
    assert res.trace[-2].fev < 10000
    assert res.fev == res.trace[-1].fev


def test_heuristic_sizes_follow_restoration():
    pb = HingeProblem(make_separable_hinge(500, 5, seed=0))
    res = solve(pb, SolverConfig(max_fev=20000, seed=0), "heuristic")
    N = res.N0
    assert N == 50
    for rec in res.trace[1:]:
        N = restoration(InfeasibilityRule(500), N, 0.95)
        assert rec.N_k == N


def test_full_strategy_is_monotone_on_full_sample():
    pb = HingeProblem(make_separable_hinge(300, 5, seed=0))
    res = solve(pb, SolverConfig(max_fev=20000, seed=0), "full")
    assert {r.N_k for r in res.trace} == {300}
    vals = [r.metric for r in res.trace]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_full_strategy_needs_finite_sum():
    with pytest.raises(ValueError):
        solve(SlcpProblem(generate_slcp(3, 1.0)), SolverConfig(max_fev=100), "full")


def test_unknown_strategy():
    with pytest.raises(ValueError):
        solve(AbsProblem(), SolverConfig(), "bogus")


def test_strict_beta_aborts():
    pb = SlcpProblem(generate_slcp(4, 5.0, seed=0))
    with pytest.raises(BetaViolation):
        solve(pb, SolverConfig(max_fev=10**4, n0=5, beta=1e-9, strict_beta=True))


def test_beta_monitored_by_default():
    pb = SlcpProblem(generate_slcp(4, 5.0, seed=0))
    res = solve(pb, SolverConfig(max_fev=10**4, n0=5, beta=1e-9))
    assert res.beta_violations > 0
    assert res.beta_max_ratio > 1e-9


def test_n0_larger_than_dataset_rejected():
    pb = HingeProblem(make_separable_hinge(20, 3))
    with pytest.raises(ValueError):
        solve(pb, SolverConfig(n0=21))


def test_x0_shape_checked():
    with pytest.raises(ValueError):
        solve(AbsProblem(), SolverConfig(), x0=np.zeros(2))


@pytest.mark.parametrize("kw", [dict(r=1.0), dict(r=0.0), dict(theta0=1.0), dict(gamma=0),
                                dict(gamma_bar=-1), dict(beta=0), dict(n0=0), dict(max_fev=0),
                                dict(alpha_min=0.0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SolverConfig(**kw)


def test_default_initial_sizes():
    assert HingeProblem(make_separable_hinge(2000, 3)).default_n0() == 200
    assert SlcpProblem(generate_slcp(3)).default_n0() == 1000


def test_x0_uniform_in_unit_cube():
    pb = SlcpProblem(generate_slcp(50, 1.0))
    res = solve(pb, SolverConfig(max_fev=1, n0=1, seed=3))
    x0 = res.iterate.x
    assert np.all((0 <= x0) & (x0 <= 1))
