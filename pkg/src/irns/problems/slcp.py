"""Stochastic linear complementarity problems in ERM form.

Each sample contributes ``f_j(x) = sum_l min(x_l, [M_j x + q_j]_l)^2`` with
``M_j = M_bar + (sigma/sqrt(n)) Delta_j`` and ``q_j = q_bar + sigma delta_j``;
``Delta_j`` and ``delta_j`` have i.i.d. entries uniform on [-sqrt(3), sqrt(3)]
(zero mean, unit variance).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sampling import FiniteSampleSet, Problem, SampleSet

_HALF_WIDTH = np.sqrt(3.0)


@dataclass(frozen=True)
class SlcpInstance:
    n: int
    M_bar: np.ndarray
    q_bar: np.ndarray
    sigma: float
    x_star: np.ndarray
    s_bar: np.ndarray

    @property
    def scale(self) -> float:
        return self.sigma / np.sqrt(self.n)


def generate_slcp(n, sigma=10.0, seed=0) -> SlcpInstance:
    """Random SLCP whose expected-value LCP is solved exactly by ``x_star``.

    ``M_bar = C^T C / n + I`` with ``C`` uniform on [-1, 1]; ``x_star`` is
    positive on its first ``ceil(n/2)`` entries and ``s_bar`` on the rest,
    and ``q_bar = s_bar - M_bar x_star``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    rng = np.random.default_rng(seed)
    C = rng.uniform(-1.0, 1.0, size=(n, n))
    M_bar = C.T @ C / n + np.eye(n)
    k = -(-n // 2)
    x_star = np.zeros(n)
    x_star[:k] = 1.0 - rng.random(k)
    s_bar = np.zeros(n)
    s_bar[k:] = 1.0 - rng.random(n - k)
    q_bar = s_bar - M_bar @ x_star
    return SlcpInstance(n, M_bar, q_bar, float(sigma), x_star, s_bar)


def _draw(n):
    def draw(rng, count):
        Delta = rng.uniform(-_HALF_WIDTH, _HALF_WIDTH, size=(count, n, n))
        delta = rng.uniform(-_HALF_WIDTH, _HALF_WIDTH, size=(count, n))
        return {"Delta": Delta, "delta": delta}
    return draw


class SlcpProblem(Problem):
    """ERM reformulation of an SLCP with the min NCP function (unbounded sample).

    At ``x_l == [M_j x + q_j]_l`` the subgradient selection takes the
    ``x_l`` branch.
    """

    def __init__(self, instance: SlcpInstance, block_size=64):
        self.instance = instance
        self.n = instance.n
        self.n_max = None
        self.x_star = instance.x_star
        self.block_size = block_size

    def make_samples(self, seed) -> SampleSet:
        return SampleSet(seed, _draw(self.n), self.block_size)

    def samples_from(self, Delta, delta) -> FiniteSampleSet:
        """Bounded sample set with explicit perturbations (for testing)."""
        Delta = np.asarray(Delta, dtype=float).reshape(-1, self.n, self.n)
        delta = np.asarray(delta, dtype=float).reshape(-1, self.n)
        return FiniteSampleSet({"Delta": Delta, "delta": delta}, Delta.shape[0])

    def sample_matrices(self, samples, lo, hi):
        """Explicit ``(M_j, q_j)`` for samples ``lo:hi``."""
        inst = self.instance
        M = inst.M_bar + inst.scale * samples.data["Delta"][lo:hi]
        q = inst.q_bar + inst.sigma * samples.data["delta"][lo:hi]
        return M, q

    def _apply(self, samples, lo, hi, v):
        inst = self.instance
        D = samples.data["Delta"][lo:hi]
        return inst.M_bar @ v + inst.scale * (D @ v)

    def residuals(self, samples, lo, hi, x, fev):
        fev.charge((hi - lo) * self.n)
        inst = self.instance
        b = self._apply(samples, lo, hi, x) + inst.q_bar
        return b + inst.sigma * samples.data["delta"][lo:hi]

    def losses(self, x, res):
        v = np.minimum(x, res)
        return np.sum(v * v, axis=1)

    def subgradient_sum(self, samples, lo, hi, x, res, fev):
        # shares the residual matvec with the value (charged there)
        inst = self.instance
        v = np.minimum(x, res)
        on_b = res < x
        ua = np.where(on_b, 0.0, v)
        ub = np.where(on_b, v, 0.0)
        D = samples.data["Delta"][lo:hi]
        tb = inst.M_bar.T @ ub.sum(axis=0) + inst.scale * np.einsum("jab,ja->b", D, ub)
        return 2.0 * (ua.sum(axis=0) + tb)

    def kink_correction_sum(self, samples, lo, hi, x, res, p, fev):
        j, l = np.nonzero(res == x)
        if j.size == 0:
            return 0.0
        # one row-times-p product per tied component
        fev.charge(j.size)
        inst = self.instance
        D = samples.data["Delta"][lo:hi]
        row_p = inst.M_bar[l] @ p + inst.scale * np.einsum("ka,ka->k", D[j, l], p[None, :])
        v = x[l]
        da = 2.0 * v * p[l]
        db = 2.0 * v * row_p
        return float(np.sum(np.maximum(da, db) - da))


def erm_value(instance: SlcpInstance, M, q, x) -> float:
    """``sum_l min(x_l, [M x + q]_l)^2`` for one realization ``(M, q)``."""
    x = np.asarray(x, dtype=float)
    v = np.minimum(x, np.asarray(M) @ x + np.asarray(q))
    return float(v @ v)


def erm_directional_sup_terms(instance: SlcpInstance, M, q, x, p) -> float:
    """``sup g^T p`` over the subdifferential of one realization's residual."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    M = np.asarray(M)
    b = M @ x + np.asarray(q)
    v = np.minimum(x, b)
    total = 0.0
    for l in range(x.size):
        ta = 2.0 * v[l] * p[l]
        tb = 2.0 * v[l] * float(M[l] @ p)
        if x[l] < b[l]:
            total += ta
        elif b[l] < x[l]:
            total += tb
        else:
            total += max(ta, tb)
    return total
