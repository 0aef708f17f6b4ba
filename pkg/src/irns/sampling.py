"""Cumulative sample sets and sample-average evaluation with FEV accounting.

A :class:`Problem` supplies per-sample kernels over a block of realizations.
:class:`SampleAverage` turns those kernels into ``f_N``, one subgradient of
``f_N`` and the exact directional supremum over the subdifferential of
``f_N``, reusing per-point work across sample sizes.

Cost unit (FEV): one n-dimensional inner product. An n x n matrix-vector
product costs n units.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Callable

import numpy as np


class SampleExhaustedError(IndexError):
    """Requested more realizations than a bounded sample set holds."""


class FevCounter:
    """Monotone counter of n-dimensional scalar products."""

    __slots__ = ("count",)

    def __init__(self, count: int = 0):
        self.count = int(count)

    def charge(self, units) -> None:
        units = int(units)
        if units < 0:
            raise ValueError("FEV charge must be non-negative")
        self.count += units

    def __repr__(self):
        return f"FevCounter({self.count})"


def _seed_int(seed) -> int:
    if isinstance(seed, np.random.SeedSequence):
        return int(seed.generate_state(1, dtype=np.uint64)[0])
    return int(seed)


class SampleSet:
    """Unbounded, lazily extended i.i.d. sample stream.

    Realizations are drawn in fixed-size blocks from one generator, so the
    first N realizations do not depend on how far (or in what increments)
    the stream has been extended.

    Parameters
    ----------
    seed : int
        Seed of the realization stream.
    draw : callable
        ``draw(rng, count) -> dict[str, ndarray]``; every array has leading
        dimension ``count``.
    block_size : int
        Number of realizations generated per extension step.
    """

    bounded = False

    def __init__(self, seed, draw: Callable[[np.random.Generator, int], dict],
                 block_size: int = 64):
        self.seed = _seed_int(seed)
        self._draw = draw
        self._rng = np.random.default_rng(self.seed)
        self.block_size = int(block_size)
        self._store: dict[str, np.ndarray] = {}
        self.size = 0

    def ensure(self, N: int) -> None:
        if N <= self.size:
            return
        nblocks = -(-(N - self.size) // self.block_size)
        blocks = [self._draw(self._rng, self.block_size) for _ in range(nblocks)]
        add = {key: np.concatenate([b[key] for b in blocks]) for key in blocks[0]}
        if not self._store:
            self._store = add
        else:
            self._store = {k: np.concatenate([self._store[k], add[k]]) for k in self._store}
        self.size += nblocks * self.block_size

    @property
    def data(self) -> dict:
        return self._store

    def __len__(self):
        return self.size


class FiniteSampleSet:
    """Bounded sample set holding all ``n_max`` realizations up front."""

    bounded = True

    def __init__(self, data: Any, size: int, seed=0):
        self.seed = _seed_int(seed)
        self.data = data
        self.size = int(size)

    def ensure(self, N: int) -> None:
        if N > self.size:
            raise SampleExhaustedError(
                f"requested {N} realizations, only {self.size} available")

    def __len__(self):
        return self.size


class Problem(ABC):
    """Stochastic objective ``f(x) = E[F(x, xi)]`` with per-sample kernels.

    Subclasses implement the block kernels below. ``lo:hi`` always indexes
    realizations of the sample set in stream order, and every kernel charges
    its own cost to ``fev``.
    """

    #: dimension of x
    n: int
    #: full sample size for finite-sum problems, None when unbounded
    n_max: int | None = None
    #: known solution, when available
    x_star: np.ndarray | None = None

    @property
    def finite_sum(self) -> bool:
        return self.n_max is not None

    @abstractmethod
    def make_samples(self, seed) -> SampleSet | FiniteSampleSet:
        ...

    @abstractmethod
    def residuals(self, samples, lo, hi, x, fev) -> np.ndarray:
        """Per-sample intermediate shared by value, subgradient and sup."""

    @abstractmethod
    def losses(self, x, res) -> np.ndarray:
        """Per-sample losses from residuals (free)."""

    @abstractmethod
    def subgradient_sum(self, samples, lo, hi, x, res, fev) -> np.ndarray:
        """Sum over the block of the tie-broken per-sample subgradients."""

    @abstractmethod
    def kink_correction_sum(self, samples, lo, hi, x, res, p, fev) -> float:
        """Sum over the block of ``sup_{g in df_i} g^T p - g_i^T p``.

        ``g_i`` is the tie-broken selection used by :meth:`subgradient_sum`,
        so only kink-active terms contribute.
        """

    def segment_correction_sum(self, samples, lo, hi, x, res, p, alpha, fev) -> float:
        """Like :meth:`kink_correction_sum`, over the whole segment ``[x, x + alpha p]``.

        Bounds ``sup g^T p`` over subgradients at every point of the segment.
        The default ignores the segment and returns the kink correction at
        ``x``, which is exact for ``alpha = 0``.
        """
        return self.kink_correction_sum(samples, lo, hi, x, res, p, fev)

    def point_segment_directional(self, x, p, alpha, fev) -> float:
        """Growth of the point-level term's slope along the segment (default 0)."""
        return 0.0

    # point-level terms shared by every per-sample function (e.g. a
    # regularizer carried by each f_i); the defaults contribute nothing
    def point_value(self, x, fev) -> float:
        return 0.0

    def point_subgradient(self, x) -> np.ndarray:
        return np.zeros(self.n)

    def default_n0(self) -> int:
        if self.finite_sum:
            return int(np.ceil(0.1 * self.n_max))
        return 1000

    def metric(self, x) -> float:
        """Progress measure for traces; never charged to FEV."""
        if self.x_star is not None:
            return float(np.linalg.norm(x - self.x_star))
        if not self.finite_sum:
            raise ValueError("no metric available for this problem")
        samples = self.make_samples(0)
        return SampleAverage(self, samples, FevCounter()).value(self.n_max, x)


class PointEvaluation:
    """Cached evaluation of one point against a cumulative sample.

    Residuals and per-sample losses are computed once per realization, so
    moving from ``N`` to ``N' > N`` only pays for the marginal samples.
    """

    def __init__(self, saa: "SampleAverage", x):
        self.saa = saa
        self.x = np.asarray(x, dtype=float)
        self._res = None
        self._loss = None
        self._m = 0
        self._point = None
        self._subgrads: dict[int, np.ndarray] = {}

    @property
    def computed(self) -> int:
        return self._m

    def _extend(self, N: int) -> None:
        saa = self.saa
        if N < 1:
            raise ValueError("sample size must be >= 1")
        saa.samples.ensure(N)
        if self._point is None:
            self._point = saa.problem.point_value(self.x, saa.fev)
        if N <= self._m:
            return
        res = saa.problem.residuals(saa.samples, self._m, N, self.x, saa.fev)
        loss = saa.problem.losses(self.x, res)
        if self._res is None:
            self._res, self._loss = res, loss
        else:
            self._res = np.concatenate([self._res, res])
            self._loss = np.concatenate([self._loss, loss])
        self._m = N

    def value(self, N: int) -> float:
        self._extend(N)
        return float(self._point + np.sum(self._loss[:N]) / N)

    def subgradient(self, N: int) -> np.ndarray:
        if N not in self._subgrads:
            self._extend(N)
            prob = self.saa.problem
            g = prob.subgradient_sum(self.saa.samples, 0, N, self.x,
                                     self._res[:N], self.saa.fev)
            self._subgrads[N] = prob.point_subgradient(self.x) + g / N
        return self._subgrads[N].copy()

    def directional_sup(self, N: int, p) -> float:
        """``g_bar^T p`` plus the sup corrections of kink-active terms.

        Exact: away from kinks every term is differentiable and contributes
        its selected subgradient. Costs one inner product plus whatever the
        kink terms need.
        """
        p = np.asarray(p, dtype=float)
        if not np.any(p):
            return 0.0
        g = self.subgradient(N)
        self.saa.fev.charge(1)
        prob = self.saa.problem
        c = prob.kink_correction_sum(self.saa.samples, 0, N, self.x,
                                     self._res[:N], p, self.saa.fev)
        return float(g @ p + c / N)


    def segment_sup(self, N: int, p, alpha) -> float:
        """Upper bound on ``g^T p`` for ``g`` in the subdifferential of ``f_N``
        anywhere on ``[x, x + alpha p]``; equals :meth:`directional_sup` at
        ``alpha = 0``.

        If it is at most ``-c``, the mean value theorem gives
        ``f_N(x + alpha p) - f_N(x) <= -alpha c``.
        """
        p = np.asarray(p, dtype=float)
        if not np.any(p):
            return 0.0
        if alpha <= 0.0:
            return self.directional_sup(N, p)
        g = self.subgradient(N)
        self.saa.fev.charge(1)
        prob = self.saa.problem
        c = prob.segment_correction_sum(self.saa.samples, 0, N, self.x,
                                        self._res[:N], p, alpha, self.saa.fev)
        return float(g @ p + prob.point_segment_directional(self.x, p, alpha, self.saa.fev)
                     + c / N)


class SampleAverage:
    """Sample average approximation ``f_N`` over a cumulative sample set."""

    def __init__(self, problem: Problem, samples, fev: FevCounter | None = None):
        self.problem = problem
        self.samples = samples
        self.fev = fev if fev is not None else FevCounter()

    def at(self, x) -> PointEvaluation:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.problem.n,):
            raise ValueError(f"x must have shape ({self.problem.n},), got {x.shape}")
        return PointEvaluation(self, x)

    def value(self, N, x) -> float:
        return self.at(x).value(N)

    def subgradient(self, N, x) -> np.ndarray:
        return self.at(x).subgradient(N)

    def directional_sup(self, N, x, p) -> float:
        return self.at(x).directional_sup(N, p)


def saa_value(problem, sample_set, N, x, fev=None) -> float:
    """``(1/N) sum_{i<=N} f_i(x)``."""
    return SampleAverage(problem, sample_set, fev).value(N, x)


def saa_subgradient(problem, sample_set, N, x, fev=None) -> np.ndarray:
    """One element of the subdifferential of ``f_N`` at ``x``."""
    return SampleAverage(problem, sample_set, fev).subgradient(N, x)


def directional_sup(problem, sample_set, N, x, p, fev=None) -> float:
    """``sup_{g in df_N(x)} g^T p``, exact."""
    return SampleAverage(problem, sample_set, fev).directional_sup(N, x, p)
