"""L2-regularized binary hinge loss as a finite-sum problem."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..sampling import FiniteSampleSet, Problem


@dataclass
class HingeDataset:
    """Features ``w_i`` (rows), labels ``z_i`` in {-1, +1}, regularization ``lam``."""

    features: sp.csr_matrix | np.ndarray
    labels: np.ndarray
    lam: float = 1e-5

    def __post_init__(self):
        if sp.issparse(self.features):
            self.features = sp.csr_matrix(self.features, dtype=float)
        else:
            self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.labels = np.asarray(self.labels).astype(int).ravel()
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features and labels have different lengths")
        if self.labels.size < 1:
            raise ValueError("dataset is empty")
        if not np.all(np.abs(self.labels) == 1):
            raise ValueError("labels must be -1 or +1")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")

    @property
    def n_max(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def _signed_rows(dataset: HingeDataset):
    z = dataset.labels.astype(float)
    if sp.issparse(dataset.features):
        return sp.csr_matrix(sp.diags(z) @ dataset.features)
    return z[:, None] * dataset.features


class HingeProblem(Problem):
    """``f_i(x) = lam/2 ||x||^2 + max(0, 1 - z_i x^T w_i)``.

    Each f_i carries the full regularizer, so ``f_N`` averages to the
    regularized loss for every N. At a zero hinge argument the subgradient
    selection takes the inactive branch (coefficient 0).

    Parameters
    ----------
    dataset : HingeDataset
    shuffle : bool
        If True (default), each sample set is a seeded permutation of the
        data; otherwise samples follow file order.
    """

    def __init__(self, dataset: HingeDataset, shuffle=True):
        self.dataset = dataset
        self.n = dataset.n_features
        self.n_max = dataset.n_max
        self.lam = float(dataset.lam)
        self.shuffle = shuffle
        self._rows = _signed_rows(dataset)
        # dataset constant, used only to screen terms near a kink
        sq = self._rows.multiply(self._rows).sum(axis=1) if sp.issparse(self._rows) \
            else np.sum(self._rows * self._rows, axis=1)
        self._row_norms = np.sqrt(np.asarray(sq, dtype=float).ravel())

    def make_samples(self, seed) -> FiniteSampleSet:
        s = FiniteSampleSet(None, self.n_max, seed)
        if self.shuffle:
            perm = np.random.default_rng(s.seed).permutation(self.n_max)
            s.data = self._rows[perm]
            s.row_norms = self._row_norms[perm]
        else:
            s.data = self._rows
            s.row_norms = self._row_norms
        return s

    def residuals(self, samples, lo, hi, x, fev):
        fev.charge(hi - lo)
        return 1.0 - np.asarray(samples.data[lo:hi] @ x).ravel()

    def losses(self, x, res):
        return np.maximum(res, 0.0)

    def point_value(self, x, fev):
        fev.charge(1)
        return 0.5 * self.lam * float(x @ x)

    def point_subgradient(self, x):
        return self.lam * x

    def subgradient_sum(self, samples, lo, hi, x, res, fev):
        coef = (res > 0).astype(float)
        return -np.asarray(samples.data[lo:hi].T @ coef).ravel()

    def kink_correction_sum(self, samples, lo, hi, x, res, p, fev):
        kinks = np.flatnonzero(res == 0.0)
        if kinks.size == 0:
            return 0.0
        fev.charge(kinks.size)
        # selection coefficient is 0 at a kink; the sup picks max(0, -z w^T p)
        d = -np.asarray(samples.data[lo:hi][kinks] @ p).ravel()
        return float(np.sum(np.maximum(d, 0.0)))

    def segment_correction_sum(self, samples, lo, hi, x, res, p, alpha, fev):
        # |w_i^T p| <= ||w_i|| ||p||, so only these terms can switch on the segment
        p_norm = float(np.sqrt(p @ p))
        near = np.flatnonzero(np.abs(res) <= alpha * samples.row_norms[lo:hi] * p_norm)
        if near.size == 0:
            return 0.0
        fev.charge(near.size)
        t = res[near]
        d = -np.asarray(samples.data[lo:hi][near] @ p).ravel()
        t_end = t + alpha * d
        active = np.maximum(t, t_end) >= 0.0
        inactive = np.minimum(t, t_end) <= 0.0
        sup = np.maximum(np.where(active, d, -np.inf), np.where(inactive, 0.0, -np.inf))
        chosen = np.where(t > 0.0, d, 0.0)
        return float(np.sum(sup - chosen))

    def point_segment_directional(self, x, p, alpha, fev):
        fev.charge(1)
        return self.lam * alpha * float(p @ p)

    def objective(self, x) -> float:
        """Full-sample objective, uncharged."""
        x = np.asarray(x, dtype=float)
        t = 1.0 - np.asarray(self._rows @ x).ravel()
        return 0.5 * self.lam * float(x @ x) + float(np.sum(np.maximum(t, 0.0))) / self.n_max

    def metric(self, x) -> float:
        return self.objective(x)


def hinge_value(dataset: HingeDataset, i, x) -> float:
    """Per-sample term ``lam/2 ||x||^2 + max(0, 1 - z_i x^T w_i)`` (0-based i)."""
    x = np.asarray(x, dtype=float)
    w = dataset.features[i]
    w = w.toarray().ravel() if sp.issparse(w) else np.asarray(w).ravel()
    return 0.5 * dataset.lam * float(x @ x) + max(0.0, 1.0 - dataset.labels[i] * float(w @ x))


def hinge_directional_sup_terms(dataset: HingeDataset, i, x, p) -> float:
    """Per-sample ``sup g^T p`` over the subdifferential of f_i (0-based i)."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    w = dataset.features[i]
    w = w.toarray().ravel() if sp.issparse(w) else np.asarray(w).ravel()
    z = dataset.labels[i]
    t = 1.0 - z * float(w @ x)
    d = -z * float(w @ p)
    if t > 0:
        term = d
    elif t < 0:
        term = 0.0
    else:
        term = max(0.0, d)
    return dataset.lam * float(x @ p) + term


def make_separable_hinge(n_samples, n_features, seed=0, lam=1e-5, margin=0.0):
    """Linearly separable Gaussian data labelled by a random hyperplane.

    Points with ``|w^T x_true| / ||x_true|| < margin`` are redrawn.
    """
    rng = np.random.default_rng(seed)
    x_true = rng.standard_normal(n_features)
    x_true /= np.linalg.norm(x_true)
    rows = []
    need = n_samples
    while need > 0:
        W = rng.standard_normal((max(need, 16), n_features))
        keep = np.abs(W @ x_true) >= margin
        W = W[keep][:need]
        rows.append(W)
        need -= W.shape[0]
    W = np.vstack(rows)
    z = np.where(W @ x_true >= 0, 1, -1)
    return HingeDataset(W, z, lam)
