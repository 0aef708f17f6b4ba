"""scikit-learn style linear classifier trained by IR-NS on the hinge loss."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .problems import HingeDataset, HingeProblem
from .solver import STRATEGIES, SolverConfig, solve


class IRBFGSClassifier(ClassifierMixin, BaseEstimator):
    """L2-regularized hinge-loss classifier with adaptive sample sizes.

    Minimizes ``lam/2 ||x||^2 + mean_i max(0, 1 - z_i x^T w_i)`` without an
    intercept, growing the subsample used for each step by inexact
    restoration.

    Parameters
    ----------
    lam : float, default=1e-5
        Regularization constant.
    sample_size_rule : {"ir", "heuristic", "full"}, default="ir"
        ``"ir"`` is IRBFGS, ``"heuristic"`` HBFGS and ``"full"`` FBFGS.
    max_fev : int, default=10**6
        Budget in scalar products.
    n0 : int, optional
        Initial sample size; ``ceil(0.1 * n_samples)`` if omitted.
    theta0, r, gamma, gamma_bar, beta : float
        Solver constants, see :class:`irns.SolverConfig`.
    strict_beta : bool, default=False
        Abort when the sample-difference bound on ``beta`` fails.
    random_state : int, default=0
        Seeds the starting point and the sample order.

    Attributes
    ----------
    coef_ : ndarray of shape (n_features,)
    classes_ : ndarray of shape (2,)
        ``classes_[0]`` maps to -1 and ``classes_[1]`` to +1.
    trace_ : list of TraceRecord
    n_fev_ : int
    """

    def __init__(self, lam=1e-5, sample_size_rule="ir", max_fev=10**6, n0=None, theta0=0.9,
                 r=0.95, gamma=1e-4, gamma_bar=1.0, beta=1e6, strict_beta=False,
                 random_state=0):
        self.lam = lam
        self.sample_size_rule = sample_size_rule
        self.max_fev = max_fev
        self.n0 = n0
        self.theta0 = theta0
        self.r = r
        self.gamma = gamma
        self.gamma_bar = gamma_bar
        self.beta = beta
        self.strict_beta = strict_beta
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, accept_sparse="csr", dtype=float)
        self.classes_ = unique_labels(y)
        if self.classes_.size != 2:
            raise ValueError(f"binary labels required, got {self.classes_.size} classes")
        if self.sample_size_rule not in STRATEGIES:
            raise ValueError(f"sample_size_rule must be one of {STRATEGIES}")
        z = np.where(y == self.classes_[1], 1, -1)
        problem = HingeProblem(HingeDataset(X, z, self.lam))
        config = SolverConfig(theta0=self.theta0, r=self.r, gamma=self.gamma,
                              gamma_bar=self.gamma_bar, beta=self.beta, n0=self.n0,
                              max_fev=self.max_fev, seed=int(self.random_state or 0),
                              strict_beta=self.strict_beta)
        result = solve(problem, config, self.sample_size_rule)
        self.coef_ = result.x
        self.trace_ = result.trace
        self.n_fev_ = result.fev
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, accept_sparse="csr", dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return np.asarray(X @ self.coef_).ravel()

    def predict(self, X):
        scores = self.decision_function(X)
        return self.classes_[(scores > 0).astype(int)]
