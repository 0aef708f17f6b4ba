"""Independent reference implementations used by the tests.

Everything here works from raw dense arrays and enumerates subdifferential
extreme points explicitly; nothing is shared with the package kernels.
"""

import itertools

import numpy as np


def hinge_terms(W, z, lam, x):
    """Per-sample hinge values from dense features."""
    t = 1.0 - z * (W @ x)
    return 0.5 * lam * (x @ x) + np.maximum(t, 0.0)


def hinge_sup_bruteforce(W, z, lam, x, p):
    """max over {0,1}^k kink selections of the averaged g^T p."""
    N = W.shape[0]
    t = 1.0 - z * (W @ x)
    base = lam * (x @ p)
    smooth = sum(-z[i] * (W[i] @ p) for i in range(N) if t[i] > 0)
    kinks = [i for i in range(N) if t[i] == 0]
    best = -np.inf
    for sel in itertools.product((0.0, 1.0), repeat=len(kinks)):
        val = smooth + sum(c * (-z[i] * (W[i] @ p)) for c, i in zip(sel, kinks))
        best = max(best, val)
    return base + best / N


def erm_terms(Ms, qs, x):
    out = []
    for M, q in zip(Ms, qs):
        v = np.minimum(x, M @ x + q)
        out.append(v @ v)
    return np.array(out)


def erm_sup_bruteforce(Ms, qs, x, p):
    """max over a/b branch choices at every tied component."""
    N = len(Ms)
    smooth = 0.0
    ties = []
    for M, q in zip(Ms, qs):
        b = M @ x + q
        for l in range(x.size):
            v = min(x[l], b[l])
            ga = 2.0 * v * p[l]
            gb = 2.0 * v * (M[l] @ p)
            if x[l] < b[l]:
                smooth += ga
            elif b[l] < x[l]:
                smooth += gb
            else:
                ties.append((ga, gb))
    best = -np.inf
    for sel in itertools.product((0, 1), repeat=len(ties)):
        best = max(best, sum(t[c] for c, t in zip(sel, ties)))
    if not ties:
        best = 0.0
    return (smooth + best) / N


def central_difference(f, x, step=1e-6):
    g = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        g[j] = (f(x + e) - f(x - e)) / (2.0 * step)
    return g


def bfgs_inverse_update(B, s, y):
    """Textbook product form (I - rho s y^T) B (I - rho y s^T) + rho s s^T."""
    rho = 1.0 / (y @ s)
    I = np.eye(B.shape[0])
    return (I - rho * np.outer(s, y)) @ B @ (I - rho * np.outer(y, s)) + rho * np.outer(s, s)
