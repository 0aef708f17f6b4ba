"""Reader and writer for the sparse ``label index:value ...`` text format."""

from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

from .hinge import HingeDataset


class ParseError(ValueError):
    def __init__(self, lineno, msg):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _label(token, lineno, label_map):
    try:
        raw = float(token)
    except ValueError:
        raise ParseError(lineno, f"bad label {token!r}") from None
    if label_map is not None:
        for key, val in label_map.items():
            if float(key) == raw:
                return int(val)
        raise ParseError(lineno, f"label {token!r} not in label map")
    if raw in (1.0, -1.0):
        return int(raw)
    raise ParseError(lineno, f"non-binary label {token!r}; pass a label_map")


def parse_sparse_lines(lines, n_features=None, label_map=None, lam=1e-5) -> HingeDataset:
    """Parse an iterable of text lines; see :func:`parse_sparse_dataset`."""
    if label_map is not None:
        bad = [v for v in label_map.values() if int(v) not in (-1, 1)]
        if bad:
            raise ValueError(f"label_map must map onto -1/+1, got {bad}")
    labels, indptr, indices, values = [], [0], [], []
    max_index = 0
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        labels.append(_label(tokens[0], lineno, label_map))
        seen = set()
        for tok in tokens[1:]:
            idx, sep, val = tok.partition(":")
            if not sep:
                raise ParseError(lineno, f"expected index:value, got {tok!r}")
            try:
                j = int(idx)
                v = float(val)
            except ValueError:
                raise ParseError(lineno, f"bad feature {tok!r}") from None
            if j < 1:
                raise ParseError(lineno, f"feature index {j} < 1")
            if j in seen:
                raise ParseError(lineno, f"duplicate feature index {j}")
            seen.add(j)
            indices.append(j - 1)
            values.append(v)
            max_index = max(max_index, j)
        indptr.append(len(indices))
    if not labels:
        raise ValueError("no samples found")
    if n_features is None:
        n_features = max_index
    elif max_index > n_features:
        raise ValueError(f"feature index {max_index} exceeds n_features={n_features}")
    X = sp.csr_matrix((np.asarray(values, dtype=float), np.asarray(indices, dtype=np.int64),
                       np.asarray(indptr, dtype=np.int64)),
                      shape=(len(labels), max(n_features, 1)))
    X.sort_indices()
    return HingeDataset(X, np.asarray(labels, dtype=int), lam)


def parse_sparse_dataset(path, n_features=None, label_map=None, lam=1e-5) -> HingeDataset:
    """Load a binary classification dataset in sparse text format.

    Parameters
    ----------
    path : str or PathLike
        File with one sample per line: ``label idx:val idx:val ...`` with
        1-based feature indices.
    n_features : int, optional
        Dimension; defaults to the largest index seen.
    label_map : dict, optional
        Maps raw labels onto -1/+1, e.g. ``{0: -1, 1: 1}``. Without it,
        labels must already be -1 or +1.
    lam : float
        Regularization stored on the dataset.
    """
    with open(os.fspath(path), "r") as fh:
        return parse_sparse_lines(fh, n_features, label_map, lam)


def write_sparse_dataset(dataset: HingeDataset, path) -> None:
    X = sp.csr_matrix(dataset.features)
    X.sort_indices()
    with open(os.fspath(path), "w") as fh:
        for i in range(X.shape[0]):
            lo, hi = X.indptr[i], X.indptr[i + 1]
            feats = " ".join(f"{j + 1}:{float(v)!r}" for j, v in zip(X.indices[lo:hi], X.data[lo:hi]))
            label = "+1" if dataset.labels[i] > 0 else "-1"
            fh.write(f"{label} {feats}".rstrip() + "\n")
