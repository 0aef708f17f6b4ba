import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from irns import HingeDataset, parse_sparse_dataset, write_sparse_dataset
from irns.problems import ParseError, parse_sparse_lines


def test_single_line_example():
    ds = parse_sparse_lines(["+1 1:0.5 3:2.0"])
    assert ds.n_max == 1 and ds.n_features == 3
    np.testing.assert_array_equal(ds.labels, [1])
    np.testing.assert_array_equal(ds.features.toarray(), [[0.5, 0.0, 2.0]])


def test_label_only_line_is_zero_vector():
    ds = parse_sparse_lines(["-1"], n_features=4)
    np.testing.assert_array_equal(ds.labels, [-1])
    assert ds.features.nnz == 0 and ds.features.shape == (1, 4)


def test_non_binary_label_without_map():
    with pytest.raises(ParseError, match="non-binary"):
        parse_sparse_lines(["2 1:1.0"])


def test_parse_error_reports_line_number():
    with pytest.raises(ParseError) as exc:
        parse_sparse_lines(["+1 1:1", "# comment", "-1 2:x"])
    assert exc.value.lineno == 3
    assert "line 3" in str(exc.value)


@pytest.mark.parametrize("line", ["+1 0:1.0", "+1 1", "+1 1:1 1:2", "abc 1:1"])
def test_malformed_lines(line):
    with pytest.raises(ParseError):
        parse_sparse_lines([line])


def test_label_map_for_zero_one_labels():
    ds = parse_sparse_lines(["0 1:1", "1 2:1"], label_map={0: -1, 1: 1})
    np.testing.assert_array_equal(ds.labels, [-1, 1])
    with pytest.raises(ParseError):
        parse_sparse_lines(["3 1:1"], label_map={0: -1, 1: 1})
    with pytest.raises(ValueError):
        parse_sparse_lines(["0 1:1"], label_map={0: 0, 1: 1})


def test_dimension_override_and_overflow():
    assert parse_sparse_lines(["+1 2:1"], n_features=10).n_features == 10
    with pytest.raises(ValueError):
        parse_sparse_lines(["+1 12:1"], n_features=10)


def test_comments_and_blank_lines_skipped():
    ds = parse_sparse_lines(["# header", "", "+1 1:1  # trailing", "   ", "-1 2:3"])
    assert ds.n_max == 2


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        parse_sparse_lines(["# nothing"])


def test_lambda_stored():
    assert parse_sparse_lines(["+1 1:1"], lam=0.25).lam == 0.25


def test_file_round_trip(tmp_path):
    path = tmp_path / "d.txt"
    path.write_text("+1 1:0.5 3:2.0\n-1\n-1 2:-1e-3\n")
    ds = parse_sparse_dataset(path)
    out = tmp_path / "e.txt"
    write_sparse_dataset(ds, out)
    assert out.read_text() == "+1 1:0.5 3:2.0\n-1\n-1 2:-0.001\n"


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_write_then_parse_is_exact(tmp_path_factory, rows, cols, seed):
    rng = np.random.default_rng(seed)
    W = rng.standard_normal((rows, cols)) * (rng.random((rows, cols)) < 0.5)
    W[rng.random((rows, cols)) < 0.2] = rng.uniform(-1e300, 1e300)
    z = rng.choice([-1, 1], rows)
    path = tmp_path_factory.mktemp("rt") / "d.txt"
    write_sparse_dataset(HingeDataset(sp.csr_matrix(W), z), path)
    ds = parse_sparse_dataset(path, n_features=cols)
    np.testing.assert_array_equal(ds.labels, z)
    A, B = sp.csr_matrix(W), ds.features
    A.sort_indices()
    np.testing.assert_array_equal(A.indptr, B.indptr)
    np.testing.assert_array_equal(A.indices, B.indices)
    np.testing.assert_array_equal(A.data, B.data)
