import numpy as np
import pytest

from tightcs.mmio import read_matrix, read_vector, write_matrix, write_vector
from tightcs.rng import make_rng


def test_matrix_round_trip_is_exact(tmp_path):
    M = make_rng(0).standard_normal((4, 7))
    p = tmp_path / "M.mtx"
    write_matrix(str(p), M)
    assert np.array_equal(read_matrix(str(p)), M)
    assert "array real general" in p.read_text().splitlines()[0]


def test_vector_is_single_column(tmp_path):
    v = np.array([1.5, -2.0, 1e-300])
    p = tmp_path / "v.mtx"
    write_vector(str(p), v)
    assert read_matrix(str(p)).shape == (3, 1)
    assert np.array_equal(read_vector(str(p)), v)


def test_read_vector_rejects_matrix(tmp_path):
    p = tmp_path / "M.mtx"
    write_matrix(str(p), np.ones((2, 2)))
    with pytest.raises(ValueError):
        read_vector(str(p))
