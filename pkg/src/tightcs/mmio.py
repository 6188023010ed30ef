"""Matrix Market (array, real, general) reading and writing.

Vectors are stored as single-column matrices.  Values are written with 17
significant digits so a write/read cycle is exact.
"""

import os

import numpy as np
import scipy.io

from .linalg import as_matrix, as_vector

__all__ = ["read_matrix", "write_matrix", "read_vector", "write_vector"]


def read_matrix(path):
    try:
        M = scipy.io.mmread(os.fspath(path))
    except (OSError, ValueError) as exc:
        raise ValueError(f"cannot read Matrix Market file {path}: {exc}") from exc
    if hasattr(M, "toarray"):
        M = M.toarray()
    return as_matrix(M, os.fspath(path))


def write_matrix(path, M, comment=""):
    M = as_matrix(M)
    try:
        scipy.io.mmwrite(os.fspath(path), M, comment=comment, field="real",
                         precision=17, symmetry="general")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_vector(path):
    M = read_matrix(path)
    if M.shape[1] != 1 and M.shape[0] != 1:
        raise ValueError(f"{path} holds a {M.shape} matrix, expected a single column")
    return as_vector(M.ravel())


def write_vector(path, v, comment=""):
    write_matrix(path, as_vector(v)[:, None], comment=comment)
