"""Exact linear algebra over a :class:`~linsdmm.galois.Field`.

Everything reduces to the field's ``rref``, which is the compiled kernel for
prime fields when available.
"""
import numpy as np

from .errors import DivisionByZero, ShapeError


def rref(field, m):
    m = np.asarray(m, dtype=np.int64)
    if m.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {m.shape}")
    if m.size == 0:
        return m.copy(), []
    return field.rref(m)


def rank(field, m):
    return len(rref(field, m)[1])


def row_basis(field, m):
    """Nonzero rows of the reduced row echelon form."""
    r, piv = rref(field, m)
    return r[: len(piv)]


def inverse(field, m):
    m = np.asarray(m, dtype=np.int64)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ShapeError(f"cannot invert a {m.shape} matrix")
    r, piv = rref(field, np.hstack([m, field.eye(n)]))
    if piv[:n] != list(range(n)):
        raise DivisionByZero("matrix is singular")
    return r[:, n:]


def solve_left(field, m, rhs):
    """Return one ``x`` with ``x @ m == rhs`` (rows of ``rhs`` solved jointly), or None.

    ``m`` is ``k x N``; ``rhs`` is ``r x N``; the answer is ``r x k``.
    Free variables are set to zero, so the answer is deterministic.
    """
    m = np.asarray(m, dtype=np.int64)
    rhs = np.atleast_2d(np.asarray(rhs, dtype=np.int64))
    sol = solve_right(field, m.T, rhs.T)
    return None if sol is None else sol.T


def solve_right(field, m, rhs):
    """Return one ``x`` with ``m @ x == rhs`` or None when inconsistent."""
    m = np.asarray(m, dtype=np.int64)
    rhs = np.asarray(rhs, dtype=np.int64)
    vector = rhs.ndim == 1
    if vector:
        rhs = rhs[:, None]
    rows, cols = m.shape
    if rhs.shape[0] != rows:
        raise ShapeError(f"rhs has {rhs.shape[0]} rows, matrix has {rows}")
    r, piv = rref(field, np.hstack([m, rhs]))
    if piv and piv[-1] >= cols:
        return None
    x = field.zeros((cols, rhs.shape[1]))
    for i, c in enumerate(piv):
        x[c] = r[i, cols:]
    return x[:, 0] if vector else x


def nullspace(field, m):
    """Basis (as rows) of the right kernel ``{x : m @ x == 0}``."""
    m = np.asarray(m, dtype=np.int64)
    cols = m.shape[1]
    r, piv = rref(field, m)
    free = [c for c in range(cols) if c not in set(piv)]
    basis = field.zeros((len(free), cols))
    for j, f in enumerate(free):
        basis[j, f] = 1
        for i, c in enumerate(piv):
            basis[j, c] = field.neg(r[i, f])
    return basis


def in_row_space(field, basis, vectors):
    """Boolean per row of ``vectors``: does it lie in the row span of ``basis``?"""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.int64))
    basis = np.asarray(basis, dtype=np.int64).reshape(-1, vectors.shape[1])
    base = rank(field, basis)
    return np.array([rank(field, np.vstack([basis, v[None, :]])) == base for v in vectors], dtype=bool)


def same_row_space(field, a, b):
    ra, rb = rank(field, a), rank(field, b)
    if ra != rb:
        return False
    if ra == 0:
        return True
    return rank(field, np.vstack([a, b])) == ra
