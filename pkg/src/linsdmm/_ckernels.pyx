# cython: language_level=3, boundscheck=False, wraparound=True, cdivision=True
"""Compiled modular kernels over GF(p), p < 2**61.

Products are formed in 128-bit intermediates; see ``_pykernels`` for the
reference semantics every function here must reproduce bit for bit.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

NAME = "cython"


cdef inline uint64_t _mul(uint64_t a, uint64_t b, uint64_t p) nogil:
    return <uint64_t>((<u128>a * b) % p)


cdef inline uint64_t _pow(uint64_t a, uint64_t e, uint64_t p) nogil:
    cdef uint64_t r = 1 % p
    a %= p
    while e:
        if e & 1:
            r = _mul(r, a, p)
        a = _mul(a, a, p)
        e >>= 1
    return r


def mulmod(a, b, long long p):
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    cdef const int64_t[:] x = np.ascontiguousarray(a).ravel()
    cdef const int64_t[:] y = np.ascontiguousarray(b).ravel()
    out_arr = np.empty(x.shape[0], dtype=np.int64)
    cdef int64_t[:] out = out_arr
    cdef Py_ssize_t i, n = x.shape[0]
    cdef uint64_t up = <uint64_t>p
    with nogil:
        for i in range(n):
            out[i] = <int64_t>_mul(<uint64_t>x[i], <uint64_t>y[i], up)
    return out_arr.reshape(a.shape)


def powmod(a, long long e, long long p):
    a = np.asarray(a, dtype=np.int64)
    cdef const int64_t[:] x = np.ascontiguousarray(a).ravel()
    out_arr = np.empty(x.shape[0], dtype=np.int64)
    cdef int64_t[:] out = out_arr
    cdef Py_ssize_t i, n = x.shape[0]
    with nogil:
        for i in range(n):
            out[i] = <int64_t>_pow(<uint64_t>x[i], <uint64_t>e, <uint64_t>p)
    return out_arr.reshape(a.shape)


cdef void _matmul2(const int64_t[:, :] a, const int64_t[:, :] b, int64_t[:, :] c, uint64_t p) nogil:
    cdef Py_ssize_t i, j, l, rows = a.shape[0], inner = a.shape[1], cols = b.shape[1]
    cdef u128 acc
    cdef int run
    for i in range(rows):
        for j in range(cols):
            acc = 0
            run = 0
            for l in range(inner):
                acc += <u128>(<uint64_t>a[i, l]) * (<uint64_t>b[l, j])
                run += 1
                # 32 products below 2**122 each cannot overflow 128 bits
                if run == 32:
                    acc %= p
                    run = 0
            c[i, j] = <int64_t>(acc % p)


def matmul(a, b, long long p):
    """``a @ b mod p`` with numpy matmul broadcasting over leading axes."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.ndim < 2 or b.ndim < 2:
        raise ValueError("matmul expects arrays with at least 2 dimensions")
    if a.shape[-1] != b.shape[-2]:
        raise ValueError("inner dimensions differ: %r @ %r" % (a.shape, b.shape))
    pp = int(p)
    if (pp - 1) * (pp - 1) * max(1, int(a.shape[-1])) < 2 ** 63:
        return np.matmul(a, b) % p  # no int64 overflow possible
    batch = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    a = np.ascontiguousarray(np.broadcast_to(a, batch + a.shape[-2:]))
    b = np.ascontiguousarray(np.broadcast_to(b, batch + b.shape[-2:]))
    rows, cols = a.shape[-2], b.shape[-1]
    a3 = a.reshape((-1,) + a.shape[-2:])
    b3 = b.reshape((-1,) + b.shape[-2:])
    out = np.empty((a3.shape[0], rows, cols), dtype=np.int64)
    cdef const int64_t[:, :, :] av = a3
    cdef const int64_t[:, :, :] bv = b3
    cdef int64_t[:, :, :] cv = out
    cdef Py_ssize_t k, nb = a3.shape[0]
    cdef uint64_t up = <uint64_t>p
    with nogil:
        for k in range(nb):
            _matmul2(av[k], bv[k], cv[k], up)
    return out.reshape(batch + (rows, cols))


def rref(m, long long p):
    """Reduced row echelon form mod p.  Returns ``(R, pivot_columns)``."""
    r = np.array(m, dtype=np.int64, copy=True, order="C")
    if r.ndim != 2:
        raise ValueError("rref expects a 2-D array")
    cdef int64_t[:, :] rv = r
    cdef Py_ssize_t rows = r.shape[0], cols = r.shape[1]
    cdef Py_ssize_t row = 0, col, i, j, piv
    cdef uint64_t up = <uint64_t>p, inv, f, t
    cdef int64_t tmp
    pivots = []
    for col in range(cols):
        if row == rows:
            break
        piv = -1
        for i in range(row, rows):
            if rv[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        with nogil:
            if piv != row:
                for j in range(cols):
                    tmp = rv[row, j]
                    rv[row, j] = rv[piv, j]
                    rv[piv, j] = tmp
            inv = _pow(<uint64_t>rv[row, col], up - 2, up)
            for j in range(col, cols):
                rv[row, j] = <int64_t>_mul(<uint64_t>rv[row, j], inv, up)
            for i in range(rows):
                if i == row or rv[i, col] == 0:
                    continue
                f = <uint64_t>rv[i, col]
                for j in range(col, cols):
                    t = _mul(f, <uint64_t>rv[row, j], up)
                    rv[i, j] = <int64_t>((<uint64_t>rv[i, j] + up - t) % up)
        pivots.append(col)
        row += 1
    return r, pivots
