"""Pure-numpy modular kernels over GF(p), p < 2**61.

Arrays are int64 holding canonical residues.  When a product could overflow
int64 the computation is routed through Python integers (object dtype).
"""
import numpy as np

_I64_MAX = (1 << 63) - 1

NAME = "python"


def _small(p):
    return (p - 1) * (p - 1) <= _I64_MAX


def mulmod(a, b, p):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if _small(p):
        return (a * b) % p
    out = (a.astype(object) * b.astype(object)) % p
    return np.asarray(out, dtype=np.int64)


def matmul(a, b, p):
    """``a @ b mod p`` with numpy matmul broadcasting over leading axes."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    if inner == 0:
        shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2]) + (a.shape[-2], b.shape[-1])
        return np.zeros(shape, dtype=np.int64)
    if not _small(p):
        out = np.matmul(a.astype(object), b.astype(object)) % p
        return np.asarray(out, dtype=np.int64)
    chunk = max(1, _I64_MAX // ((p - 1) * (p - 1)))
    if chunk >= inner:
        return np.matmul(a, b) % p
    acc = None
    for lo in range(0, inner, chunk):
        part = np.matmul(a[..., lo:lo + chunk], b[..., lo:lo + chunk, :]) % p
        acc = part if acc is None else (acc + part) % p
    return acc


def powmod(a, e, p):
    a = np.asarray(a, dtype=np.int64)
    flat = [pow(int(x), int(e), p) for x in a.ravel()]
    return np.array(flat, dtype=np.int64).reshape(a.shape)


def rref(m, p):
    """Reduced row echelon form mod p.  Returns ``(R, pivot_columns)``."""
    r = np.array(m, dtype=np.int64, copy=True)
    if r.ndim != 2:
        raise ValueError("rref expects a 2-D array")
    rows, cols = r.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        nz = np.flatnonzero(r[row:, col])
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        inv = pow(int(r[row, col]), p - 2, p)
        r[row] = mulmod(r[row], inv, p)
        factors = r[:, col].copy()
        factors[row] = 0
        hit = np.flatnonzero(factors)
        if hit.size:
            update = mulmod(factors[hit, None], r[row][None, :], p)
            r[hit] = (r[hit] - update) % p
        pivots.append(col)
        row += 1
    return r, pivots
