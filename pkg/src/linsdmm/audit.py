"""Exhaustive security audit of tiny schemes.

With 1x1 blocks, every assignment of the data blocks and padding is
enumerated, the shares seen by a collusion set are computed, and the mutual
information between the data and those shares is evaluated from exact
counts.  Whether it vanishes is decided by integer arithmetic (joint count
times total equals the product of the marginal counts for every pair), so a
reported zero is exactly zero; the value in bits is then a float derived
from the same counts.
"""
import csv
from dataclasses import dataclass
from itertools import combinations
from math import log2

import numpy as np

from . import linalg
from .errors import TooLarge

ENUMERATION_GUARD = 10**9


@dataclass(frozen=True)
class MutualInformation:
    bits: float
    exact_zero: bool


@dataclass(frozen=True)
class LeakageRow:
    workers: tuple
    mi: MutualInformation
    pad_a_uniform: bool
    pad_b_uniform: bool
    sec_a_full_rank: bool
    sec_b_full_rank: bool


def _all_vectors(q, n):
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(q**n, dtype=np.int64)
    return (idx[:, None] // (q ** np.arange(n, dtype=np.int64))[None, :]) % q


def _codes(rows, q):
    """Integer label for each row (base-q digits)."""
    if rows.shape[1] == 0:
        return np.zeros(rows.shape[0], dtype=np.int64)
    return rows @ (q ** np.arange(rows.shape[1], dtype=np.int64))


def _mi_from_labels(x, y):
    total = len(x)
    _, xi = np.unique(x, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    nx, ny = xi.max() + 1, yi.max() + 1
    joint = np.zeros((nx, ny), dtype=np.int64)
    np.add.at(joint, (xi, yi), 1)
    cx = joint.sum(axis=1)
    cy = joint.sum(axis=0)
    independent = bool(np.array_equal(joint * total, np.outer(cx, cy)))
    if independent:
        return MutualInformation(0.0, True)
    bits = 0.0
    for a, b in zip(*np.nonzero(joint)):
        c = int(joint[a, b])
        bits += c / total * log2(c * total / (int(cx[a]) * int(cy[b])))
    return MutualInformation(bits, False)


def _check_auditable(scheme):
    ps = scheme.partition
    q = scheme.field.order
    n_vars = ps.a_blocks + ps.b_blocks + 2 * scheme.X
    if q**n_vars > ENUMERATION_GUARD:
        raise TooLarge(f"{q}**{n_vars} assignments exceed the enumeration guard {ENUMERATION_GUARD}")
    return n_vars


class _Enumeration:
    """All data/padding assignments and the resulting scalar shares."""

    def __init__(self, scheme):
        _check_auditable(scheme)
        f, ps, x = scheme.field, scheme.partition, scheme.X
        q = f.order
        na, nb = ps.a_blocks, ps.b_blocks
        msgs = _all_vectors(q, na + nb + 2 * x)
        a_msg = np.hstack([msgs[:, :na], msgs[:, na + nb: na + nb + x]])
        b_msg = np.hstack([msgs[:, na: na + nb], msgs[:, na + nb + x:]])
        self.q = q
        self.data = _codes(msgs[:, : na + nb], q)
        self.a_shares = f.matmul(a_msg, scheme.F)  # (assignments, N)
        self.b_shares = f.matmul(b_msg, scheme.G)

    def observed(self, workers):
        cols = list(workers)
        both = np.hstack([self.a_shares[:, cols], self.b_shares[:, cols]])
        return _codes(both, self.q)


def mutual_information_exhaustive(scheme, collusion_size):
    """``{workers: MutualInformation}`` for every collusion set of the given size."""
    enum = _Enumeration(scheme)
    return {
        ws: _mi_from_labels(enum.data, enum.observed(ws))
        for ws in combinations(range(scheme.N), collusion_size)
    }


def max_leakage(results):
    return max((r.bits for r in results.values()), default=0.0)


def _pad_uniform(field, sec_rows, workers):
    """Is ``pads @ sec_rows[:, workers]`` uniform when the pads are?  Decided by counting."""
    q = field.order
    pads = _all_vectors(q, sec_rows.shape[0])
    images = _codes(field.matmul(pads, sec_rows[:, list(workers)]), q)
    counts = np.unique(images, return_counts=True)[1]
    return len(counts) == q ** len(workers) and bool(np.all(counts == counts[0]))


def leakage_report(scheme, collusion_size):
    """Per collusion set: MI, uniformity of the padding part of the shares, and rank of the security subcode."""
    ps = scheme.partition
    f = scheme.field
    sec_a = scheme.F[ps.a_blocks:]
    sec_b = scheme.G[ps.b_blocks:]
    rows = []
    for ws, mi in mutual_information_exhaustive(scheme, collusion_size).items():
        cols = list(ws)
        rows.append(LeakageRow(
            ws, mi,
            _pad_uniform(f, sec_a, ws), _pad_uniform(f, sec_b, ws),
            linalg.rank(f, sec_a[:, cols]) == len(cols),
            linalg.rank(f, sec_b[:, cols]) == len(cols),
        ))
    return rows


def write_report_csv(fh, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["workers", "mi_bits", "mi_exact_zero", "pad_a_uniform", "pad_b_uniform",
                "sec_a_full_rank", "sec_b_full_rank"])
    for r in rows:
        w.writerow([
            " ".join(map(str, r.workers)), f"{r.mi.bits:.12g}", int(r.mi.exact_zero),
            int(r.pad_a_uniform), int(r.pad_b_uniform), int(r.sec_a_full_rank), int(r.sec_b_full_rank),
        ])
