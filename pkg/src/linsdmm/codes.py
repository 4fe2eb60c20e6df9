"""Linear codes given by generator matrices.

A :class:`LinearCode` keeps the generator it was built from (rows may be
dependent) because SDMM encoding depends on the particular generator, not
just on the row space.  Rank, row-reduced basis and pivots are cached.

Brute-force routines (distance, MDS test) take explicit budgets and raise
:class:`~linsdmm.errors.TooLarge` instead of running away.
"""
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from math import comb

import numpy as np

from . import linalg
from .errors import FieldMismatch, InvalidPoints, ShapeError, TooLarge

CODEWORD_BUDGET = 1 << 24
SUBSET_BUDGET = 1 << 16
_CHUNK = 1 << 15


class LinearCode:
    """Row space of ``gen`` over ``field``.

    ``known_distance`` may be supplied by constructions whose distance is a
    theorem (e.g. Reed-Solomon); it is only consulted when exact enumeration
    is over budget.
    """

    def __init__(self, field, gen, known_distance=None):
        gen = np.asarray(gen, dtype=np.int64)
        if gen.ndim == 1:
            gen = gen[None, :]
        if gen.ndim != 2:
            raise ShapeError(f"generator must be 2-D, got shape {gen.shape}")
        self.field = field
        self.gen = field.asarray(gen)
        self.gen.setflags(write=False)
        self.known_distance = known_distance

    @property
    def length(self):
        return self.gen.shape[1]

    @cached_property
    def _reduced(self):
        r, piv = linalg.rref(self.field, self.gen)
        basis = r[: len(piv)]
        basis.setflags(write=False)
        return basis, tuple(piv)

    @property
    def basis(self):
        return self._reduced[0]

    @property
    def rank(self):
        return len(self._reduced[1])

    dim = rank

    @property
    def pivots(self):
        return self._reduced[1]

    def __repr__(self):
        return f"LinearCode({self.field!r}, N={self.length}, k={self.rank})"

    def contains(self, vectors):
        """Membership of each row of ``vectors`` in the code."""
        return linalg.in_row_space(self.field, self.basis, vectors)

    def same_space(self, other):
        _check_compatible(self, other)
        return linalg.same_row_space(self.field, self.basis, other.basis)

    def restrict(self, columns):
        """Punctured code keeping only ``columns`` (in the given order)."""
        return LinearCode(self.field, self.gen[:, list(columns)])

    def encode(self, messages):
        """``messages @ gen`` for a batch of message rows."""
        return self.field.matmul(np.atleast_2d(messages), self.gen)


def _check_compatible(c, d):
    if c.field != d.field:
        raise FieldMismatch(f"codes over {c.field!r} and {d.field!r}")
    if c.length != d.length:
        raise ShapeError(f"code lengths differ: {c.length} vs {d.length}")


@dataclass(frozen=True)
class EvalCodeSpec:
    """Evaluation code: generator row ``j`` is ``(nu_i * alpha_i ** e_j)_i``.

    With ``exponents == range(k)`` this is ``GRS_k(alpha, nu)``.
    """

    field: object
    points: tuple
    multipliers: tuple
    exponents: tuple

    def __post_init__(self):
        pts = [int(a) for a in self.points]
        if len(set(pts)) != len(pts):
            raise InvalidPoints("evaluation points must be pairwise distinct")
        if len(self.multipliers) != len(pts):
            raise ShapeError("one multiplier per evaluation point is required")
        if any(int(v) % self.field.order == 0 for v in self.multipliers):
            raise InvalidPoints("multipliers must be nonzero")
        exps = [int(e) for e in self.exponents]
        if exps != sorted(set(exps)) or (exps and exps[0] < 0):
            raise InvalidPoints("exponents must be sorted, distinct and non-negative")

    @property
    def length(self):
        return len(self.points)

    @property
    def is_grs(self):
        return list(self.exponents) == list(range(len(self.exponents)))

    @property
    def k(self):
        return len(self.exponents)

    def generator(self):
        return evaluation_matrix(self.field, self.points, self.exponents, self.multipliers)

    def code(self):
        dist = self.length - self.k + 1 if self.is_grs and self.k <= self.length else None
        return LinearCode(self.field, self.generator(), known_distance=dist)


def evaluation_matrix(field, points, exponents, multipliers=None):
    """Rows ``(nu_i * alpha_i ** e)`` for each exponent ``e`` (negative allowed)."""
    pts = field.asarray(list(points))
    rows = np.stack([field.pow(pts, e) for e in exponents]) if len(exponents) else field.zeros((0, len(pts)))
    if multipliers is not None:
        rows = field.mul(rows, field.asarray(list(multipliers))[None, :])
    return rows


def grs_spec(field, points, k, multipliers=None):
    points = tuple(int(a) for a in points)
    if multipliers is None:
        multipliers = (1,) * len(points)
    return EvalCodeSpec(field, points, tuple(int(v) for v in multipliers), tuple(range(k)))


def rs_code(field, points, k):
    if k > len(points):
        raise ShapeError(f"dimension {k} exceeds length {len(points)}")
    return grs_spec(field, points, k).code()


def grs_code(field, points, multipliers, k):
    if k > len(points):
        raise ShapeError(f"dimension {k} exceeds length {len(points)}")
    return grs_spec(field, points, k, multipliers).code()


def star_product(c, d):
    """Span of all elementwise products of generator rows of ``c`` and ``d``."""
    _check_compatible(c, d)
    prods = c.field.mul(c.gen[:, None, :], d.gen[None, :, :]).reshape(-1, c.length)
    return LinearCode(c.field, prods)


def support(code):
    return tuple(int(i) for i in np.flatnonzero(np.any(code.basis != 0, axis=0)))


def dual(code):
    return LinearCode(code.field, linalg.nullspace(code.field, code.basis))


def contains_information_set(code, indices):
    idx = sorted(set(int(i) for i in indices))
    if code.rank == 0:
        return True
    if len(idx) < code.rank:
        return False
    return linalg.rank(code.field, code.basis[:, idx]) == code.rank


def information_set(code, indices=None):
    """Lexicographically first information set inside ``indices`` (or None)."""
    idx = sorted(set(int(i) for i in (range(code.length) if indices is None else indices)))
    if code.rank == 0:
        return ()
    _, piv = linalg.rref(code.field, code.basis[:, idx])
    if len(piv) < code.rank:
        return None
    return tuple(idx[c] for c in piv)


def _enumerate_min_weight(code):
    f, basis, k = code.field, code.basis, code.rank
    q, total = f.order, f.order ** k
    radix = q ** np.arange(k, dtype=np.int64)
    best = code.length
    for lo in range(1, total, _CHUNK):
        idx = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        msgs = (idx[:, None] // radix[None, :]) % q
        weights = np.count_nonzero(f.matmul(msgs, basis), axis=1)
        best = min(best, int(weights.min()))
        if best == 1:
            break
    return best


def _subset_min_distance(code, subset_budget):
    # d = N - r + 1 for the least r such that every r-subset is an information set
    n, k = code.length, code.rank
    spent = 0
    for r in range(k, n + 1):
        spent += comb(n, r)
        if spent > subset_budget:
            raise TooLarge(f"subset search for {code!r} exceeds budget {subset_budget}")
        if all(contains_information_set(code, s) for s in combinations(range(n), r)):
            return n - r + 1
    raise AssertionError("unreachable: the full index set is an information set")


def minimum_distance(code, budget=CODEWORD_BUDGET, subset_budget=SUBSET_BUDGET):
    """Exact minimum Hamming distance.

    The zero code gets the sentinel ``N + 1``.  Uses codeword enumeration
    when ``q**k <= budget``, else a search over column subsets, else the
    construction's ``known_distance``.
    """
    n, k = code.length, code.rank
    if k == 0:
        return n + 1
    if k == n:
        return 1
    if code.field.order ** k <= budget:
        return _enumerate_min_weight(code)
    try:
        return _subset_min_distance(code, subset_budget)
    except TooLarge:
        if code.known_distance is not None:
            return int(code.known_distance)
        raise


def minimum_distance_by_codewords(code, budget=CODEWORD_BUDGET):
    """Codeword-enumeration route only (used as an independent oracle)."""
    if code.rank == 0:
        return code.length + 1
    if code.field.order ** code.rank > budget:
        raise TooLarge(f"{code.field.order}**{code.rank} codewords exceed budget {budget}")
    return _enumerate_min_weight(code)


def is_mds(code, budget=CODEWORD_BUDGET, subset_budget=SUBSET_BUDGET):
    """True iff every ``rank``-subset of columns of the reduced generator is invertible."""
    n, k = code.length, code.rank
    if k == 0 or k == n:
        return True
    if comb(n, k) <= subset_budget:
        return all(contains_information_set(code, s) for s in combinations(range(n), k))
    return minimum_distance(code, budget, subset_budget) == n - k + 1


def product_singleton_bound(dim_c, dim_d, n):
    """Upper bound on the minimum distance of a star product code."""
    return max(1, n - dim_c - dim_d + 2)


def star_dim_lower_bound(dim_c, dim_d, n):
    """Lower bound on ``dim(C * D)`` when one factor is MDS and both are full-support."""
    return min(n, dim_c + dim_d - 1)
