"""The linear SDMM framework.

Matrices are partitioned on a grid, the blocks plus uniform padding are
encoded with generator matrices ``F`` and ``G``, worker ``i`` multiplies its
two shares, and the user recovers ``AB`` as a fixed linear combination of
the responses.

Block enumeration is row-major: ``A[i][j]`` is block ``i * p + j`` and
``B[j][k]`` is block ``j * n + k``.
"""
import enum
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from . import codes, linalg
from .errors import (
    InsufficientResponses,
    InvalidParams,
    NotDecodable,
    ShapeError,
    TooLarge,
)

OK = "ok"
STRAGGLER = "straggler"
FLAGGED = "flagged"


@dataclass(frozen=True)
class PartitionSpec:
    m: int
    n: int
    p: int

    def __post_init__(self):
        if min(self.m, self.n, self.p) < 1:
            raise InvalidParams(f"partition parameters must be positive: {self}")

    @property
    def a_blocks(self):
        return self.m * self.p

    @property
    def b_blocks(self):
        return self.n * self.p

    def block_shapes(self, t, s, r):
        """Shapes of the A blocks, B blocks and response blocks for ``t x s`` times ``s x r``."""
        if t % self.m or s % self.p or r % self.n:
            raise ShapeError(f"({t}, {s}, {r}) is not divisible by (m={self.m}, p={self.p}, n={self.n})")
        return (t // self.m, s // self.p), (s // self.p, r // self.n), (t // self.m, r // self.n)


def partition(a, b, spec):
    """Split ``a`` and ``b`` into grid blocks, returned as stacked arrays."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    (bt, bs), (_, br), _ = spec.block_shapes(a.shape[0], a.shape[1], b.shape[1])
    m, n, p = spec.m, spec.n, spec.p
    a_blocks = a.reshape(m, bt, p, bs).transpose(0, 2, 1, 3).reshape(m * p, bt, bs)
    b_blocks = b.reshape(p, bs, n, br).transpose(0, 2, 1, 3).reshape(p * n, bs, br)
    return a_blocks, b_blocks


def assemble(blocks, spec):
    """Inverse of the grid split for an ``m x n`` grid of result blocks."""
    blocks = np.asarray(blocks)
    _, bt, br = blocks.shape
    return blocks.reshape(spec.m, spec.n, bt, br).transpose(0, 2, 1, 3).reshape(spec.m * bt, spec.n * br)


@dataclass
class ShareSet:
    """Encoded shares for all workers plus the padding that produced them."""

    a_shares: np.ndarray  # (N, t/m, s/p)
    b_shares: np.ndarray  # (N, s/p, r/n)
    a_pad: np.ndarray
    b_pad: np.ndarray

    @property
    def n_workers(self):
        return self.a_shares.shape[0]


@dataclass
class ResponseSet:
    """Per-worker responses with their status.

    ``_truth`` is the simulator's ground-truth Byzantine set; decoders get a
    copy without it (:meth:`for_decoder`).
    """

    responses: np.ndarray  # (N, t/m, r/n)
    status: tuple
    _truth: frozenset = dc_field(default=frozenset(), repr=False, compare=False)

    @property
    def n_workers(self):
        return len(self.status)

    def indices(self, state=OK):
        return tuple(i for i, st in enumerate(self.status) if st == state)

    def entry_vectors(self):
        """One length-N row per response entry, row-major over the entry index."""
        n = self.responses.shape[0]
        return self.responses.reshape(n, -1).T.copy()

    def with_status(self, status):
        return ResponseSet(self.responses, tuple(status), self._truth)

    def for_decoder(self):
        return ResponseSet(self.responses, self.status)

    def ground_truth(self):
        return self._truth


class SdmmScheme:
    """A linear SDMM scheme: partition, generators ``F``, ``G`` and decoding coefficients.

    ``grs`` optionally names the star-product code as an explicit GRS code,
    which enables the Reed-Solomon error decoders.  ``require_decodable=False``
    skips the decoding-coefficient solve (used for deliberately broken
    constructions in security audits).
    """

    def __init__(self, field, partition_spec, X, F, G, name="custom", grs=None, require_decodable=True):
        self.field = field
        self.partition = partition_spec
        self.X = int(X)
        self.F = field.asarray(F)
        self.G = field.asarray(G)
        self.name = name
        if self.F.ndim != 2 or self.G.ndim != 2 or self.F.shape[1] != self.G.shape[1]:
            raise ShapeError("F and G must be matrices with the same number of columns")
        if self.F.shape[0] != partition_spec.a_blocks + self.X:
            raise ShapeError(f"F must have mp + X = {partition_spec.a_blocks + self.X} rows")
        if self.G.shape[0] != partition_spec.b_blocks + self.X:
            raise ShapeError(f"G must have np + X = {partition_spec.b_blocks + self.X} rows")
        self.F.setflags(write=False)
        self.G.setflags(write=False)
        self.grs = grs
        if grs is not None and not codes.LinearCode(field, grs.generator()).same_space(self.star_code):
            raise InvalidParams("declared GRS code differs from the star-product code")
        self._lambda_cache = {}
        self.lambdas = derive_lambda(self) if require_decodable else None

    def __repr__(self):
        return f"SdmmScheme({self.name}, {self.field!r}, N={self.N}, X={self.X}, {self.partition})"

    @property
    def N(self):
        return self.F.shape[1]

    @cached_property
    def code_a(self):
        return codes.LinearCode(self.field, self.F)

    @cached_property
    def code_b(self):
        return codes.LinearCode(self.field, self.G)

    @cached_property
    def star_code(self):
        code = codes.star_product(self.code_a, self.code_b)
        if self.grs is not None:
            code.known_distance = self.grs.length - self.grs.k + 1
        return code

    @cached_property
    def enc_a(self):
        return codes.LinearCode(self.field, self.F[: self.partition.a_blocks])

    @cached_property
    def sec_a(self):
        return codes.LinearCode(self.field, self.F[self.partition.a_blocks:])

    @cached_property
    def enc_b(self):
        return codes.LinearCode(self.field, self.G[: self.partition.b_blocks])

    @cached_property
    def sec_b(self):
        return codes.LinearCode(self.field, self.G[self.partition.b_blocks:])

    def lambda_for(self, info_set):
        """Decoding coefficients restricted to an information set of the star code."""
        info_set = tuple(info_set)
        cached = self._lambda_cache.get(info_set)
        if cached is None:
            h = self.star_code.basis
            expand = self.field.matmul(linalg.inverse(self.field, h[:, list(info_set)]), h)
            mn = self.partition.m * self.partition.n
            cached = self.field.matmul(expand, self.lambdas.reshape(self.N, mn))
            self._lambda_cache[info_set] = cached
        return cached


def _monomial_rows(scheme):
    f = scheme.field
    rows = f.mul(scheme.F[:, None, :], scheme.G[None, :, :])
    return rows.reshape(-1, scheme.N)


def _target_functionals(scheme):
    ps = scheme.partition
    na, nb = ps.a_blocks + scheme.X, ps.b_blocks + scheme.X
    targets = scheme.field.zeros((na * nb, ps.m * ps.n))
    for u in range(ps.m):
        for v in range(ps.n):
            for j in range(ps.p):
                targets[(u * ps.p + j) * nb + (j * ps.n + v), u * ps.n + v] = 1
    return targets


def derive_lambda(scheme):
    """Solve for ``Lambda_i`` (shape ``(N, m, n)``) such that ``AB = sum_i Lambda_i (x) C_i``.

    Worker ``i``'s response expands as ``sum_{a,b} F[a,i] G[b,i] P_a Q_b``
    over the data/padding blocks ``P_a``, ``Q_b``.  Output block ``(u, v)``
    must pick up exactly the products ``A[u][j] B[j][v]`` and annihilate every
    other pairing, in particular all pairings that involve padding.  That is
    one linear system per output block, with no dependence on the padding.
    """
    sol = linalg.solve_right(scheme.field, _monomial_rows(scheme), _target_functionals(scheme))
    if sol is None:
        raise NotDecodable(f"{scheme.name}: no padding-independent decoding coefficients exist")
    ps = scheme.partition
    lam = sol.reshape(scheme.N, ps.m, ps.n)
    lam.setflags(write=False)
    return lam


def encode(scheme, a, b, rng):
    """Encode ``a`` and ``b`` into shares; padding is drawn uniformly from ``rng``.

    With ``X == 0`` nothing is drawn and the shares carry no protection.
    """
    f, ps = scheme.field, scheme.partition
    a_blocks, b_blocks = partition(f.asarray(a), f.asarray(b), ps)
    _, bt, bs = a_blocks.shape
    br = b_blocks.shape[2]
    if scheme.X:
        a_pad = f.random((scheme.X, bt, bs), rng)
        b_pad = f.random((scheme.X, bs, br), rng)
    else:
        a_pad = f.zeros((0, bt, bs))
        b_pad = f.zeros((0, bs, br))
    msg_a = np.concatenate([a_blocks, a_pad]).reshape(ps.a_blocks + scheme.X, -1)
    msg_b = np.concatenate([b_blocks, b_pad]).reshape(ps.b_blocks + scheme.X, -1)
    a_sh = f.matmul(scheme.F.T, msg_a).reshape(scheme.N, bt, bs)
    b_sh = f.matmul(scheme.G.T, msg_b).reshape(scheme.N, bs, br)
    return ShareSet(a_sh, b_sh, a_pad, b_pad)


def worker_products(field, a_shares, b_shares):
    return field.matmul(a_shares, b_shares)


def honest_responses(scheme, shares):
    prods = worker_products(scheme.field, shares.a_shares, shares.b_shares)
    return ResponseSet(prods, (OK,) * scheme.N)


def decode(scheme, responses, indices=None):
    """Recover ``AB`` from the responses indexed by ``indices`` (default: all OK workers).

    The responses are assumed honest; see :mod:`linsdmm.byzantine` otherwise.
    """
    if indices is None:
        indices = responses.indices(OK)
    info = codes.information_set(scheme.star_code, indices)
    if info is None:
        raise InsufficientResponses(
            f"{len(tuple(indices))} responses do not contain an information set of the star-product code"
        )
    f, ps = scheme.field, scheme.partition
    lam = scheme.lambda_for(info)  # (k, m*n)
    picked = responses.responses[list(info)]
    k, bt, br = picked.shape
    blocks = f.matmul(lam.T, picked.reshape(k, bt * br)).reshape(ps.m * ps.n, bt, br)
    return assemble(blocks, ps)


def recovery_threshold(scheme):
    return scheme.N - codes.minimum_distance(scheme.star_code) + 1


class SecurityVerdict(enum.Enum):
    SECURE_BY_MDS = "SecureByMds"
    INSECURE_PROVEN = "InsecureProven"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


def is_x_secure(scheme):
    """Classify X-security from the algebra of the security subcodes.

    Secure when both security subcodes are MDS of dimension X.  Insecure when
    X exceeds the dimension of a security subcode, or when every X columns of
    both generators are independent (X below both dual distances) and a
    security subcode fails to be MDS.  Anything else is undecided.
    """
    X = scheme.X
    sec_a, sec_b = scheme.sec_a, scheme.sec_b
    if X > min(sec_a.rank, sec_b.rank):
        return SecurityVerdict.INSECURE_PROVEN
    try:
        sec_mds = codes.is_mds(sec_a) and codes.is_mds(sec_b)
    except TooLarge:
        return SecurityVerdict.UNKNOWN
    if sec_mds:
        return SecurityVerdict.SECURE_BY_MDS
    try:
        dual_a = codes.minimum_distance(codes.dual(scheme.code_a))
        dual_b = codes.minimum_distance(codes.dual(scheme.code_b))
    except TooLarge:
        return SecurityVerdict.UNKNOWN
    if X <= min(dual_a, dual_b) - 1:
        return SecurityVerdict.INSECURE_PROVEN
    return SecurityVerdict.UNKNOWN


@dataclass(frozen=True)
class Bound:
    key: str
    description: str
    value: object
    applies: bool
    note: str = ""


def bounds_report(m, n, p, X, N, sec_mds, tolerates_stragglers, codes_mds=False, dims=None, R=None):
    """Lower bounds on the recovery threshold, the collusion cap and the communication cost.

    ``dims`` is an optional ``(t, s, r)``; with ``R`` it enables the cost line.
    """
    straggler_bound = (m + n) * p + 2 * X - 1
    out = [
        Bound("thm1", "R >= min{N, (m+n)p + 2X - 1}", min(N, straggler_bound), True),
        Bound(
            "thm2",
            "R >= (m+n)p + 2X - 1 (straggler tolerant)",
            straggler_bound,
            bool(tolerates_stragglers),
        ),
        Bound(
            "thm3",
            "R >= mn + max{m,n}p + 2X - 1 (MDS security subcodes)",
            m * n + max(m, n) * p + 2 * X - 1,
            bool(sec_mds),
        ),
    ]
    cap_ok = 2 * X < N
    out.append(
        Bound(
            "cor2",
            "X < N/2 (MDS codes C_A, C_B)",
            cap_ok,
            bool(codes_mds),
            "" if cap_ok or not codes_mds else "violated: X >= N/2 cannot be X-secure with MDS codes",
        )
    )
    if dims is not None and R is not None:
        t, s, r = dims
        cost = N * (t * s // (m * p) + s * r // (p * n)) + R * (t * r // (m * n))
        out.append(Bound("comm", "N(ts/mp + sr/pn) + R tr/mn", cost, True, "field symbols"))
    return out


def scheme_bounds(scheme, dims=None):
    """``bounds_report`` with the flags derived from a constructed scheme."""
    ps = scheme.partition
    R = recovery_threshold(scheme)
    sec_mds = codes.is_mds(scheme.sec_a) and codes.is_mds(scheme.sec_b)
    codes_mds = codes.is_mds(scheme.code_a) and codes.is_mds(scheme.code_b)
    return R, bounds_report(ps.m, ps.n, ps.p, scheme.X, scheme.N, sec_mds, R < scheme.N, codes_mds, dims, R)


# -- matrix text format: "t s q" header, then t rows of s decimal values ------

def write_matrix(fh, matrix, q):
    matrix = np.asarray(matrix)
    rows, cols = matrix.shape
    fh.write(f"{rows} {cols} {q}\n")
    for row in matrix:
        fh.write(" ".join(str(int(v)) for v in row) + "\n")


def _read_matrix_lines(lines, it_start=0):
    head = lines[it_start].split()
    if len(head) != 3:
        raise ShapeError(f"bad matrix header {lines[it_start]!r}")
    rows, cols, q = (int(x) for x in head)
    body = lines[it_start + 1: it_start + 1 + rows]
    if len(body) != rows:
        raise ShapeError("matrix file truncated")
    data = np.array([[int(x) for x in ln.split()] for ln in body], dtype=np.int64).reshape(rows, cols)
    if np.any((data < 0) | (data >= q)):
        raise ShapeError("matrix entries must be canonical field values")
    return data, q, it_start + 1 + rows


def read_matrix(fh):
    lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    data, q, _ = _read_matrix_lines(lines)
    return data, q


def write_responses(fh, responses, q):
    """One matrix block per worker; a straggler is written as an empty ``0 0 q`` block."""
    for i, st in enumerate(responses.status):
        if st == STRAGGLER:
            fh.write(f"0 0 {q}\n")
        else:
            write_matrix(fh, responses.responses[i], q)


def read_responses(fh):
    lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    mats, status, pos, q = [], [], 0, None
    while pos < len(lines):
        data, q, pos = _read_matrix_lines(lines, pos)
        mats.append(data)
        status.append(STRAGGLER if data.size == 0 else OK)
    shape = next((m.shape for m in mats if m.size), (0, 0))
    stack = np.stack([m if m.size else np.zeros(shape, dtype=np.int64) for m in mats])
    return ResponseSet(stack, tuple(status)), q
