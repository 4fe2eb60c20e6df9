"""Concrete linear SDMM schemes and the recipe strings that name them.

Recipes: ``matdot:p=2,X=1,N=6``, ``gasp33x2:seed=7``, ``dft:p=4,X=2``,
``hermitian`` and ``rmatdot:p=2,X=1,N=8`` (MatDot with per-round diagonal
masking).  Any recipe may also carry ``q=<prime>`` to pick the field.
"""
from dataclasses import dataclass, field as dc_field
from itertools import product

import numpy as np

from . import codes, linalg
from .core import PartitionSpec, ResponseSet, SdmmScheme, ShareSet
from .errors import ConstructionFailed, InvalidParams
from .galois import GF4, PrimeField, primitive_root_of_unity

MERSENNE_61 = (1 << 61) - 1
DEFAULT_PRIME = 65537


def build_matdot(field, p, X, N, points=None):
    """Secure MatDot: ``f = sum A_j x^(j-1) + sum R_k x^(p+k-1)``, ``g`` with reversed data exponents."""
    p, X, N = int(p), int(X), int(N)
    if p < 1 or X < 0:
        raise InvalidParams("MatDot needs p >= 1 and X >= 0")
    threshold = 2 * p + 2 * X - 1
    if N < threshold:
        raise InvalidParams(f"MatDot with p={p}, X={X} needs N >= {threshold}, got {N}")
    if points is None:
        if N >= field.order:
            raise InvalidParams(f"{field!r} has too few nonzero elements for N={N}")
        points = range(1, N + 1)
    points = [int(a) for a in field.asarray(list(points))]
    if len(points) != N:
        raise InvalidParams("need exactly N evaluation points")
    if 0 in points:
        raise InvalidParams("MatDot evaluation points must be nonzero")
    a_exps = list(range(p + X))
    b_exps = list(range(p - 1, -1, -1)) + list(range(p, p + X))
    F = codes.evaluation_matrix(field, points, a_exps)
    G = codes.evaluation_matrix(field, points, b_exps)
    grs = codes.grs_spec(field, points, threshold)
    return SdmmScheme(field, PartitionSpec(1, 1, p), X, F, G, name="matdot", grs=grs)


GASP_A_EXPONENTS = (0, 1, 2, 9, 12)
GASP_B_EXPONENTS = (0, 3, 6, 9, 10)
GASP_N = 18


def gasp_product_exponents():
    return tuple(sorted({a + b for a in GASP_A_EXPONENTS for b in GASP_B_EXPONENTS}))


def build_gasp33x2(field=None, seed=0, max_tries=200):
    """GASP with ``m = n = 3``, ``p = 1``, ``X = 2`` on 18 random evaluation points.

    Points are redrawn until the 18 x 18 product-exponent matrix is
    invertible and both security subcodes are MDS.
    """
    field = PrimeField(MERSENNE_61) if field is None else field
    if field.order <= GASP_N:
        raise InvalidParams(f"{field!r} is too small for 18 distinct nonzero points")
    rng = np.random.default_rng(seed)
    eta = gasp_product_exponents()
    for _ in range(max_tries):
        pts = rng.integers(1, field.order, size=GASP_N, dtype=np.int64)
        if len(set(pts.tolist())) != GASP_N:
            continue
        h = codes.evaluation_matrix(field, pts, eta)
        if linalg.rank(field, h) < GASP_N:
            continue
        F = codes.evaluation_matrix(field, pts, GASP_A_EXPONENTS)
        G = codes.evaluation_matrix(field, pts, GASP_B_EXPONENTS)
        if not (codes.is_mds(codes.LinearCode(field, F[3:])) and codes.is_mds(codes.LinearCode(field, G[3:]))):
            continue
        return SdmmScheme(
            field, PartitionSpec(3, 3, 1), 2, F, G, name="gasp33x2",
            grs=codes.grs_spec(field, pts.tolist(), GASP_N),
        )
    raise ConstructionFailed(f"no admissible GASP evaluation points in {max_tries} draws over {field!r}")


def build_dft(field, p, X):
    """DFT scheme: ``N = p + 2X`` workers at the powers of a primitive N-th root of unity."""
    p, X = int(p), int(X)
    if p < 1 or X < 0:
        raise InvalidParams("DFT scheme needs p >= 1 and X >= 0")
    N = p + 2 * X
    zeta = int(primitive_root_of_unity(field, N))
    points = [pow(zeta, i, field.order) for i in range(N)]
    F = codes.evaluation_matrix(field, points, range(p + X))
    G = codes.evaluation_matrix(field, points, [-j for j in range(p)] + [-(p + X + k) for k in range(X)])
    return SdmmScheme(field, PartitionSpec(1, 1, p), X, F, G, name="dft", grs=codes.grs_spec(field, points, N))


def default_dft_prime(N):
    """65537 when it supports an N-th root of unity, else the least prime above 2**16 that does."""
    from sympy import isprime

    q = DEFAULT_PRIME
    while (q - 1) % N or not isprime(q):
        q += 1
    return q


def hermitian_places():
    """Affine GF(4) points of ``y^2 + y = x^3`` other than (0, 0), in lexicographic order."""
    f = GF4()
    pts = []
    for x, y in product(range(4), repeat=2):
        lhs = f.add(f.mul(y, y), y)
        rhs = f.mul(f.mul(x, x), x)
        if int(lhs) == int(rhs) and (x, y) != (0, 0):
            pts.append((x, y))
    return pts


def build_hermitian():
    """The length-7 Hermitian-curve scheme over GF(4): ``p = 2``, ``X = 1``, basis ``{1, x, y}``."""
    f = GF4()
    places = hermitian_places()
    xs = np.array([x for x, _ in places], dtype=np.int64)
    ys = np.array([y for _, y in places], dtype=np.int64)
    gen = np.stack([np.ones_like(xs), xs, ys])
    return SdmmScheme(f, PartitionSpec(1, 1, 2), 1, gen, gen.copy(), name="hermitian")


# -- randomized MatDot -------------------------------------------------------

@dataclass
class DiagonalMask:
    """Per-worker invertible diagonals, stored as their diagonal entries."""

    u: np.ndarray  # (N, t/m)
    v: np.ndarray  # (N, r/n)

    @classmethod
    def draw(cls, field, n_workers, rows, cols, rng):
        return cls(field.random_nonzero((n_workers, rows), rng), field.random_nonzero((n_workers, cols), rng))


def randomize_matdot(scheme, shares, rng):
    """Mask MatDot shares: worker ``i`` gets ``U_i^-1 A_i`` and ``B_i V_i^-1``.

    A fresh mask is drawn on every call.
    """
    if not scheme.name.startswith("matdot"):
        raise InvalidParams("diagonal masking is defined for MatDot schemes")
    f = scheme.field
    mask = DiagonalMask.draw(f, scheme.N, shares.a_shares.shape[1], shares.b_shares.shape[2], rng)
    a = f.mul(shares.a_shares, f.inv(mask.u)[:, :, None])
    b = f.mul(shares.b_shares, f.inv(mask.v)[:, None, :])
    return ShareSet(a, b, shares.a_pad, shares.b_pad), mask


def unmask_responses(field, responses, mask):
    """Multiply response ``i`` by ``U_i`` on the left and ``V_i`` on the right.

    Honest responses become plain MatDot responses; an error ``Z_i`` becomes
    ``U_i Z_i V_i``.
    """
    out = field.mul(field.mul(responses.responses, mask.u[:, :, None]), mask.v[:, None, :])
    return ResponseSet(out, responses.status, responses.ground_truth())


# -- recipes -----------------------------------------------------------------

FAMILIES = ("matdot", "gasp33x2", "dft", "hermitian", "rmatdot")


@dataclass(frozen=True)
class SchemeRecipe:
    family: str
    params: dict = dc_field(default_factory=dict)

    @property
    def randomized(self):
        return self.family == "rmatdot"

    def __str__(self):
        if not self.params:
            return self.family
        return self.family + ":" + ",".join(f"{k}={v}" for k, v in self.params.items())

    def default_field(self):
        if "q" in self.params:
            return PrimeField(self.params["q"])
        if self.family == "hermitian":
            return GF4()
        if self.family == "gasp33x2":
            return PrimeField(MERSENNE_61)
        if self.family == "dft":
            return PrimeField(default_dft_prime(self._int("p") + 2 * self._int("X")))
        return PrimeField(DEFAULT_PRIME)

    def _int(self, key, default=None):
        if key not in self.params:
            if default is None:
                raise InvalidParams(f"recipe {self} lacks parameter {key!r}")
            return default
        return int(self.params[key])

    def build(self, field=None):
        field = self.default_field() if field is None else field
        if self.family in ("matdot", "rmatdot"):
            return build_matdot(field, self._int("p"), self._int("X"), self._int("N"))
        if self.family == "gasp33x2":
            return build_gasp33x2(field, self._int("seed", 0))
        if self.family == "dft":
            return build_dft(field, self._int("p"), self._int("X"))
        if self.family == "hermitian":
            if not isinstance(field, GF4):
                raise InvalidParams("the Hermitian scheme is defined over GF(4)")
            return build_hermitian()
        raise InvalidParams(f"unknown scheme family {self.family!r}")


def parse_recipe(text):
    text = text.strip()
    family, _, rest = text.partition(":")
    family = family.strip().lower()
    if family not in FAMILIES:
        raise InvalidParams(f"unknown scheme family {family!r}; expected one of {', '.join(FAMILIES)}")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise InvalidParams(f"bad recipe parameter {item!r}")
        try:
            params[key.strip()] = int(value)
        except ValueError as exc:
            raise InvalidParams(f"recipe parameter {item!r} is not an integer") from exc
    return SchemeRecipe(family, params)
