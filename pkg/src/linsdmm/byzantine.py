"""Locating and removing Byzantine responses.

Each response entry, read across workers, is a word of the star-product code;
a Byzantine worker corrupts the same coordinate of every such word.  When the
star-product code is GRS we

1. compute syndromes of every entry word (stragglers punctured away),
2. take the first ``ell`` words with nonzero syndrome as one interleaved word,
3. find their common error support with a joint locator, and
4. erase the located workers and decode from the rest.

Erasures are always handled by puncturing: a punctured GRS code is again GRS,
so every decoder here sees an erasure-free problem.
"""
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import core, linalg
from .errors import InsufficientData, InvalidParams, PipelineFailure
from .galois import GF4, PrimeField

CORRECTED = "corrected"
FAILURE = "failure"


class _Ops:
    """Scalar arithmetic on plain ints; much cheaper than numpy for short loops."""

    def __init__(self, field):
        if isinstance(field, PrimeField):
            p = field.p
            self.add = lambda a, b: (a + b) % p
            self.sub = lambda a, b: (a - b) % p
            self.mul = lambda a, b: (a * b) % p
            self.inv = lambda a: pow(a, p - 2, p)
        elif isinstance(field, GF4):
            mt, it = GF4.mul_table, (0, 1, 3, 2)
            self.add = self.sub = lambda a, b: a ^ b
            self.mul = lambda a, b: int(mt[a, b])
            self.inv = lambda a: it[a]
        else:
            raise InvalidParams(f"unsupported field {field!r}")

    def poly_eval(self, coeffs, x):
        """Horner evaluation, ``coeffs`` from highest degree down."""
        acc = 0
        for c in coeffs:
            acc = self.add(self.mul(acc, x), c)
        return acc


@dataclass
class DecodeOutcome:
    verdict: str
    locations: tuple = ()
    rows: np.ndarray = None
    info: dict = dc_field(default_factory=dict)

    @property
    def ok(self):
        return self.verdict == CORRECTED


@dataclass
class InterleavedWord:
    rows: np.ndarray  # (ell, N)
    erasures: tuple = ()


def _kept(grs, erasures):
    erased = set(int(e) for e in erasures)
    return [i for i in range(grs.length) if i not in erased]


def parity_check(grs, erasures=()):
    """Parity-check matrix of the GRS code punctured at ``erasures``.

    Returns ``(H, kept)`` with ``H`` of shape ``(len(kept) - k, len(kept))``;
    its rows are ``nu'_i * alpha_i ** j`` with
    ``nu'_i = 1 / (nu_i * prod_{j != i} (alpha_i - alpha_j))``.
    """
    f = grs.field
    kept = _kept(grs, erasures)
    n, k = len(kept), grs.k
    if n < k:
        raise InsufficientData(f"{n} unerased positions cannot determine a dimension-{k} codeword")
    alpha = f.asarray([grs.points[i] for i in kept])
    nu = f.asarray([grs.multipliers[i] for i in kept])
    diffs = f.sub(alpha[:, None], alpha[None, :])
    np.fill_diagonal(diffs, 1)
    prod = nu.copy()
    for j in range(n):
        prod = f.mul(prod, diffs[:, j])
    dual_nu = f.inv(prod)
    rows = [f.mul(dual_nu, f.pow(alpha, j)) for j in range(n - k)]
    h = np.stack(rows) if rows else f.zeros((0, n))
    return h, kept


def rs_syndrome(word, grs, erasures=()):
    """Syndrome(s) of the punctured word(s); zero iff the word is in the punctured code.

    ``word`` may be a single length-N vector or a stack of them.
    """
    h, kept = parity_check(grs, erasures)
    w = np.asarray(word, dtype=np.int64)
    single = w.ndim == 1
    w2 = np.atleast_2d(w)[:, kept]
    s = grs.field.matmul(w2, h.T)
    return s[0] if single else s


def star_syndromes(scheme, words, erasures=()):
    """Syndromes against the punctured star-product code of any scheme (detection only)."""
    f = scheme.field
    code = scheme.star_code
    kept = [i for i in range(code.length) if i not in set(erasures)]
    checks = linalg.nullspace(f, code.basis[:, kept])
    return f.matmul(np.atleast_2d(words)[:, kept], checks.T)


def berlekamp_massey(ops, seq):
    """Shortest LFSR ``(C, L)`` generating ``seq``; ``C[0] == 1``."""
    c, b = [1], [1]
    length, shift, last = 0, 1, 1
    for n, s in enumerate(seq):
        d = s
        for i in range(1, length + 1):
            d = ops.add(d, ops.mul(c[i], seq[n - i]))
        if d == 0:
            shift += 1
            continue
        coef = ops.mul(d, ops.inv(last))
        new = c + [0] * max(0, len(b) + shift - len(c))
        for i, bi in enumerate(b):
            new[i + shift] = ops.sub(new[i + shift], ops.mul(coef, bi))
        if 2 * length <= n:
            b, last, length, shift = c, d, n + 1 - length, 1
        else:
            shift += 1
        c = new
    return c[: length + 1] + [0] * max(0, length + 1 - len(c)), length


def _roots(ops, locator, alphas):
    """Indices ``i`` with ``alpha_i`` a root of ``x^L * locator(1/x)``."""
    # the reversed polynomial has the locator's coefficients in order, highest degree first
    return [i for i, a in enumerate(alphas) if ops.poly_eval(locator, a) == 0]


def _error_values(field, alphas, positions, syndromes):
    """Solve ``sum_i Y_i alpha_i^j = S_j`` for ``j < t``; one column per syndrome row."""
    t = len(positions)
    if t == 0:
        return field.zeros((0, syndromes.shape[0]))
    x = field.asarray([alphas[i] for i in positions])
    vand = np.stack([field.pow(x, j) for j in range(t)])
    return linalg.solve_right(field, vand, syndromes[:, :t].T)


def _finish(grs, words, erasures, kept, positions, values):
    """Apply corrections, check syndromes, re-encode erased coordinates."""
    f = grs.field
    h, _ = parity_check(grs, erasures)
    alpha = f.asarray([grs.points[i] for i in kept])
    nu = f.asarray([grs.multipliers[i] for i in kept])
    diffs = f.sub(alpha[:, None], alpha[None, :])
    np.fill_diagonal(diffs, 1)
    prod = nu.copy()
    for j in range(len(kept)):
        prod = f.mul(prod, diffs[:, j])
    # error e_i = Y_i / nu'_i = Y_i * nu_i * prod_{j != i}(alpha_i - alpha_j)
    punct = words[:, kept].copy()
    for col, pos in enumerate(positions):
        e = f.mul(values[col], prod[pos])
        punct[:, pos] = f.sub(punct[:, pos], e)
    if h.shape[0] and np.any(f.matmul(punct, h.T)):
        return None
    if len(kept) == grs.length:
        return punct
    gen = grs.generator()
    info = kept[: grs.k]
    coeffs = linalg.solve_left(f, gen[:, info], punct[:, : grs.k])
    return f.matmul(coeffs, gen)


def bd_decode(word, grs, erasures=()):
    """Bounded-distance decoding of one word: corrects ``E`` errors when ``2E + S <= D - 1``."""
    f = grs.field
    ops = _Ops(f)
    word = np.asarray(word, dtype=np.int64)
    h, kept = parity_check(grs, erasures)
    synd = [int(v) for v in f.matmul(word[None, kept], h.T)[0]]
    redundancy = len(synd)
    if not any(synd):
        return DecodeOutcome(CORRECTED, (), _finish(grs, word[None, :], erasures, kept, [], [])[0])
    locator, length = berlekamp_massey(ops, synd)
    if 2 * length > redundancy:
        return DecodeOutcome(FAILURE, info={"locator_degree": length})
    alphas = [grs.points[i] for i in kept]
    positions = _roots(ops, locator, alphas)
    if len(positions) != length:
        return DecodeOutcome(FAILURE, info={"locator_degree": length, "roots": len(positions)})
    values = _error_values(f, alphas, positions, np.array([synd], dtype=np.int64))
    fixed = _finish(grs, word[None, :], erasures, kept, positions, values)
    if fixed is None:
        return DecodeOutcome(FAILURE, info={"locator_degree": length, "reverify": False})
    return DecodeOutcome(CORRECTED, tuple(kept[i] for i in positions), fixed[0], {"locator_degree": length})


def collaborative_decode(iw, grs):
    """Joint error location for an interleaved word with a common error support.

    Finds the least ``t`` for which a single connection polynomial of degree
    ``t`` generates every row's syndrome sequence, i.e. the shortest common
    linear recurrence, by solving the stacked key equations directly.  The
    answer must be unique (syndrome matrix of full rank ``t``), its roots must
    be ``t`` distinct positions, and the corrected rows must re-verify;
    anything else is a failure, never a silent miscorrection.
    """
    f = grs.field
    ops = _Ops(f)
    words = np.atleast_2d(np.asarray(iw.rows, dtype=np.int64))
    ell = words.shape[0]
    h, kept = parity_check(grs, iw.erasures)
    synd = f.matmul(words[:, kept], h.T)
    redundancy = synd.shape[1]
    if not np.any(synd):
        return DecodeOutcome(CORRECTED, (), _finish(grs, words, iw.erasures, kept, [], []), {"t": 0})
    t_max = (ell * redundancy) // (ell + 1)
    locator = None
    for t in range(1, t_max + 1):
        # rows j = t .. redundancy-1 of each sequence:  sum_l L_l S_{j-l} = -S_j
        mat = np.concatenate([
            np.stack([synd[r, j - t:j][::-1] for j in range(t, redundancy)]) for r in range(ell)
        ])
        rhs = f.neg(np.concatenate([synd[r, t:redundancy] for r in range(ell)]))
        red, piv = linalg.rref(f, np.hstack([mat, rhs[:, None]]))
        if piv and piv[-1] == t:
            continue  # inconsistent: no common recurrence of this length
        if len(piv) < t:
            return DecodeOutcome(FAILURE, info={"t": t, "locator_rank": len(piv)})
        locator = [1] + [int(v) for v in red[:t, t]]
        break
    if locator is None:
        return DecodeOutcome(FAILURE, info={"t": t_max + 1, "locator_rank": None})
    t = len(locator) - 1
    alphas = [grs.points[i] for i in kept]
    positions = _roots(ops, locator, alphas)
    if len(positions) != t:
        return DecodeOutcome(FAILURE, info={"t": t, "locator_rank": t, "roots": len(positions)})
    values = _error_values(f, alphas, positions, synd)
    fixed = _finish(grs, words, iw.erasures, kept, positions, values)
    if fixed is None:
        return DecodeOutcome(FAILURE, info={"t": t, "locator_rank": t, "reverify": False})
    return DecodeOutcome(CORRECTED, tuple(kept[i] for i in positions), fixed, {"t": t, "locator_rank": t})


def byzantine_pipeline(responses, scheme, ell, max_passes=None):
    """Screen, locate and erase Byzantine workers.

    Returns ``(cleaned, located)`` where ``cleaned`` marks located workers as
    flagged; ``core.decode(scheme, cleaned)`` then decodes from the rest.
    A located set that leaves nonzero syndromes behind triggers another pass
    over the remaining workers.
    """
    grs = scheme.grs
    if grs is None:
        raise InvalidParams(f"{scheme.name}: error location needs a GRS star-product code")
    if ell < 1:
        raise InvalidParams("interleaving order must be at least 1")
    resp = responses.for_decoder()
    words = resp.entry_vectors()
    status = list(resp.status)
    located = set()
    passes = max_passes or scheme.N
    for _ in range(passes):
        erased = [i for i, st in enumerate(status) if st != core.OK]
        synd = rs_syndrome(words, grs, erased)
        dirty = np.flatnonzero(np.any(synd != 0, axis=1))
        if dirty.size == 0:
            return responses.with_status(status), frozenset(located)
        chosen = dirty[:ell]
        outcome = collaborative_decode(InterleavedWord(words[chosen], tuple(erased)), grs)
        diag = {"screened": int(dirty.size), "selected": int(chosen.size), **outcome.info}
        if not outcome.ok:
            raise PipelineFailure("collaborative decoding failed", diag)
        if not outcome.locations:
            raise PipelineFailure("locator found no positions despite nonzero syndromes", diag)
        for i in outcome.locations:
            status[i] = core.FLAGGED
            located.add(i)
    raise PipelineFailure("error support not cleared", {"passes": passes, "located": sorted(located)})


def independent_decode(responses, scheme):
    """Baseline: bounded-distance decode every entry word on its own.

    Returns corrected responses (all non-stragglers OK) and the union of the
    per-word error locations.  Raises :class:`PipelineFailure` if any word fails.
    """
    grs = scheme.grs
    if grs is None:
        raise InvalidParams(f"{scheme.name}: bounded-distance decoding needs a GRS star-product code")
    resp = responses.for_decoder()
    words = resp.entry_vectors()
    erased = [i for i, st in enumerate(resp.status) if st != core.OK]
    fixed = np.empty_like(words)
    located = set()
    for e, w in enumerate(words):
        out = bd_decode(w, grs, erased)
        if not out.ok:
            raise PipelineFailure("bounded-distance decoding failed", {"entry": e, **out.info})
        fixed[e] = out.rows
        located.update(out.locations)
    cube = fixed.T.reshape(resp.responses.shape)
    return core.ResponseSet(cube, resp.status, responses.ground_truth()), frozenset(located)


def failure_bound_exact(q, ell, D):
    """Upper bound on collaborative decoding failure for uniform errors, as a Fraction."""
    if ell < 1 or D < 2:
        raise InvalidParams("need ell >= 1 and D >= 2")
    q = Fraction(q)
    first = (q ** ell - 1 / q) / (q ** ell - 1)
    return first ** (D - 2) * q ** (D - 2 - ell) / (q - 1)


def failure_bound(q, ell, D):
    return float(failure_bound_exact(q, ell, D))


def freivalds_batch(field, a, b, claimed, trials, rng):
    """Freivalds' test on a stack of products: True where ``a @ b == claimed`` passed every probe.

    Probes are uniform over the whole field, so a wrong claim survives one
    probe with probability at most ``1/q``.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    claimed = np.asarray(claimed, dtype=np.int64)
    passed = np.ones(a.shape[:-2], dtype=bool)
    for _ in range(trials):
        x = field.random(b.shape[:-2] + (b.shape[-1], 1), rng)
        lhs = field.matmul(a, field.matmul(b, x))
        rhs = field.matmul(claimed, x)
        passed &= np.all(lhs == rhs, axis=(-2, -1))
    return passed


def freivalds_check(field, a, b, claimed, trials, rng):
    return bool(freivalds_batch(field, a, b, claimed, trials, rng))
