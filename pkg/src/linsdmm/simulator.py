"""Round simulation with stragglers and Byzantine workers, and Monte Carlo drivers."""
import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.stats import binomtest

from . import byzantine, core, schemes
from .errors import InsufficientData, InsufficientResponses, InvalidParams, PipelineFailure

MODELS = ("uniform", "fixed", "low_rank", "zero_mimic")

CLEAN = "clean"
CORRECTED = "corrected"
DETECTED = "detected"
FAILURE = "failure"
INSUFFICIENT = "insufficient"

CSV_COLUMNS = (
    "trial", "scheme", "N", "R", "X", "S", "E", "ell", "verdict", "oracle_match",
    "located_correct", "phase_encode_us", "phase_worker_us", "phase_decode_us",
)


@dataclass(frozen=True)
class FaultPlan:
    """Which workers straggle, which lie, and how the liars pick their errors.

    ``model`` is one of ``uniform``, ``fixed`` (every liar adds ``z``; default
    all-ones), ``low_rank`` (errors of rank ``rank``) and ``zero_mimic``
    (liars answer with the zero matrix).
    """

    stragglers: frozenset = frozenset()
    byzantine: frozenset = frozenset()
    model: str = "uniform"
    z: object = None
    rank: int = 1

    def __post_init__(self):
        object.__setattr__(self, "stragglers", frozenset(int(i) for i in self.stragglers))
        object.__setattr__(self, "byzantine", frozenset(int(i) for i in self.byzantine))
        if self.stragglers & self.byzantine:
            raise InvalidParams("straggler and Byzantine sets must be disjoint")
        if self.model not in MODELS:
            raise InvalidParams(f"unknown error model {self.model!r}")
        if self.rank < 1:
            raise InvalidParams("low-rank errors need rank >= 1")

    def validate(self, n_workers):
        everyone = self.stragglers | self.byzantine
        if everyone and (min(everyone) < 0 or max(everyone) >= n_workers):
            raise InvalidParams(f"fault plan names workers outside 0..{n_workers - 1}")

    @classmethod
    def sample(cls, n_workers, s, e, rng, **kw):
        if s + e > n_workers:
            raise InvalidParams(f"S + E = {s + e} exceeds N = {n_workers}")
        picked = rng.permutation(n_workers)[: s + e]
        return cls(frozenset(picked[:s].tolist()), frozenset(picked[s:].tolist()), **kw)


def draw_error(field, shape, plan, rng):
    """One nonzero additive error (or None for ``zero_mimic``)."""
    if plan.model == "uniform":
        while True:
            z = field.random(shape, rng)
            if z.any():
                return z
    if plan.model == "fixed":
        z = np.ones(shape, dtype=np.int64) if plan.z is None else field.asarray(plan.z)
        if z.shape != shape:
            raise InvalidParams(f"fixed error has shape {z.shape}, responses are {shape}")
        return z
    if plan.model == "low_rank":
        r = min(plan.rank, *shape)
        while True:
            z = field.matmul(field.random((shape[0], r), rng), field.random((r, shape[1]), rng))
            if z.any():
                return z
    return None


def apply_plan(field, responses, plan, rng):
    out = responses.responses.copy()
    status = list(responses.status)
    for i in sorted(plan.stragglers):
        out[i] = 0
        status[i] = core.STRAGGLER
    for i in sorted(plan.byzantine):
        z = draw_error(field, out.shape[1:], plan, rng)
        out[i] = 0 if z is None else field.add(out[i], z)
    return core.ResponseSet(out, tuple(status), plan.byzantine)


@dataclass
class RoundReport:
    verdict: str
    oracle_match: bool
    located: frozenset
    truth: frozenset
    corrupted: frozenset
    N: int
    R: int
    X: int
    S: int
    E: int
    ell: int
    timings_us: dict = dc_field(default_factory=dict)
    decoded: np.ndarray = None
    diagnostic: dict = dc_field(default_factory=dict)

    @property
    def success(self):
        return self.decoded is not None

    @property
    def located_correct(self):
        """No honest worker accused and every worker whose answer was actually wrong found."""
        return self.located <= self.truth and self.corrupted <= self.located


def default_dims(scheme, block=3):
    ps = scheme.partition
    return block * ps.m, block * ps.p, block * ps.n


def _locate(scheme, resp, ell, decoder):
    if decoder == "collaborative":
        return byzantine.byzantine_pipeline(resp, scheme, ell)
    if decoder == "independent":
        return byzantine.independent_decode(resp, scheme)
    raise InvalidParams(f"unknown decoder {decoder!r}")


def run_round(scheme, a, b, plan, ell, rng, randomized=False, decoder="collaborative", R=None):
    """Encode, compute, inject faults, clean up, decode, and compare with ``a @ b``."""
    f = scheme.field
    plan.validate(scheme.N)
    R = core.recovery_threshold(scheme) if R is None else R
    clock = time.perf_counter_ns
    t0 = clock()
    shares = core.encode(scheme, a, b, rng)
    mask = None
    if randomized:
        shares, mask = schemes.randomize_matdot(scheme, shares, rng)
    t1 = clock()
    honest = core.honest_responses(scheme, shares)
    t2 = clock()
    faulty = apply_plan(f, honest, plan, rng)
    corrupted = frozenset(
        i for i in plan.byzantine if np.any(faulty.responses[i] != honest.responses[i])
    )
    if mask is not None:
        faulty = schemes.unmask_responses(f, faulty, mask)

    verdict, located, decoded, diag = CLEAN, frozenset(), None, {}
    resp = faulty.for_decoder()
    try:
        if scheme.grs is not None:
            cleaned, located = _locate(scheme, resp, ell, decoder)
            verdict = CORRECTED if located else CLEAN
        else:
            synd = byzantine.star_syndromes(scheme, resp.entry_vectors(), resp.indices(core.STRAGGLER))
            if synd.any():
                raise PipelineFailure("errors detected; this code has no error locator", {"detected": True})
            cleaned = resp
        decoded = core.decode(scheme, cleaned)
    except PipelineFailure as exc:
        verdict = DETECTED if exc.diagnostic.get("detected") else FAILURE
        diag = dict(exc.diagnostic)
    except (InsufficientResponses, InsufficientData) as exc:
        verdict, diag = INSUFFICIENT, {"message": str(exc)}
    t3 = clock()
    match = decoded is not None and bool(np.array_equal(decoded, f.matmul(a, b)))
    return RoundReport(
        verdict, match, frozenset(located), plan.byzantine, corrupted,
        scheme.N, R, scheme.X, len(plan.stragglers), len(plan.byzantine), ell,
        {"encode": (t1 - t0) // 1000, "worker": (t2 - t1) // 1000, "decode": (t3 - t2) // 1000},
        decoded, diag,
    )


@dataclass(frozen=True)
class Experiment:
    """Everything a trial needs, picklable so trials can run in worker processes."""

    recipe: str
    S: int = 0
    E: int = 0
    ell: int = None
    model: str = "uniform"
    rank: int = 1
    decoder: str = "collaborative"
    block: int = 3
    field_spec: object = None

    def build(self):
        from .galois import field_from_spec

        recipe = schemes.parse_recipe(self.recipe)
        fld = None if self.field_spec is None else field_from_spec(self.field_spec)
        return recipe, recipe.build(fld)


def default_ell(scheme):
    """``D - 2`` (at least 1)."""
    d = scheme.N - core.recovery_threshold(scheme) + 1
    return max(1, d - 2)


def run_trial(exp, scheme, trial, seed, randomized, R, ell):
    rng = np.random.default_rng([seed, trial])
    plan = FaultPlan.sample(scheme.N, exp.S, exp.E, rng, model=exp.model, rank=exp.rank)
    t, s, r = default_dims(scheme, exp.block)
    a = scheme.field.random((t, s), rng)
    b = scheme.field.random((s, r), rng)
    return run_round(scheme, a, b, plan, ell, rng, randomized, exp.decoder, R)


def _run_chunk(args):
    exp, trials, seed = args
    recipe, scheme = exp.build()
    R = core.recovery_threshold(scheme)
    ell = exp.ell or default_ell(scheme)
    return [(t, run_trial(exp, scheme, t, seed, recipe.randomized, R, ell)) for t in trials]


@dataclass
class MonteCarloResult:
    experiment: Experiment
    reports: list
    failures: int
    rate: float
    interval: tuple
    mean_timings_us: dict

    @property
    def trials(self):
        return len(self.reports)


def monte_carlo(exp, trials, seed, threads=1):
    """Run ``trials`` independent rounds; trial ``i`` draws from ``default_rng([seed, i])``.

    Serial and parallel runs give identical reports.  A trial fails unless
    the decoded product equals the direct product.
    """
    if trials < 1:
        raise InvalidParams("need at least one trial")
    if threads > 1:
        chunks = [list(range(i, trials, threads)) for i in range(threads)]
        with ProcessPoolExecutor(threads) as pool:
            parts = pool.map(_run_chunk, [(exp, c, seed) for c in chunks if c])
        pairs = sorted((p for part in parts for p in part), key=lambda p: p[0])
    else:
        pairs = _run_chunk((exp, range(trials), seed))
    reports = [r for _, r in pairs]
    failures = sum(not r.oracle_match for r in reports)
    ci = binomtest(failures, trials).proportion_ci(confidence_level=0.95, method="wilson")
    means = {k: float(np.mean([r.timings_us[k] for r in reports])) for k in ("encode", "worker", "decode")}
    return MonteCarloResult(exp, reports, failures, failures / trials, (ci.low, ci.high), means)


def write_csv(fh, result, scheme_label, timings=False):
    """CSV body; timing columns are zero unless ``timings`` so bodies are reproducible."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for trial, r in enumerate(result.reports):
        t = r.timings_us if timings else {"encode": 0, "worker": 0, "decode": 0}
        w.writerow([
            trial, scheme_label, r.N, r.R, r.X, r.S, r.E, r.ell, r.verdict,
            int(r.oracle_match), int(r.located_correct), t["encode"], t["worker"], t["decode"],
        ])
