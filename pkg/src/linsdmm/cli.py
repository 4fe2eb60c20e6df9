"""``linsdmm`` command-line interface."""
import argparse
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import __version__, audit, byzantine, core, simulator
from .errors import (
    ConstructionFailed,
    InsufficientData,
    InsufficientResponses,
    NoRootOfUnity,
    NotDecodable,
    PipelineFailure,
    SdmmError,
    TooLarge,
)
from .galois import field_from_spec
from .schemes import parse_recipe

EXIT_OK, EXIT_USAGE, EXIT_CONSTRUCTION, EXIT_PIPELINE = 0, 2, 3, 4
DEFAULT_TRIALS = {"simulate": 1000, "bench-decoder": 200}


class UsageError(Exception):
    pass


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _header(fh, args):
    """Provenance block: version, every parsed option, master seed."""
    fh.write(f"# linsdmm {__version__}\n")
    fh.write(f"# command: {args.command}\n")
    for key, value in sorted(vars(args).items()):
        if key not in ("command", "func", "seed"):
            fh.write(f"# {key}: {value}\n")
    fh.write(f"# seed: {getattr(args, 'seed', None)}\n")


def _field(args):
    return None if args.field is None else field_from_spec(args.field)


def _build(args):
    recipe = parse_recipe(args.recipe)
    return recipe, recipe.build(_field(args))


def _dims(text):
    parts = [int(x) for x in text.split(",")]
    if len(parts) != 3 or min(parts) < 1:
        raise argparse.ArgumentTypeError("expected t,s,r with positive entries")
    return tuple(parts)


def _index_list(text):
    return frozenset(int(x) for x in text.split(",") if x.strip()) if text else frozenset()


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _print_bounds(fh, bounds):
    for b in bounds:
        status = "applies" if b.applies else "n/a"
        note = f"  [{b.note}]" if b.note else ""
        fh.write(f"{b.key}\t{b.value}\t{status}\t{b.description}{note}\n")


def cmd_scheme_info(args):
    recipe, scheme = _build(args)
    dims = args.dims or simulator.default_dims(scheme)
    R, bounds = core.scheme_bounds(scheme, dims)
    with _output(args.out) as fh:
        _header(fh, args)
        fh.write(f"scheme\t{recipe}\n")
        fh.write(f"field\t{scheme.field!r}\n")
        for key, value in (
            ("N", scheme.N), ("R", R), ("X", scheme.X),
            ("D", scheme.N - R + 1),
            ("dim_C_A", scheme.code_a.rank), ("dim_C_B", scheme.code_b.rank),
            ("dim_star", scheme.star_code.rank),
            ("security", core.is_x_secure(scheme)),
        ):
            fh.write(f"{key}\t{value}\n")
        _print_bounds(fh, bounds)
    return EXIT_OK


def cmd_bounds(args):
    dims = args.dims
    bounds = core.bounds_report(
        args.m, args.n, args.p, args.X, args.N, args.sec_mds, args.stragglers, args.codes_mds,
        dims, args.R,
    )
    with _output(args.out) as fh:
        _header(fh, args)
        _print_bounds(fh, bounds)
        for b in bounds:
            if b.note.startswith("violated"):
                sys.stderr.write(f"warning: {b.note}\n")
    return EXIT_OK


def _single_run(args, recipe, scheme):
    f = scheme.field
    with open(args.a) as fh:
        a, qa = core.read_matrix(fh)
    with open(args.b) as fh:
        b, qb = core.read_matrix(fh)
    if qa != f.order or qb != f.order:
        raise UsageError(f"matrix files are over GF({qa}) / GF({qb}), scheme is over {f!r}")
    plan = simulator.FaultPlan(args.straggler_set, args.byzantine_set, args.model, rank=args.rank)
    rng = np.random.default_rng(args.seed)
    ell = args.ell or simulator.default_ell(scheme)
    report = simulator.run_round(scheme, a, b, plan, ell, rng, recipe.randomized, args.decoder)
    sys.stdout.write(f"verdict {report.verdict}; located {sorted(report.located)}\n")
    if not report.success:
        sys.stderr.write(f"decoding failed: {report.diagnostic}\n")
        return EXIT_PIPELINE
    if args.product_out:
        with open(args.product_out, "w") as fh:
            core.write_matrix(fh, report.decoded, f.order)
    return EXIT_OK


def cmd_simulate(args):
    recipe, scheme = _build(args)
    if args.a or args.b:
        if not (args.a and args.b):
            raise UsageError("single-run mode needs both --a and --b")
        return _single_run(args, recipe, scheme)
    exp = simulator.Experiment(
        str(recipe), args.S, args.E, args.ell, args.model, args.rank, args.decoder, args.block, args.field,
    )
    result = simulator.monte_carlo(exp, args.trials, args.seed, args.threads)
    R = result.reports[0].R
    d = scheme.N - R + 1 - args.S  # stragglers are punctured before locating errors
    ell = result.reports[0].ell
    ref = byzantine.failure_bound(scheme.field.order, ell, d) if d >= 2 else float("nan")
    with _output(args.out) as fh:
        _header(fh, args)
        simulator.write_csv(fh, result, str(recipe), args.timings)
    lo, hi = result.interval
    sys.stderr.write(
        f"failures {result.failures}/{result.trials} rate {result.rate:.6g} "
        f"wilson95 [{lo:.6g}, {hi:.6g}] failure_bound(q={scheme.field.order}, ell={ell}, D={d}) {ref:.6g}\n"
    )
    return EXIT_OK


def cmd_audit(args):
    _, scheme = _build(args)
    size = scheme.X if args.collusion is None else args.collusion
    rows = audit.leakage_report(scheme, size)
    with _output(args.out) as fh:
        _header(fh, args)
        audit.write_report_csv(fh, rows)
    return EXIT_OK


def cmd_bench_decoder(args):
    """Time the collaborative decoder against per-entry bounded-distance decoding."""
    _, scheme = _build(args)
    rng = np.random.default_rng(args.seed)
    t, s, r = args.dims or simulator.default_dims(scheme)
    ell = args.ell or simulator.default_ell(scheme)
    timings = {"collaborative": [], "independent": []}
    wins = {"collaborative": 0, "independent": 0}
    for _ in range(args.trials):
        plan = simulator.FaultPlan.sample(scheme.N, args.S, args.E, rng)
        a, b = scheme.field.random((t, s), rng), scheme.field.random((s, r), rng)
        shares = core.encode(scheme, a, b, rng)
        resp = simulator.apply_plan(scheme.field, core.honest_responses(scheme, shares), plan, rng).for_decoder()
        for name in timings:
            start = time.perf_counter()
            try:
                cleaned, _ = simulator._locate(scheme, resp, ell, name)
                ok = np.array_equal(core.decode(scheme, cleaned), scheme.field.matmul(a, b))
            except (PipelineFailure, InsufficientResponses, InsufficientData):
                ok = False
            timings[name].append(time.perf_counter() - start)
            wins[name] += ok
    with _output(args.out) as fh:
        _header(fh, args)
        fh.write("decoder,trials,successes,mean_us\n")
        for name, ts in timings.items():
            fh.write(f"{name},{args.trials},{wins[name]},{1e6 * float(np.mean(ts)):.1f}\n")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=_positive, default=None, help="number of rounds (default 1000; 200 for bench-decoder)")
    common.add_argument("--ell", type=_positive, default=None, help="interleaving order (default D-2)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--threads", type=_positive, default=1)
    common.add_argument("--field", default=None, help="prime modulus or gf4 (default per scheme)")

    parser = argparse.ArgumentParser(prog="linsdmm", description=__doc__)
    parser.add_argument("--version", action="version", version=f"linsdmm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scheme-info", parents=[common], help="parameters, bounds and security verdict")
    p.add_argument("recipe")
    p.add_argument("--dims", type=_dims, default=None, help="t,s,r for the communication cost")
    p.set_defaults(func=cmd_scheme_info)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo rounds with faults, CSV out")
    p.add_argument("recipe")
    p.add_argument("--S", type=int, default=0, help="stragglers per round")
    p.add_argument("--E", type=int, default=0, help="Byzantine workers per round")
    p.add_argument("--model", choices=simulator.MODELS, default="uniform")
    p.add_argument("--rank", type=_positive, default=1, help="rank for low_rank errors")
    p.add_argument("--decoder", choices=("collaborative", "independent"), default="collaborative")
    p.add_argument("--block", type=_positive, default=3, help="block side length")
    p.add_argument("--timings", action="store_true", help="record wall-clock phase times")
    p.add_argument("--a", default=None, help="single run: matrix file for A")
    p.add_argument("--b", default=None, help="single run: matrix file for B")
    p.add_argument("--product-out", default=None, help="single run: write the decoded product here")
    p.add_argument("--stragglers", dest="straggler_set", type=_index_list, default=frozenset())
    p.add_argument("--byzantine", dest="byzantine_set", type=_index_list, default=frozenset())
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("audit-mi", parents=[common], help="exhaustive mutual-information audit, CSV out")
    p.add_argument("recipe")
    p.add_argument("--collusion", type=int, default=None, help="collusion set size (default X)")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bounds", parents=[common], help="recovery-threshold lower bounds")
    for name in ("m", "n", "p", "X", "N"):
        p.add_argument(name, type=int)
    p.add_argument("--sec-mds", action="store_true", help="security subcodes are MDS")
    p.add_argument("--stragglers", action="store_true", help="scheme tolerates stragglers (R < N)")
    p.add_argument("--codes-mds", action="store_true", help="C_A and C_B are MDS")
    p.add_argument("--dims", type=_dims, default=None)
    p.add_argument("--R", type=int, default=None, help="recovery threshold for the cost line")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("bench-decoder", parents=[common], help="collaborative vs independent decoding")
    p.add_argument("recipe")
    p.add_argument("--S", type=int, default=0)
    p.add_argument("--E", type=int, default=0)
    p.add_argument("--dims", type=_dims, default=None)
    p.set_defaults(func=cmd_bench_decoder)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.trials is None:
        args.trials = DEFAULT_TRIALS.get(args.command, 1)
    try:
        return args.func(args)
    except (UsageError, SdmmError, ValueError) as exc:
        if isinstance(exc, (ConstructionFailed, NotDecodable, NoRootOfUnity)):
            sys.stderr.write(f"linsdmm: construction failed: {exc}\n")
            return EXIT_CONSTRUCTION
        if isinstance(exc, (PipelineFailure, InsufficientResponses)):
            sys.stderr.write(f"linsdmm: {exc}\n")
            return EXIT_PIPELINE
        if isinstance(exc, TooLarge):
            sys.stderr.write(f"linsdmm: {exc}\n")
            return EXIT_USAGE
        sys.stderr.write(f"linsdmm: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"linsdmm: {exc}\n")
        return EXIT_USAGE
