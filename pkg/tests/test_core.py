import io
import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from linsdmm import codes, core, linalg
from linsdmm.core import PartitionSpec, SdmmScheme, SecurityVerdict
from linsdmm.errors import InsufficientResponses, InvalidParams, ShapeError
from linsdmm.galois import PrimeField
from linsdmm.schemes import build_dft, build_matdot

from . import oracles

F5, F101 = PrimeField(5), PrimeField(101)


def test_partition_examples():
    a = np.arange(4).reshape(2, 2)
    ab, bb = core.partition(a, np.eye(2, dtype=np.int64), PartitionSpec(1, 1, 2))
    assert ab.shape == (2, 2, 1)
    assert np.array_equal(ab[0][:, 0], [0, 2]) and np.array_equal(ab[1][:, 0], [1, 3])
    ab, _ = core.partition(np.arange(3).reshape(3, 1), np.ones((1, 1), dtype=np.int64), PartitionSpec(3, 1, 1))
    assert ab.shape == (3, 1, 1) and list(ab.ravel()) == [0, 1, 2]
    a = np.arange(16).reshape(4, 4)
    ab, _ = core.partition(a, np.ones((4, 4), dtype=np.int64), PartitionSpec(2, 1, 2))
    assert np.array_equal(ab[0], a[:2, :2]) and np.array_equal(ab[1], a[:2, 2:])
    assert np.array_equal(ab[2], a[2:, :2]) and np.array_equal(ab[3], a[2:, 2:])


def test_partition_shape_errors():
    with pytest.raises(ShapeError):
        core.partition(np.ones((3, 4)), np.ones((4, 2)), PartitionSpec(2, 1, 1))
    with pytest.raises(ShapeError):
        core.partition(np.ones((2, 4)), np.ones((3, 2)), PartitionSpec(1, 1, 1))
    with pytest.raises(InvalidParams):
        PartitionSpec(0, 1, 1)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(1, 2), st.integers(0, 999))
def test_partition_assemble_roundtrip(m, n, p, blk, seed):
    rng = np.random.default_rng(seed)
    a = F101.random((m * blk, p * blk), rng)
    b = F101.random((p * blk, n * blk), rng)
    spec = PartitionSpec(m, n, p)
    ab, bb = core.partition(a, b, spec)
    # block products summed over the inner index, reassembled, give the product
    prods = np.stack([
        sum(F101.matmul(ab[u * p + j], bb[j * n + v]) for j in range(p)) % 101
        for u in range(m) for v in range(n)
    ])
    assert np.array_equal(core.assemble(prods, spec), F101.matmul(a, b))


def test_encode_with_no_padding_copies_blocks():
    F = np.array([[1, 0, 1], [0, 1, 1]])
    G = np.array([[1, 1, 1]])
    s = SdmmScheme(F101, PartitionSpec(2, 1, 1), 0, F, G)
    rng = np.random.default_rng(0)
    a, b = F101.random((2, 3), rng), F101.random((3, 2), rng)
    sh = core.encode(s, a, b, rng)
    assert np.array_equal(sh.a_shares[0], a[:1]) and np.array_equal(sh.a_shares[1], a[1:])
    assert np.array_equal(sh.a_shares[2], F101.add(a[:1], a[1:]))
    assert all(np.array_equal(sh.b_shares[i], b) for i in range(3))
    assert np.array_equal(core.decode(s, core.honest_responses(s, sh)), F101.matmul(a, b))


def test_matdot_share_formula_gf5():
    s = build_matdot(F5, 1, 1, 3)
    rng = np.random.default_rng(1)
    a, b = np.array([[3]]), np.array([[4]])
    sh = core.encode(s, a, b, rng)
    r = int(sh.a_pad[0, 0, 0])
    for i, alpha in enumerate((1, 2, 3)):
        assert int(sh.a_shares[i, 0, 0]) == (3 + r * alpha) % 5
    resp = core.honest_responses(s, sh)
    assert np.array_equal(resp.responses[:, 0, 0], sh.a_shares[:, 0, 0] * sh.b_shares[:, 0, 0] % 5)


def scheme_zoo():
    return [
        build_matdot(F101, 2, 1, 6),
        build_matdot(F101, 1, 2, 7),
        build_dft(PrimeField(13), 2, 1),
        SdmmScheme(F101, PartitionSpec(2, 2, 1), 1,
                   np.array([[1] * 8, list(range(1, 9)), [pow(x, 4, 101) for x in range(1, 9)]]),
                   np.array([[1] * 8, [pow(x, 2, 101) for x in range(1, 9)], [pow(x, 5, 101) for x in range(1, 9)]])),
    ]


@pytest.mark.parametrize("scheme", scheme_zoo(), ids=lambda s: s.name)
def test_shares_and_responses_in_codes(scheme):
    f = scheme.field
    rng = np.random.default_rng(2)
    ps = scheme.partition
    a = f.random((2 * ps.m, 2 * ps.p), rng)
    b = f.random((2 * ps.p, 2 * ps.n), rng)
    sh = core.encode(scheme, a, b, rng)
    n = scheme.N
    assert scheme.code_a.contains(sh.a_shares.reshape(n, -1).T).all()
    assert scheme.code_b.contains(sh.b_shares.reshape(n, -1).T).all()
    resp = core.honest_responses(scheme, sh)
    assert scheme.star_code.contains(resp.entry_vectors()).all()
    zero = core.honest_responses(scheme, core.encode(scheme, np.zeros_like(a), b, rng))
    sec_star = codes.star_product(scheme.sec_a, scheme.code_b)
    assert sec_star.contains(zero.entry_vectors()).all()
    assert np.array_equal(core.decode(scheme, resp), f.matmul(a, b))


def test_matdot_lambda_is_lagrange_coefficient():
    p, X = 3, 1
    n = 2 * p + 2 * X - 1
    s = build_matdot(F101, p, X, n)
    pts = list(range(1, n + 1))
    for i in range(n):
        assert int(s.lambdas[i, 0, 0]) == oracles.lagrange_coefficients(pts, i, 101)[p - 1]


def test_dft_lambda_is_average():
    s = build_dft(PrimeField(13), 2, 1)
    quarter = pow(4, 11, 13)
    assert np.all(s.lambdas[:, 0, 0] == quarter)


def test_any_r_and_below_threshold():
    s = build_matdot(F101, 2, 1, 6)
    assert core.recovery_threshold(s) == 5
    rng = np.random.default_rng(4)
    a, b = F101.random((3, 4), rng), F101.random((4, 2), rng)
    resp = core.honest_responses(s, core.encode(s, a, b, rng))
    for k in itertools.combinations(range(6), 5):
        assert np.array_equal(core.decode(s, resp, k), F101.matmul(a, b))
    with pytest.raises(InsufficientResponses):
        core.decode(s, resp, (0, 1, 2, 3))


def test_decode_independent_of_randomness():
    s = build_matdot(F101, 2, 2, 8)
    rng = np.random.default_rng(0)
    a, b = F101.random((2, 4), rng), F101.random((4, 3), rng)
    outs = {
        core.decode(s, core.honest_responses(s, core.encode(s, a, b, np.random.default_rng(seed))), range(1, 8)).tobytes()
        for seed in range(10)
    }
    assert len(outs) == 1


def test_security_verdicts():
    assert core.is_x_secure(build_matdot(F101, 2, 1, 6)) is SecurityVerdict.SECURE_BY_MDS
    rng = np.random.default_rng(7)
    F, G = F101.random((3, 10), rng), F101.random((3, 10), rng)
    F[1:, 1] = F[1:, 0]  # singular 2x2 minor in the security rows only
    s = SdmmScheme(F101, PartitionSpec(1, 1, 1), 2, F, G)
    assert codes.minimum_distance(codes.dual(s.code_a)) >= 3
    assert core.is_x_secure(s) is SecurityVerdict.INSECURE_PROVEN
    pts = list(range(1, 6))
    F = np.array([[1] * 5, pts, pts])  # security subcode of dimension 1 < X = 2
    G = np.array([[1] * 5, [x * x % 101 for x in pts], [pow(x, 3, 101) for x in pts]])
    s = SdmmScheme(F101, PartitionSpec(1, 1, 1), 2, F, G)
    assert core.is_x_secure(s) is SecurityVerdict.INSECURE_PROVEN


def test_collusion_cap_rejected_for_matdot():
    with pytest.raises(InvalidParams):
        build_matdot(F101, 1, 2, 4)


def _bound(bounds, key):
    return next(b for b in bounds if b.key == key)


def test_bounds_report_values():
    b = core.bounds_report(1, 1, 2, 1, 6, True, True)
    assert _bound(b, "thm2").value == 5
    b = core.bounds_report(1, 1, 4, 2, 8, True, False)
    assert _bound(b, "thm3").value == 8 and not _bound(b, "thm2").applies
    b = core.bounds_report(3, 3, 1, 2, 18, True, False, codes_mds=True)
    assert _bound(b, "thm1").value == 9 and _bound(b, "thm3").value == 15
    b = core.bounds_report(1, 1, 1, 3, 6, True, True, codes_mds=True)
    assert _bound(b, "cor2").note.startswith("violated")
    b = core.bounds_report(1, 1, 2, 1, 6, True, True, dims=(3, 4, 5), R=5)
    assert _bound(b, "comm").value == 6 * (3 * 4 // 2 + 4 * 5 // 2) + 5 * 15


@pytest.mark.parametrize("scheme", scheme_zoo(), ids=lambda s: s.name)
def test_bounds_never_exceed_threshold(scheme):
    R, bounds = core.scheme_bounds(scheme)
    for b in bounds:
        if b.applies and b.key.startswith("thm"):
            assert R >= b.value


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 999))
def test_matrix_io_roundtrip(rows, cols, seed):
    m = F101.random((rows, cols), np.random.default_rng(seed))
    buf = io.StringIO()
    core.write_matrix(buf, m, 101)
    buf.seek(0)
    back, q = core.read_matrix(buf)
    assert q == 101 and np.array_equal(back, m)


def test_responses_io_and_truth_hiding():
    resp = core.ResponseSet(np.arange(12).reshape(3, 2, 2) % 7, (core.OK, core.STRAGGLER, core.OK), frozenset({2}))
    assert resp.for_decoder().ground_truth() == frozenset()
    assert resp.ground_truth() == frozenset({2})
    buf = io.StringIO()
    core.write_responses(buf, resp, 7)
    buf.seek(0)
    back, q = core.read_responses(buf)
    assert back.status == resp.status
    assert np.array_equal(back.responses[[0, 2]], resp.responses[[0, 2]])


def test_read_matrix_rejects_garbage():
    with pytest.raises(ShapeError):
        core.read_matrix(io.StringIO("2 2 7\n1 2\n"))
    with pytest.raises(ShapeError):
        core.read_matrix(io.StringIO("1 1 7\n9\n"))
