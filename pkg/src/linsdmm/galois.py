"""Exact arithmetic in GF(p), p prime below 2**61, and in GF(4).

Field objects are immutable and operate on numpy ``int64`` arrays of
canonical representatives.  :class:`FieldElement` is the scalar wrapper used
at API boundaries; bulk work always goes through the vectorised methods.

GF(4) elements are indexed 0, 1, 2, 3 for 0, 1, w, w**2 where w**2 = w + 1.
"""
from functools import lru_cache

import numpy as np

from . import _backend
from .errors import DivisionByZero, FieldMismatch, InvalidParams, NoRootOfUnity

MAX_PRIME = 1 << 61


@lru_cache(maxsize=None)
def _is_prime(n):
    from sympy import isprime  # deterministic below 2**64

    return bool(isprime(n))


class Field:
    """Common interface; concrete fields override the arithmetic."""

    order: int
    characteristic: int

    # -- construction helpers -------------------------------------------
    def __call__(self, value):
        return FieldElement(self, value)

    def asarray(self, x):
        return np.asarray(x, dtype=np.int64) % self.order

    def zeros(self, shape):
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n):
        return np.eye(n, dtype=np.int64)

    def random(self, shape, rng):
        return rng.integers(0, self.order, size=shape, dtype=np.int64)

    def random_nonzero(self, shape, rng):
        return rng.integers(1, self.order, size=shape, dtype=np.int64)

    def elements(self):
        return np.arange(self.order, dtype=np.int64)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def sum(self, a, axis=None):
        raise NotImplementedError


class PrimeField(Field):
    """GF(p) for a prime ``p < 2**61``."""

    __slots__ = ("p",)

    def __init__(self, p):
        p = int(p)
        if not 2 <= p < MAX_PRIME or not _is_prime(p):
            raise InvalidParams(f"modulus {p} is not a prime below 2**61")
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("PrimeField is immutable")

    @property
    def order(self):
        return self.p

    @property
    def characteristic(self):
        return self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"

    def __reduce__(self):
        return (PrimeField, (self.p,))

    def add(self, a, b):
        return (np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)) % self.p

    def sub(self, a, b):
        return (np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64)) % self.p

    def neg(self, a):
        return (-np.asarray(a, dtype=np.int64)) % self.p

    def mul(self, a, b):
        return _backend.current().mulmod(a, b, self.p)

    def pow(self, a, e):
        e = int(e)
        if e < 0:
            return _backend.current().powmod(self.inv(a), -e, self.p)
        return _backend.current().powmod(a, e, self.p)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a % self.p == 0):
            raise DivisionByZero(f"inverse of zero in {self!r}")
        return _backend.current().powmod(a, self.p - 2, self.p)

    def matmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.size == 0 or b.size == 0:
            return np.matmul(a, b)  # exact: empty sums are zero
        return _backend.current().matmul(a, b, self.p)

    def sum(self, a, axis=None):
        a = np.asarray(a, dtype=np.int64)
        if self.p <= (1 << 31):
            return np.sum(a, axis=axis) % self.p
        return np.asarray(np.sum(a.astype(object), axis=axis) % self.p, dtype=np.int64)

    def rref(self, m):
        return _backend.current().rref(m, self.p)


_GF4_ADD = np.array([[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]], dtype=np.int64)
_GF4_MUL = np.array([[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]], dtype=np.int64)
_GF4_INV = np.array([0, 1, 3, 2], dtype=np.int64)


class GF4(Field):
    """The field with four elements, by lookup table."""

    order = 4
    characteristic = 2
    add_table = _GF4_ADD
    mul_table = _GF4_MUL

    def __eq__(self, other):
        return isinstance(other, GF4)

    def __hash__(self):
        return hash("GF4")

    def __repr__(self):
        return "GF(4)"

    def __reduce__(self):
        return (GF4, ())

    def asarray(self, x):
        x = np.asarray(x, dtype=np.int64)
        if np.any((x < 0) | (x > 3)):
            raise InvalidParams("GF(4) values must be indices 0..3")
        return x

    def add(self, a, b):
        return np.bitwise_xor(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    sub = add

    def neg(self, a):
        return np.asarray(a, dtype=np.int64).copy()

    def mul(self, a, b):
        return _GF4_MUL[np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)]

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero in GF(4)")
        return _GF4_INV[a]

    def pow(self, a, e):
        a = np.asarray(a, dtype=np.int64)
        e = int(e)
        if e < 0:
            a, e = self.inv(a), -e
        out = np.ones_like(a)
        for _ in range(e % 3 if e else 0):
            out = self.mul(out, a)
        # 0**e stays 0 for e > 0 even when e is a multiple of 3
        return np.where((a == 0) & (e > 0), 0, out)

    def sum(self, a, axis=None):
        return np.bitwise_xor.reduce(np.asarray(a, dtype=np.int64), axis=axis)

    def matmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        prod = _GF4_MUL[a[..., :, :, None], b[..., None, :, :]]
        if prod.shape[-2] == 0:
            return np.zeros(prod.shape[:-3] + (a.shape[-2], b.shape[-1]), dtype=np.int64)
        return np.bitwise_xor.reduce(prod, axis=-2)

    def rref(self, m):
        r = np.array(m, dtype=np.int64, copy=True)
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
            r[[row, piv]] = r[[piv, row]]
            r[row] = self.mul(r[row], _GF4_INV[r[row, col]])
            for i in range(rows):
                if i != row and r[i, col]:
                    r[i] = self.sub(r[i], self.mul(r[row], r[i, col]))
            pivots.append(col)
            row += 1
        return r, pivots


def field_from_spec(spec):
    """Parse ``"gf4"`` or a decimal prime modulus into a field."""
    spec = str(spec).strip().lower()
    if spec in ("gf4", "4"):
        return GF4()
    try:
        return PrimeField(int(spec))
    except ValueError as exc:
        raise InvalidParams(f"bad field spec {spec!r}") from exc


class FieldElement:
    """Immutable scalar bound to its field."""

    __slots__ = ("field", "value")

    def __init__(self, field, value):
        if isinstance(value, FieldElement):
            if value.field != field:
                raise FieldMismatch(f"{value.field!r} element used in {field!r}")
            value = value.value
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", int(field.asarray(int(value))))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"cannot combine {self.field!r} and {other.field!r} elements")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(self.field.asarray(int(other)))
        return NotImplemented

    def _wrap(self, v):
        return FieldElement(self.field, int(v))

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(self.value, o))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, e):
        return self._wrap(self.field.pow(self.value, e))

    def inv(self):
        return self._wrap(self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(self.field.asarray(int(other)))
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value}@{self.field!r}"


def multiplicative_order(field, a):
    """Order of a nonzero element (brute force over divisors of q - 1)."""
    from sympy import divisors

    a = int(a)
    if a % field.order == 0:
        raise DivisionByZero("zero has no multiplicative order")
    for d in divisors(field.order - 1):
        if int(field.pow(a, d)) == 1:
            return d
    raise AssertionError("unreachable: Lagrange's theorem")


def primitive_root_of_unity(field, n):
    """Deterministic primitive ``n``-th root of unity in a prime field.

    Returns ``g ** ((p - 1) / n)`` for the smallest generator ``g`` of the
    multiplicative group.
    """
    if not isinstance(field, PrimeField):
        raise NoRootOfUnity("roots of unity are only provided for prime fields")
    n = int(n)
    if n <= 0 or (field.p - 1) % n:
        raise NoRootOfUnity(f"{n} does not divide {field.p - 1}")
    from sympy.ntheory import primitive_root

    g = primitive_root(field.p)
    return FieldElement(field, pow(g, (field.p - 1) // n, field.p))
