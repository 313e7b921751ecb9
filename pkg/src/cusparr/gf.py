"""Exact arithmetic in GF(p^n) = F_p[t]/(m(t)).

Elements are stored by their canonical integer encoding
``sum(coeffs[i] * p**i)``, so ``enumerate_field`` order, file output and
matroid labels all agree.  Small fields (q <= 256) get lazily built addition
and multiplication tables; larger ones fall back to polynomial arithmetic.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Iterable, Sequence

TABLE_LIMIT = 256

# One irreducible monic polynomial per (p, n), coefficients low degree first.
# For n >= 2 each entry is the first irreducible when the lower coefficients
# are read as a base-p integer; n = 1 uses t itself.
DEFAULT_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 1, 0, 0, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (3, 6): (2, 1, 0, 0, 0, 0, 1),
    (3, 7): (2, 0, 1, 0, 0, 0, 0, 1),
    (5, 2): (2, 0, 1),
    (5, 3): (1, 1, 0, 1),
    (5, 4): (2, 0, 0, 0, 1),
    (5, 5): (1, 4, 0, 0, 0, 1),
    (5, 6): (2, 1, 0, 0, 0, 0, 1),
    (5, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (7, 2): (1, 0, 1),
    (7, 3): (2, 0, 0, 1),
    (7, 4): (1, 1, 0, 0, 1),
    (7, 5): (3, 1, 0, 0, 0, 1),
    (7, 6): (2, 0, 0, 0, 0, 0, 1),
    (7, 7): (1, 6, 0, 0, 0, 0, 0, 1),
    (11, 2): (1, 0, 1),
    (11, 3): (4, 1, 0, 1),
    (11, 4): (2, 1, 0, 0, 1),
    (11, 5): (2, 0, 0, 0, 0, 1),
    (11, 6): (2, 1, 0, 0, 0, 0, 1),
    (11, 7): (4, 1, 0, 0, 0, 0, 0, 1),
    (13, 2): (2, 0, 1),
    (13, 3): (2, 0, 0, 1),
    (13, 4): (2, 0, 0, 0, 1),
    (13, 5): (2, 4, 0, 0, 0, 1),
    (13, 6): (2, 0, 0, 0, 0, 0, 1),
    (13, 7): (2, 3, 0, 0, 0, 0, 0, 1),
}


class FieldError(ValueError):
    """Invalid field construction or cross-field operation."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


# --- polynomials over F_p, coefficient lists low degree first ---------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    """Remainder of a modulo m over F_p (m need not be monic)."""
    r = _trim([c % p for c in a])
    m = _trim([c % p for c in m])
    if not m:
        raise ZeroDivisionError("polynomial division by zero")
    lead_inv = pow(m[-1], p - 2, p)
    dm = len(m) - 1
    while len(r) - 1 >= dm:
        coef = r[-1] * lead_inv % p
        shift = len(r) - 1 - dm
        for i, c in enumerate(m):
            r[shift + i] = (r[shift + i] - coef * c) % p
        _trim(r)
    return r


def poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _monic_polys(p: int, d: int) -> Iterable[list[int]]:
    for low in itertools.product(range(p), repeat=d):
        yield list(low) + [1]


def is_irreducible(m: Sequence[int], p: int) -> bool:
    """Irreducibility of a polynomial over F_p by exhaustive search.

    Degree <= 3 uses the root test; higher degrees try every monic divisor of
    degree <= deg/2.
    """
    m = _trim([c % p for c in m])
    n = len(m) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    if n <= 3:
        for x in range(p):
            if sum(c * pow(x, i, p) for i, c in enumerate(m)) % p == 0:
                return False
        return True
    for d in range(1, n // 2 + 1):
        for cand in _monic_polys(p, d):
            if not poly_mod(m, cand, p):
                return False
    return True


def first_irreducible(p: int, n: int) -> tuple[int, ...]:
    if n == 1:
        return (0, 1)
    for low in range(p ** n):
        coeffs = [(low // p ** i) % p for i in range(n)] + [1]
        if coeffs[0] and is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# --- field context ----------------------------------------------------------

class FieldCtx:
    """GF(p^n) with a fixed modulus.  Equality is on (p, n, modulus)."""

    __slots__ = ("p", "n", "modulus", "q", "__dict__")

    def __init__(self, p: int, n: int, modulus: Sequence[int]):
        self.p = p
        self.n = n
        self.modulus = tuple(modulus)
        self.q = p ** n

    # identity
    def _key(self):
        return (self.p, self.n, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"FieldCtx(p={self.p}, n={self.n}, modulus={list(self.modulus)})"

    def header(self) -> str:
        return f"field p={self.p} n={self.n} modulus={','.join(map(str, self.modulus))}"

    @property
    def characteristic(self) -> int:
        return self.p

    # element construction
    def __call__(self, value: int) -> "FieldElem":
        """Element from its integer encoding."""
        if not 0 <= value < self.q:
            raise FieldError(f"encoding {value} outside [0, {self.q})")
        return FieldElem(self, value)

    def scalar(self, k: int) -> "FieldElem":
        """Image of the integer k in the prime subfield."""
        return FieldElem(self, k % self.p)

    def from_coeffs(self, coeffs: Sequence[int]) -> "FieldElem":
        if len(coeffs) > self.n:
            coeffs = poly_mod(coeffs, self.modulus, self.p)
        return FieldElem(self, self._encode(coeffs))

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(self, 0)

    @property
    def one(self) -> "FieldElem":
        return FieldElem(self, 1)

    @property
    def gen(self) -> "FieldElem":
        """The class of t (equal to the scalar 0 when n = 1 with modulus t)."""
        return self.from_coeffs([0, 1])

    # encoding helpers
    def _encode(self, coeffs: Sequence[int]) -> int:
        v = 0
        for c in reversed(list(coeffs)):
            v = v * self.p + c % self.p
        return v

    def _decode(self, v: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.n):
            v, r = divmod(v, self.p)
            out.append(r)
        return tuple(out)

    @cached_property
    def _digits(self) -> list[tuple[int, ...]] | None:
        if self.q > TABLE_LIMIT:
            return None
        return [self._decode(v) for v in range(self.q)]

    def coeffs_of(self, v: int) -> tuple[int, ...]:
        d = self._digits
        return d[v] if d is not None else self._decode(v)

    # raw integer arithmetic, used by the solvers
    def add_int(self, a: int, b: int) -> int:
        t = self.add_table
        if t is not None:
            return t[a * self.q + b]
        if self.p == 2:
            return a ^ b
        p = self.p
        return self._encode([(x + y) % p for x, y in zip(self._decode(a), self._decode(b))])

    def neg_int(self, a: int) -> int:
        if self.p == 2:
            return a
        return self._encode([-x % self.p for x in self.coeffs_of(a)])

    def sub_int(self, a: int, b: int) -> int:
        return self.add_int(a, self.neg_int(b))

    def mul_int(self, a: int, b: int) -> int:
        t = self.mul_table
        if t is not None:
            return t[a * self.q + b]
        return self._mul_slow(a, b)

    def _mul_slow(self, a: int, b: int) -> int:
        if self.n == 1:
            return a * b % self.p
        prod = poly_mul(self.coeffs_of(a), self.coeffs_of(b), self.p)
        return self._encode(poly_mod(prod, self.modulus, self.p))

    def pow_int(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul_int(result, base)
            base = self.mul_int(base, base)
            e >>= 1
        return result

    def inv_int(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        t = self.inv_table
        if t is not None:
            return t[a]
        return self.pow_int(a, self.q - 2)

    @cached_property
    def add_table(self) -> list[int] | None:
        if self.q > TABLE_LIMIT:
            return None
        p, digits = self.p, self._digits
        return [
            self._encode([(x + y) % p for x, y in zip(da, db)])
            for da in digits
            for db in digits
        ]

    @cached_property
    def mul_table(self) -> list[int] | None:
        if self.q > TABLE_LIMIT:
            return None
        q = self.q
        return [self._mul_slow(a, b) for a in range(q) for b in range(q)]

    @cached_property
    def inv_table(self) -> list[int] | None:
        if self.q > TABLE_LIMIT:
            return None
        mt, q = self.mul_table, self.q
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mt[a * q + b] == 1:
                    inv[a] = b
                    break
        return inv


_FIELDS: dict[tuple, FieldCtx] = {}


def field_new(p: int, n: int = 1, modulus: Sequence[int] | None = None) -> FieldCtx:
    """Build GF(p^n).  Without a modulus the built-in table is used."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if n < 1:
        raise FieldError("extension degree must be >= 1")
    if modulus is None:
        if n == 1:
            modulus = (0, 1)
        elif (p, n) in DEFAULT_MODULI:
            modulus = DEFAULT_MODULI[(p, n)]
        else:
            raise FieldError(f"no built-in modulus for p={p}, n={n}; supply one")
    modulus = tuple(int(c) for c in modulus)
    cached = _FIELDS.get((p, n, modulus))
    if cached is not None:
        return cached
    if len(modulus) != n + 1 or any(not 0 <= c < p for c in modulus):
        raise FieldError(f"modulus must have {n + 1} coefficients in [0, {p})")
    if modulus[-1] != 1:
        raise FieldError("modulus must be monic")
    if not is_irreducible(modulus, p):
        raise FieldError(f"modulus {list(modulus)} is reducible over F_{p}")
    ctx = _FIELDS[(p, n, modulus)] = FieldCtx(p, n, modulus)
    return ctx


def parse_header(line: str) -> FieldCtx:
    """Parse ``field p=<p> n=<n> modulus=<c0,...,cn>``."""
    parts = line.split()
    if not parts or parts[0] != "field":
        raise FieldError(f"expected field header, got {line!r}")
    kv = {}
    for part in parts[1:]:
        key, sep, val = part.partition("=")
        if not sep:
            raise FieldError(f"malformed header token {part!r}")
        kv[key] = val
    if set(kv) != {"p", "n", "modulus"}:
        raise FieldError(f"header needs p, n and modulus: {line!r}")
    try:
        p, n = int(kv["p"]), int(kv["n"])
        modulus = [int(c) for c in kv["modulus"].split(",")]
    except ValueError as exc:
        raise FieldError(f"malformed header {line!r}") from exc
    return field_new(p, n, modulus)


# --- elements ---------------------------------------------------------------

class FieldElem:
    __slots__ = ("ctx", "value")

    def __init__(self, ctx: FieldCtx, value: int):
        self.ctx = ctx
        self.value = value

    def _check(self, other) -> FieldCtx:
        if not isinstance(other, FieldElem):
            raise TypeError(f"expected FieldElem, got {type(other).__name__}")
        if other.ctx is not self.ctx and other.ctx != self.ctx:
            raise FieldError("operands live in different fields")
        return self.ctx

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ctx.coeffs_of(self.value)

    def encode(self) -> int:
        return self.value

    def __add__(self, other):
        ctx = self._check(other)
        return FieldElem(ctx, ctx.add_int(self.value, other.value))

    def __sub__(self, other):
        ctx = self._check(other)
        return FieldElem(ctx, ctx.sub_int(self.value, other.value))

    def __neg__(self):
        return FieldElem(self.ctx, self.ctx.neg_int(self.value))

    def __mul__(self, other):
        ctx = self._check(other)
        return FieldElem(ctx, ctx.mul_int(self.value, other.value))

    def __truediv__(self, other):
        ctx = self._check(other)
        return FieldElem(ctx, ctx.mul_int(self.value, ctx.inv_int(other.value)))

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return FieldElem(self.ctx, self.ctx.pow_int(self.value, e))

    def inv(self) -> "FieldElem":
        return FieldElem(self.ctx, self.ctx.inv_int(self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def __bool__(self):
        return self.value != 0

    def __eq__(self, other):
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.value == other.value and self.ctx == other.ctx

    def __hash__(self):
        return hash(self.value)

    def __lt__(self, other):
        self._check(other)
        return self.value < other.value

    def __repr__(self):
        return f"FieldElem({self.value})"

    def __str__(self):
        return str(self.value)


# --- module-level operations ------------------------------------------------

def add(a: FieldElem, b: FieldElem) -> FieldElem:
    return a + b


def sub(a: FieldElem, b: FieldElem) -> FieldElem:
    return a - b


def neg(a: FieldElem) -> FieldElem:
    return -a


def mul(a: FieldElem, b: FieldElem) -> FieldElem:
    return a * b


def inv(a: FieldElem) -> FieldElem:
    return a.inv()


def enumerate_field(ctx: FieldCtx) -> list[FieldElem]:
    """All q elements in increasing encoding order, starting with 0."""
    return [FieldElem(ctx, v) for v in range(ctx.q)]


def additive_coords(a: FieldElem) -> tuple[int, ...]:
    """Coordinates of a in the F_p-basis 1, t, ..., t^(n-1)."""
    return a.coeffs


def span_members(ctx: FieldCtx, basis: Sequence[FieldElem]) -> list[FieldElem]:
    """All F_p-linear combinations of basis, deduplicated, in encoding order."""
    members = {0}
    for b in basis:
        if b.ctx != ctx:
            raise FieldError("basis element from a different field")
        multiples = [ctx.mul_int(k, b.value) for k in range(ctx.p)]
        members = {ctx.add_int(m, x) for m in members for x in multiples}
    return [FieldElem(ctx, v) for v in sorted(members)]
