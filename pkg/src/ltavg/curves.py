"""Point counts and traces of Frobenius for elliptic curves over finite fields.

Curves are short Weierstrass models y^2 = x^3 + a*x + b in characteristic
at least 5.  Traces over the prime field come from quadratic character sums;
traces over extension fields come either from discrete-log tables built on an
explicit modulus polynomial, or, for curves with prime-field coefficients,
from the standard recurrence on the Frobenius eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import gfpoly
from .cache import DiskTable, cache_dir
from .primes import factorize_slow, is_prime

_char_tables: dict[int, np.ndarray] = {}


def quadratic_character(p: int) -> np.ndarray:
    """Doubled Legendre symbol table for F_p.

    Returns an int8 array t of length 2*p with t[v] = (v mod p | p), so sums
    of two reduced residues can be used as indices without another reduction.
    """
    tab = _char_tables.get(p)
    if tab is None:
        half = np.full(p, -1, dtype=np.int8)
        half[0] = 0
        v = np.arange(1, (p + 1) // 2, dtype=np.int64)
        half[(v * v) % p] = 1
        tab = np.concatenate([half, half])
        _char_tables[p] = tab
    return tab


def is_singular(a: int, b: int, p: int) -> bool:
    return (4 * a * a * a + 27 * b * b) % p == 0


_trace_memo: dict[tuple[int, int, int], int] = {}
_trace_spill: DiskTable | None = None


def _trace_disk() -> DiskTable:
    global _trace_spill
    if _trace_spill is None:
        _trace_spill = DiskTable("trace")
        for key, val in _trace_spill.load().items():
            p, a, b = map(int, key.decode().split(","))
            _trace_memo[(p, a, b)] = int(val.decode())
    return _trace_spill


def trace_mod_p(a: int, b: int, p: int) -> int:
    """Trace of Frobenius of y^2 = x^3 + a*x + b over F_p, p > 3 prime.

    The point count is p + 1 - trace.  Raises ValueError on a singular model.
    Results are memoized since box sweeps revisit reduced pairs.
    """
    if p <= 3 or not is_prime(p):
        raise ValueError("characteristic must be a prime greater than 3")
    a %= p
    b %= p
    got = _trace_memo.get((p, a, b))
    if got is not None:
        return got
    if is_singular(a, b, p):
        raise ValueError(f"singular model a={a} b={b} over F_{p}")
    chi = quadratic_character(p)
    x = np.arange(p, dtype=np.int64)
    cubic = (x * x % p) * x % p
    vals = (cubic + a * x) % p
    t = -int(chi[vals + b].sum())
    _trace_memo[(p, a, b)] = t
    if cache_dir() is not None:
        _trace_disk().append(f"{p},{a},{b}".encode(), str(t).encode())
    return t


def point_count_mod_p(a: int, b: int, p: int) -> int:
    return p + 1 - trace_mod_p(a, b, p)


def trace_matrix(p: int, a_values, b_values):
    """Traces for every pair from a_values x b_values over F_p.

    Returns (traces, nonsingular) where traces[i, j] is the trace of
    y^2 = x^3 + a_values[i]*x + b_values[j] and nonsingular[i, j] marks the
    pairs where that model is an elliptic curve (traces are garbage at
    singular pairs).  Cost is len(a_values) * len(b_values) * p.
    """
    if p <= 3 or not is_prime(p):
        raise ValueError("characteristic must be a prime greater than 3")
    avals = np.asarray(a_values, dtype=np.int64) % p
    bvals = np.asarray(b_values, dtype=np.int64) % p
    chi = quadratic_character(p)
    x = np.arange(p, dtype=np.int64)
    cubic = (x * x % p) * x % p
    traces = np.empty((len(avals), len(bvals)), dtype=np.int64)
    bcol = bvals[:, None]
    for i, a in enumerate(avals):
        vals = (cubic + int(a) * x) % p
        # b rows share one gather thanks to the doubled character table
        traces[i] = -chi[bcol + vals[None, :]].sum(axis=1, dtype=np.int64)
    disc = (4 * (avals * avals % p) * avals % p)[:, None] + 27 * (bvals * bvals % p)[None, :]
    return traces, disc % p != 0


_trace_grids: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def trace_grid(p: int):
    """Full (p, p) trace table indexed [a, b], with its nonsingular mask."""
    got = _trace_grids.get(p)
    if got is None:
        rng = np.arange(p, dtype=np.int64)
        got = trace_matrix(p, rng, rng)
        _trace_grids[p] = got
    return got


def isogeny_mass_oracle(p: int, r: int) -> Fraction:
    """Mass of the trace-r isogeny classes over F_p: sum of 1/#Aut.

    Counting all nonsingular (a, b) models and dividing by p - 1 weighs each
    isomorphism class by the inverse of its automorphism group, since a class
    with aut size w has (p-1)/w distinct models.
    """
    if r * r >= 4 * p:
        raise ValueError("trace violates the Hasse bound")
    traces, nonsing = trace_grid(p)
    count = int(((traces == r) & nonsing).sum())
    return Fraction(count, p - 1)


def aut_size(a: int, b: int, p: int) -> int:
    """Order of the automorphism group of y^2 = x^3 + a*x + b over F_p."""
    if p <= 3:
        raise ValueError("characteristic must exceed 3")
    a %= p
    b %= p
    if a == 0 and b == 0:
        raise ValueError("(0, 0) is not a curve model")
    if a != 0 and b != 0:
        return 2
    if b == 0:
        return gcd(4, p - 1)
    return gcd(6, p - 1)


def models_isomorphic(a1: int, b1: int, a2: int, b2: int, p: int) -> bool:
    """Whether two models over F_p differ by the substitution x -> u^2 x."""
    a1 %= p
    b1 %= p
    a2 %= p
    b2 %= p
    for u in range(1, p):
        u2 = u * u % p
        u4 = u2 * u2 % p
        if (u4 * a1 - a2) % p == 0 and (u4 * u2 * b1 - b2) % p == 0:
            return True
    return False


def isomorphism_orbit(a: int, b: int, p: int) -> list[tuple[int, int]]:
    """All models (u^4 a, u^6 b) isomorphic to (a, b) over F_p, sorted."""
    u = np.arange(1, p, dtype=np.int64)
    u2 = u * u % p
    u4 = u2 * u2 % p
    u6 = u4 * u2 % p
    pairs = np.stack([u4 * (a % p) % p, u6 * (b % p) % p], axis=1)
    uniq = np.unique(pairs, axis=0)
    return [(int(x), int(y)) for x, y in uniq]


def frobenius_trace_power(trace: int, p: int, f: int) -> int:
    """Trace over F_{p^f} of a curve over F_p with the given trace over F_p.

    Satisfies t_f = t_1 * t_{f-1} - p * t_{f-2} with t_0 = 2, the power-sum
    recurrence for the two Frobenius eigenvalues.
    """
    if f < 1:
        raise ValueError("field degree must be positive")
    prev, cur = 2, trace
    for _ in range(f - 1):
        prev, cur = cur, trace * cur - p * prev
    return cur


def _mat_pow_mod(mat: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.eye(len(mat), dtype=np.int64)
    base = mat % p
    while e:
        if e & 1:
            result = result @ base % p
        base = base @ base % p
        e >>= 1
    return result


def _is_irreducible(poly, p: int) -> bool:
    f = gfpoly.degree(poly)
    if f < 1:
        return False
    xp = gfpoly.x_pow_p_mod(poly, p)
    power = xp
    for _ in range(f - 1):
        power = gfpoly.powmod(power, p, poly, p)
    if power != (0, 1):
        return False
    for ell in factorize_slow(f):
        power = xp
        for _ in range(f // ell - 1):
            power = gfpoly.powmod(power, p, poly, p)
        shifted = gfpoly.add(power, (0, p - 1), p)
        if gfpoly.degree(gfpoly.gcd(poly, shifted, p)) != 0:
            return False
    return True


class SmallField:
    """F_{p^f} given by a monic irreducible modulus, with discrete log tables.

    Elements are encoded as integers in [0, p^f) whose base-p digits are the
    coefficients of the residue polynomial, constant digit first.  The tables
    make multiplicative work (powers, character values) a table lookup and
    keep additive work a digit-wise vector operation.
    """

    def __init__(self, p: int, modulus):
        if not is_prime(p):
            raise ValueError("characteristic must be prime")
        poly = gfpoly.monic(gfpoly.normalize(modulus, p), p)
        f = gfpoly.degree(poly)
        if f < 1:
            raise ValueError("modulus must have positive degree")
        if not _is_irreducible(poly, p):
            raise ValueError(f"modulus {poly} is reducible over F_{p}")
        self.p = p
        self.f = f
        self.q = p**f
        self.modulus = poly
        self._pvec = p ** np.arange(f, dtype=np.int64)
        self.digits = (np.arange(self.q, dtype=np.int64)[:, None] // self._pvec) % p
        self.generator = self._find_generator()
        self._build_tables()

    def element_index(self, value) -> int:
        """Encode an element given as an int (constant) or coefficient list."""
        if isinstance(value, (int, np.integer)):
            return int(value) % self.p
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.f:
            poly = gfpoly.mod(gfpoly.trim(coeffs), self.modulus, self.p)
            coeffs = list(poly)
        idx = 0
        for c in reversed(coeffs):
            idx = idx * self.p + c
        return idx

    def index_coeffs(self, idx: int) -> tuple[int, ...]:
        return tuple(int(d) for d in self.digits[idx])

    def add_indices(self, i, j):
        dig = (self.digits[i] + self.digits[j]) % self.p
        return dig @ self._pvec

    def mul_index(self, i: int, j: int) -> int:
        if i == 0 or j == 0:
            return 0
        return int(self.exp[(int(self.log[i]) + int(self.log[j])) % (self.q - 1)])

    def pow_index(self, i: int, e: int) -> int:
        if i == 0:
            return 0 if e else 1
        return int(self.exp[int(self.log[i]) * e % (self.q - 1)])

    def _element_order_ok(self, idx: int, factors) -> bool:
        poly = gfpoly.trim(self.index_coeffs(idx))
        if gfpoly.degree(poly) < 0:
            return False
        for ell in factors:
            power = gfpoly.powmod(poly, (self.q - 1) // ell, self.modulus, self.p)
            if power == (1,):
                return False
        return True

    def _find_generator(self) -> int:
        factors = list(factorize_slow(self.q - 1))
        for idx in range(2, self.q):
            if self._element_order_ok(idx, factors):
                return idx
        raise RuntimeError("no multiplicative generator found")

    def _mul_matrix(self, idx: int) -> np.ndarray:
        """Matrix of multiplication by the element idx on digit vectors."""
        g = gfpoly.trim(self.index_coeffs(idx))
        cols = []
        for j in range(self.f):
            basis = (0,) * j + (1,)
            prod = gfpoly.mulmod(g, basis, self.modulus, self.p)
            cols.append(list(prod) + [0] * (self.f - len(prod)))
        return np.array(cols, dtype=np.int64).T

    def _build_tables(self):
        p, f, q = self.p, self.f, self.q
        block = min(q - 1, 2048)
        mat_g = self._mul_matrix(self.generator)
        dig = np.empty((block, f), dtype=np.int64)
        dig[0, 0] = 1
        dig[0, 1:] = 0
        for i in range(1, block):
            dig[i] = mat_g @ dig[i - 1] % p
        chunks = [dig]
        # jump a whole block at a time with the matrix of g**block
        mat_jump = _mat_pow_mod(mat_g, block, p)
        total = block
        while total < q - 1:
            nxt = chunks[-1] @ mat_jump.T % p
            chunks.append(nxt)
            total += len(nxt)
        dig_all = np.concatenate(chunks)[: q - 1]
        self.exp = dig_all @ self._pvec
        self.log = np.full(q, -1, dtype=np.int64)
        self.log[self.exp] = np.arange(q - 1, dtype=np.int64)
        if int((self.log[1:] < 0).sum()) != 0:
            raise RuntimeError("generator order check failed")


_small_fields: dict[tuple[int, tuple[int, ...]], SmallField] = {}


def small_field(p: int, modulus) -> SmallField:
    key = (p, tuple(int(c) % p for c in modulus))
    fld = _small_fields.get(key)
    if fld is None:
        fld = SmallField(p, modulus)
        _small_fields[key] = fld
    return fld


@dataclass(frozen=True)
class CurveModel:
    """A Weierstrass model y^2 = x^3 + alpha*x + beta over a number field.

    alpha and beta are power-basis coordinate vectors; singularity is a
    per-prime question, so no global invariant is enforced here.
    """

    alpha: tuple
    beta: tuple

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(int(c) for c in self.alpha))
        object.__setattr__(self, "beta", tuple(int(c) for c in self.beta))
        if not self.alpha or len(self.alpha) != len(self.beta):
            raise ValueError("alpha and beta need equal positive length")


@dataclass(frozen=True)
class ReducedCurve:
    """A model y^2 = x^3 + a*x + b over F_{p^f}.

    For f = 1, a and b are integers mod p.  For f > 1 they are coefficient
    sequences (or prime-field constants) in the basis of modulus, a monic
    irreducible of degree f over F_p.
    """

    a: object
    b: object
    p: int
    f: int = 1
    modulus: tuple = ()

    def __post_init__(self):
        if self.f < 1:
            raise ValueError("field degree must be positive")
        if self.p**self.f >= 2**40:
            raise ValueError("field size exceeds the supported range")
        if self.f > 1 and not self.modulus:
            raise ValueError("extension fields need a modulus polynomial")


def _as_prime_field_int(value, p: int) -> int:
    if isinstance(value, (int, np.integer)):
        return int(value) % p
    coeffs = [int(c) % p for c in value]
    if any(coeffs[1:]):
        raise ValueError("element does not lie in the prime field")
    return coeffs[0] if coeffs else 0


def trace_mod_q(curve: ReducedCurve) -> int:
    """Trace of Frobenius of a reduced curve over its residue field."""
    if curve.f == 1:
        return trace_mod_p(_as_prime_field_int(curve.a, curve.p), _as_prime_field_int(curve.b, curve.p), curve.p)
    field = small_field(curve.p, curve.modulus)
    if field.f != curve.f:
        raise ValueError("modulus degree disagrees with the stated field degree")
    return field_trace(curve.a, curve.b, field)


def point_count_mod_q(curve: ReducedCurve) -> int:
    return curve.p**curve.f + 1 - trace_mod_q(curve)


def field_trace(a, b, field: SmallField) -> int:
    """Trace of Frobenius of y^2 = x^3 + a*x + b over the given F_{p^f}.

    a and b may be ints (prime-field constants) or coefficient sequences in
    the field's modulus basis.  Requires odd characteristic above 3.
    """
    if field.p <= 3:
        raise ValueError("characteristic must exceed 3")
    q = field.q
    ai = field.element_index(a)
    bi = field.element_index(b)
    disc = field.add_indices(
        field.mul_index(4 % field.p, field.pow_index(ai, 3)),
        field.mul_index(27 % field.p, field.pow_index(bi, 2)),
    )
    if int(disc) == 0:
        raise ValueError("singular model over the extension field")
    lx = field.log[1:]
    x3 = np.zeros(q, dtype=np.int64)
    x3[1:] = field.exp[3 * lx % (q - 1)]
    ax = np.zeros(q, dtype=np.int64)
    if ai != 0:
        ax[1:] = field.exp[(int(field.log[ai]) + lx) % (q - 1)]
    dig = (field.digits[x3] + field.digits[ax] + field.digits[bi]) % field.p
    s = dig @ field._pvec
    logs = field.log[s]
    chi = 1 - 2 * (logs & 1)
    chi[s == 0] = 0
    return -int(chi.sum())
