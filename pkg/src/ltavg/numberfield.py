"""Galois number fields given by a monic integer polynomial, and their prime splitting.

A field is the splitting data of one monic irreducible poly(x) in Z[x] whose
root theta generates a Galois extension K/Q of degree n_K. Everything downstream
works through the power basis 1, theta, ..., theta^(n_K - 1):

  * p splits completely  <=>  poly has n_K distinct roots mod p  (tested via
    x^p = x mod (poly, p); p does not divide disc(poly))
  * a degree-f prime above an unramified p is a degree-f irreducible factor of
    poly mod p; the residue field is F_p[t]/(factor) with theta mapped to t.

The cyclotomic invariants (m_K, n_A, G_mK) describe the maximal abelian
subfield A: n_A = [A:Q], m_K its conductor, and G_mK the group of residues
mod m_K hit by the norms of split primes. They are measured empirically from
split-prime residues, never assumed from theory, unless explicit overrides
are supplied.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import gfpoly
from .primes import divisors_from_factors, factorize_slow, sieve_primes

MIN_WITNESSES = 20
DEFAULT_MAX_MODULUS = 2000

PRESETS: dict[str, tuple[int, ...]] = {
    "Q": (0, 1),
    "Q_i": (1, 0, 1),
    "Q_sqrt2": (-2, 0, 1),
    "Q_zeta3": (1, 1, 1),
    "Q_zeta5": (1, 1, 1, 1, 1),
    # degree-6 splitting field of x^3 - 2: minimal polynomial of 2^(1/3) + zeta_3
    "S3_x3m2": (9, 9, 0, 3, 6, 3, 1),
}

# per-preset cap on candidate moduli (the sextic's disc is 2^4 * 3^17; divisors
# near the generic cap would force a needlessly large witness budget)
_PRESET_MAX_MODULUS = {"S3_x3m2": 200}


@dataclass
class DegreeFPrime:
    """One prime ideal above p: residue field F_p[t]/(modulus), theta -> t."""

    p: int
    f: int
    modulus: tuple  # monic degree-f factor of poly mod p, coeffs low -> high

    @property
    def root(self) -> int:
        """Residue of theta for a degree-1 prime."""
        if self.f != 1:
            raise ValueError("root is only defined for degree-1 primes")
        return (-self.modulus[0]) % self.p

    @property
    def norm(self) -> int:
        return self.p**self.f


@dataclass(eq=False)
class GaloisFieldSpec:
    name: str
    poly: tuple[int, ...]
    n_K: int
    disc: int
    m_K: int
    n_A: int
    G_mK: frozenset[int]
    overrides_used: bool = False
    _split_bound: int = 0
    _split_list: np.ndarray = dc_field(default_factory=lambda: np.empty(0, dtype=np.int64))
    _roots_memo: dict = dc_field(default_factory=dict)

    def split_primes(self, bound: int) -> np.ndarray:
        """All completely split p <= bound with p not dividing disc (no other filters)."""
        if bound > self._split_bound:
            grow = max(bound, 2 * self._split_bound)
            self._split_list = _split_primes_raw(self.poly, self.n_K, self.disc, grow)
            self._split_bound = grow
        lst = self._split_list
        return lst[lst <= bound]

    def roots_mod(self, p: int) -> tuple[int, ...]:
        got = self._roots_memo.get(p)
        if got is None:
            got = tuple(poly_roots_mod_p(self.poly, p))
            self._roots_memo[p] = got
        return got


def _split_primes_raw(poly, n_K, disc, bound) -> np.ndarray:
    ps = sieve_primes(bound)
    if n_K == 1:
        return ps
    out = []
    for p in ps.tolist():
        if disc % p == 0:
            continue
        fp = gfpoly.normalize(poly, p)
        if gfpoly.x_pow_p_mod(fp, p) == (0, 1):
            out.append(p)
    return np.array(out, dtype=np.int64)


def poly_roots_mod_p(poly, p: int) -> list[int]:
    """Distinct roots of poly mod p, ascending."""
    return gfpoly.roots(gfpoly.normalize(poly, p), p)


def B_bound(r: int) -> float:
    """Norm floor for admissible primes: max(5, r^2/4)."""
    return max(5.0, r * r / 4.0)


def split_primes_up_to(field: GaloisFieldSpec, x: int, r: int):
    """Yield (p, roots) for the admissible completely split primes p <= x.

    Filters: B(r) < p, p splits completely, p does not divide disc(poly) or
    m_K, and (for n_K >= 2) p does not divide poly(0), the power-basis
    surrogate for the basis-element condition.
    """
    c0 = field.poly[0]
    for p in field.split_primes(x).tolist():
        if 4 * p <= max(20, r * r):
            continue
        if field.m_K % p == 0:
            continue
        if field.n_K >= 2 and c0 % p == 0:
            continue
        yield p, field.roots_mod(p)


def degree_f_primes(field: GaloisFieldSpec, p: int, f: int) -> list[DegreeFPrime]:
    """The primes above p, provided they all have residue degree f (else [])."""
    if field.disc % p == 0:
        raise ValueError(f"p={p} ramifies (divides disc)")
    fp = gfpoly.normalize(field.poly, p)
    factors = [g for g, _ in gfpoly.factor_squarefree(fp, p)]
    degs = {gfpoly.degree(g) for g in factors}
    if len(degs) != 1:
        raise ArithmeticError(f"non-uniform factor degrees mod {p}: Galois check failed")
    if degs != {f}:
        return []
    return [DegreeFPrime(p=p, f=f, modulus=g) for g in factors]


def reduce_element(field: GaloisFieldSpec, coords, prime: DegreeFPrime):
    """Reduce sum_j coords[j] * theta^j at the given prime.

    Returns an int residue for f = 1, else a gfpoly tuple in F_p[t]/(modulus).
    """
    if len(coords) != field.n_K:
        raise ValueError(f"expected {field.n_K} coordinates")
    p = prime.p
    if prime.f == 1:
        rho = prime.root
        acc = 0
        for c in reversed(coords):
            acc = (acc * rho + c) % p
        return acc
    return gfpoly.mod(gfpoly.normalize(coords, p), prime.modulus, p)


def empirical_norm_residues(field: GaloisFieldSpec, q: int, p_budget: int) -> frozenset[int]:
    """Residues mod q of split primes up to p_budget (the empirical image G_q).

    Warns when some residue has fewer than MIN_WITNESSES witnesses.
    """
    if q < 1:
        raise ValueError("q must be positive")
    if q == 1:
        return frozenset({1})
    ps = field.split_primes(p_budget)
    ps = ps[np.gcd(ps, q) == 1]
    res, counts = np.unique(ps % q, return_counts=True)
    if len(res) and counts.min() < MIN_WITNESSES:
        warnings.warn(
            f"empirical G_{q}: thinnest residue class has {int(counts.min())} "
            f"witnesses (< {MIN_WITNESSES}); increase p_budget",
            stacklevel=2,
        )
    return frozenset(int(v) for v in res)


def abelian_invariants(
    field: GaloisFieldSpec,
    p_budget: int | None = None,
    max_modulus: int = DEFAULT_MAX_MODULUS,
) -> tuple[int, int, frozenset[int]]:
    """Measure (m_K, n_A, G_mK) from split-prime residues.

    Candidate moduli q run over divisors of 4*|disc(poly)| up to max_modulus.
    For each, the empirical index I(q) = phi(q)/|G_q| is computed at half and
    full budget; unstable candidates are discarded. n_A is the maximal stable
    index, m_K the least q attaining it. Raises if nothing stable remains
    (supply overrides in that case).
    """
    cands = [q for q in divisors_from_factors(factorize_slow(4 * abs(field.disc))) if q <= max_modulus]
    if p_budget is None:
        p_budget = max(20000, 100 * max(cands))
    if p_budget < 100 * max(cands):
        raise ValueError(f"p_budget must be >= 100 * max candidate modulus ({100 * max(cands)})")
    ps_full = field.split_primes(p_budget)
    half = p_budget // 2
    best: dict[int, tuple[int, frozenset[int]]] = {}
    for q in cands:
        g_full = _residue_group(ps_full, q)
        g_half = _residue_group(ps_full[ps_full <= half], q)
        if g_full != g_half or not g_full:
            continue  # unstable under budget doubling
        counts = _witness_counts(ps_full, q)
        if counts and min(counts.values()) < MIN_WITNESSES:
            continue
        phi_q = _phi(q)
        if phi_q % len(g_full) != 0:
            raise ArithmeticError(f"empirical G_{q} is not subgroup-sized: {sorted(g_full)}")
        best[q] = (phi_q // len(g_full), g_full)
    if not best:
        raise RuntimeError(
            "no candidate modulus gave a stable residue group; "
            "increase p_budget/max_modulus or supply overrides (m_K, n_A, G_mK)"
        )
    n_A = max(idx for idx, _ in best.values())
    m_K = min(q for q, (idx, _) in best.items() if idx == n_A)
    return m_K, n_A, frozenset(best[m_K][1])


def _residue_group(ps: np.ndarray, q: int) -> frozenset[int]:
    if q == 1:
        return frozenset({1}) if len(ps) else frozenset()
    ps = ps[np.gcd(ps, q) == 1]
    return frozenset(int(v) for v in np.unique(ps % q))


def _witness_counts(ps: np.ndarray, q: int) -> dict[int, int]:
    if q == 1:
        return {1: len(ps)}
    ps = ps[np.gcd(ps, q) == 1]
    res, counts = np.unique(ps % q, return_counts=True)
    return {int(a): int(c) for a, c in zip(res, counts)}


def _phi(q: int) -> int:
    v = 1
    for p, e in factorize_slow(q).items():
        v *= (p - 1) * p ** (e - 1)
    return v


def _check_galois_degrees(poly, disc, n_probes: int = 100) -> None:
    """Factor mod the first n_probes good primes; abort on non-uniform degrees."""
    probed = 0
    for p in sieve_primes(4000).tolist():
        if disc % p == 0:
            continue
        fp = gfpoly.normalize(poly, p)
        degs = {d for d, _ in gfpoly.distinct_degree_factor(fp, p)}
        if len(degs) != 1:
            raise ArithmeticError(
                f"poly splits with mixed factor degrees mod {p}; the field is not Galois"
            )
        probed += 1
        if probed >= n_probes:
            return
    raise RuntimeError("not enough probe primes below 4000")  # unreachable for sane inputs


def parse_field(
    source,
    name: str | None = None,
    p_budget: int | None = None,
    max_modulus: int = DEFAULT_MAX_MODULUS,
    overrides: dict | None = None,
) -> GaloisFieldSpec:
    """Build a GaloisFieldSpec from a preset name, a JSON file path, or coefficients.

    source: preset key in PRESETS, a path to a JSON file {"name", "poly",
    "overrides"?}, or an iterable of integer coefficients (low -> high, monic).
    """
    if isinstance(source, str):
        if source in PRESETS:
            cap = min(max_modulus, _PRESET_MAX_MODULUS.get(source, max_modulus))
            return _build_field(PRESETS[source], name or source, p_budget, cap, overrides)
        with open(source) as fh:
            data = json.load(fh)
        ov = data.get("overrides")
        if overrides:
            ov = {**(ov or {}), **overrides}
        return _build_field(
            tuple(data["poly"]), name or data.get("name", "field"), p_budget, max_modulus, ov
        )
    return _build_field(tuple(source), name or "field", p_budget, max_modulus, overrides)


_field_memo: dict[tuple, GaloisFieldSpec] = {}


def _build_field(poly, name, p_budget, max_modulus, overrides) -> GaloisFieldSpec:
    poly = tuple(int(c) for c in poly)
    key = (poly, name, p_budget, max_modulus, bool(overrides) and tuple(sorted(overrides.items(), key=str)))
    got = _field_memo.get(key)
    if got is not None:
        return got
    if len(poly) < 2:
        raise ValueError("poly must have degree >= 1")
    if poly[-1] != 1:
        raise ValueError("poly must be monic")
    n_K = len(poly) - 1
    disc = _poly_discriminant(poly)
    if disc == 0:
        raise ValueError("poly is not squarefree")
    if n_K > 1:
        import sympy

        x = sympy.symbols("x")
        expr = sum(c * x**i for i, c in enumerate(poly))
        if not sympy.Poly(expr, x).is_irreducible:
            raise ValueError("poly is reducible over Q")
        _check_galois_degrees(poly, disc)
    spec = GaloisFieldSpec(
        name=name, poly=poly, n_K=n_K, disc=disc, m_K=1, n_A=1, G_mK=frozenset({1})
    )
    if overrides:
        spec.m_K = int(overrides["m_K"])
        spec.n_A = int(overrides["n_A"])
        spec.G_mK = frozenset(int(v) for v in overrides["G_mK"])
        spec.overrides_used = True
    elif n_K == 1:
        spec.m_K, spec.n_A, spec.G_mK = 1, 1, frozenset({1})
    else:
        spec.m_K, spec.n_A, spec.G_mK = abelian_invariants(spec, p_budget, max_modulus)
    _validate_group(spec)
    _field_memo[key] = spec
    return spec


def _validate_group(spec: GaloisFieldSpec) -> None:
    m, G = spec.m_K, spec.G_mK
    if m == 1:
        if G != frozenset({1}):
            raise ValueError("G_mK must be {1} when m_K = 1")
    else:
        if 1 not in G:
            raise ValueError("G_mK must contain 1")
        for a in G:
            if not 1 <= a < m or math.gcd(a, m) != 1:
                raise ValueError(f"G_mK element {a} is not a unit residue mod m_K={m}")
            for b in G:
                if (a * b) % m not in G:
                    raise ValueError("G_mK is not closed under multiplication")
    if spec.n_A * len(G) != _phi(m):
        raise ValueError(f"n_A * |G_mK| must equal phi(m_K): {spec.n_A}*{len(G)} != {_phi(m)}")


def _poly_discriminant(poly: tuple[int, ...]) -> int:
    """disc(poly) via sympy (degree 1 has discriminant 1 by convention)."""
    if len(poly) == 2:
        return 1
    import sympy

    x = sympy.symbols("x")
    expr = sum(c * x**i for i, c in enumerate(poly))
    return int(sympy.discriminant(expr, x))
