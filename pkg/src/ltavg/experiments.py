"""Desk-scale statistics for reductions of curve boxes over a Galois field.

Each runner aggregates per-prime contributions.  Quantities backed by exact
identities (box counts, class-number sums, reduction counts) are accumulated
in integer or rational arithmetic; float aggregates use compensated summation
in a canonical prime order.  The prime loop can be sharded across forked
worker processes, and results are merged in the same canonical order, so any
worker count produces an identical report body.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from multiprocessing import get_context

import numpy as np

from . import curves
from .classnumber import L1_formula, hurwitz_H
from .curves import CurveModel, ReducedCurve, small_field, trace_matrix, trace_mod_p
from .ltconstant import constant_product, constant_sum, pi_half
from .numberfield import (
    DegreeFPrime,
    GaloisFieldSpec,
    degree_f_primes,
    empirical_norm_residues,
    parse_field,
    reduce_element,
    split_primes_up_to,
)
from .primes import divisors_from_factors, factorize, sieve_primes, spf_sieve
from .report import ExperimentReport, constant_provenance, make_row

DESK_CARDINALITY_BOUND = 10**6


@dataclass(frozen=True)
class CurveBox:
    """A coordinate box of Weierstrass models: centers a1, a2 and radii b1, b2.

    Every vector has one entry per field coordinate.  The box holds the models
    y^2 = x^3 + alpha*x + beta with alpha in a1 +- b1 and beta in a2 +- b2
    componentwise; identical curves may repeat and count with multiplicity.
    """

    a1: tuple
    b1: tuple
    a2: tuple
    b2: tuple

    def __post_init__(self):
        for name in ("a1", "b1", "a2", "b2"):
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))
        n = len(self.a1)
        if n == 0 or any(len(getattr(self, name)) != n for name in ("b1", "a2", "b2")):
            raise ValueError("center and radius vectors need equal positive length")
        if any(v <= 0 for v in self.b1 + self.b2):
            raise ValueError("radii must be positive")

    @property
    def n(self) -> int:
        return len(self.a1)

    @property
    def cardinality(self) -> int:
        out = 1
        for rad in self.b1 + self.b2:
            out *= 2 * rad + 1
        return out

    @property
    def volume(self) -> int:
        out = 4**self.n
        for r1, r2 in zip(self.b1, self.b2):
            out *= r1 * r2
        return out

    @property
    def volume_alpha(self) -> int:
        return 2**self.n * math.prod(self.b1)

    @property
    def volume_beta(self) -> int:
        return 2**self.n * math.prod(self.b2)

    @property
    def volume_min(self) -> int:
        return 2 * min(self.b1 + self.b2)

    def alpha_ranges(self) -> list[range]:
        return [range(c - r, c + r + 1) for c, r in zip(self.a1, self.b1)]

    def beta_ranges(self) -> list[range]:
        return [range(c - r, c + r + 1) for c, r in zip(self.a2, self.b2)]

    def describe(self) -> str:
        def vec(v):
            return "(" + ",".join(str(c) for c in v) + ")"

        return f"a1={vec(self.a1)};b1={vec(self.b1)};a2={vec(self.a2)};b2={vec(self.b2)}"

    @classmethod
    def from_string(cls, text: str) -> "CurveBox":
        parts = {}
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            key, sep, value = chunk.partition("=")
            if not sep:
                raise ValueError(f"malformed box component {chunk!r}")
            parts[key.strip()] = _parse_vector(value)
        missing = {"a1", "b1", "a2", "b2"} - set(parts)
        if missing:
            raise ValueError(f"box string lacks {sorted(missing)}")
        return cls(a1=parts["a1"], b1=parts["b1"], a2=parts["a2"], b2=parts["b2"])


def _parse_vector(text: str) -> tuple:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    items = [t for t in text.replace(",", " ").split() if t]
    if not items:
        raise ValueError("empty vector in box string")
    return tuple(int(t) for t in items)


def _as_field(field) -> GaloisFieldSpec:
    if isinstance(field, GaloisFieldSpec):
        return field
    return parse_field(field)


def _check_box(field: GaloisFieldSpec, box: CurveBox) -> None:
    if box.n != field.n_K:
        raise ValueError(f"box has {box.n} coordinates but the field needs {field.n_K}")
    if box.cardinality > DESK_CARDINALITY_BOUND:
        raise ValueError(f"box cardinality {box.cardinality} exceeds the desk bound")


def _merge_checkpoints(x: int, checkpoints) -> list[int]:
    xs = sorted({int(c) for c in checkpoints} | {int(x)})
    if xs[0] < 2:
        raise ValueError("checkpoints must be at least 2")
    if xs[-1] > int(x):
        raise ValueError("checkpoints cannot exceed x")
    return xs


# ---------------------------------------------------------------------------
# prime-sharded execution


_WORK: dict = {}


def _dispatch(payload):
    name, shard = payload
    return _WORKER_FNS[name](shard)


def _map_primes(name: str, items: list, workers: int, **config) -> list:
    """Run a per-prime worker over items, optionally sharded across forks.

    Worker functions read their configuration from the module-level _WORK
    dict, which forked children inherit; only shards and result lists cross
    the process boundary.
    """
    _WORK.clear()
    _WORK.update(config)
    try:
        if workers <= 1 or len(items) < 2 * workers:
            return list(_WORKER_FNS[name](items))
        shards = [items[i::workers] for i in range(workers)]
        ctx = get_context("fork")
        with ctx.Pool(processes=workers) as pool:
            parts = pool.map(_dispatch, [(name, shard) for shard in shards])
        merged = []
        for part in parts:
            merged.extend(part)
        return merged
    finally:
        _WORK.clear()


# ---------------------------------------------------------------------------
# per-curve prime counting


def _eval_at_root(coords, root: int, p: int) -> int:
    acc = 0
    for c in reversed(coords):
        acc = (acc * root + c) % p
    return acc


def _good_primes_for_degree(field: GaloisFieldSpec, f: int, x: int) -> list[int]:
    """Rational primes p with p^f <= x and p coprime to 6*disc."""
    top = int(round(x ** (1.0 / f)))
    while (top + 1) ** f <= x:
        top += 1
    while top > 1 and top**f > x:
        top -= 1
    out = []
    for p in sieve_primes(top).tolist():
        if p <= 3 or field.disc % p == 0:
            continue
        out.append(p)
    return out


def _singular_index(fld, ai: int, bi: int) -> bool:
    disc = fld.add_indices(
        fld.mul_index(4 % fld.p, fld.pow_index(ai, 3)),
        fld.mul_index(27 % fld.p, fld.pow_index(bi, 2)),
    )
    return int(disc) == 0


def pi_E_rf(field, curve: CurveModel, r: int, f: int, x) -> int:
    """Number of degree-f primes with norm at most x where the reduced curve
    has trace of Frobenius r.  Primes of bad reduction are skipped."""
    field = _as_field(field)
    if f < 1:
        raise ValueError("degree f must be positive")
    if x < 2:
        raise ValueError("x must be at least 2")
    if len(curve.alpha) != field.n_K:
        raise ValueError(f"curve coordinates must have length {field.n_K}")
    r, f, x = int(r), int(f), int(x)
    count = 0
    if f == 1:
        for p, roots in split_primes_up_to(field, x, r):
            for root in roots:
                a = _eval_at_root(curve.alpha, root, p)
                b = _eval_at_root(curve.beta, root, p)
                if (4 * a * a * a + 27 * b * b) % p == 0:
                    continue
                if trace_mod_p(a, b, p) == r:
                    count += 1
        return count
    for p in _good_primes_for_degree(field, f, x):
        for pr in degree_f_primes(field, p, f):
            fld = small_field(p, pr.modulus)
            ai = fld.element_index(reduce_element(field, curve.alpha, pr))
            bi = fld.element_index(reduce_element(field, curve.beta, pr))
            if _singular_index(fld, ai, bi):
                continue
            a_coeffs = fld.index_coeffs(ai)
            b_coeffs = fld.index_coeffs(bi)
            if curves.field_trace(a_coeffs, b_coeffs, fld) == r:
                count += 1
    return count


# ---------------------------------------------------------------------------
# residue multiplicity histograms for one box side


def _side_histogram_mod_p(centers, radii, p: int, root: int) -> np.ndarray:
    """Multiplicity of each residue of the reduced coordinate sum mod p."""
    hist = None
    weight = 1
    for c, rad in zip(centers, radii):
        vals = (np.arange(c - rad, c + rad + 1, dtype=np.int64) * weight) % p
        if hist is None:
            hist = np.bincount(vals, minlength=p).astype(np.int64)
        else:
            contrib = np.zeros(p, dtype=np.int64)
            nz = np.flatnonzero(hist)
            np.add.at(contrib, (nz[:, None] + vals[None, :]) % p, hist[nz, None])
            hist = contrib
        weight = weight * root % p
    return hist


def _side_histogram_ext(centers, radii, fld) -> np.ndarray:
    """Multiplicity of each residue-field element index over a coordinate box."""
    t_idx = fld.element_index((0, 1))
    hist = None
    w_idx = 1
    for c, rad in zip(centers, radii):
        scalars = np.arange(c - rad, c + rad + 1, dtype=np.int64) % fld.p
        vals = np.array([fld.mul_index(int(s), w_idx) for s in scalars.tolist()], dtype=np.int64)
        if hist is None:
            hist = np.bincount(vals, minlength=fld.q).astype(np.int64)
        else:
            contrib = np.zeros(fld.q, dtype=np.int64)
            nz = np.flatnonzero(hist)
            idx = fld.add_indices(nz[:, None], vals[None, :])
            np.add.at(contrib, idx, hist[nz, None])
            hist = contrib
        w_idx = fld.mul_index(w_idx, t_idx)
    return hist


def _joint_histogram(centers, radii, p1: int, root1: int, p2: int, root2: int) -> np.ndarray:
    """Joint multiplicity of coordinate-sum residues mod two distinct primes."""
    hist = None
    w1 = w2 = 1
    for c, rad in zip(centers, radii):
        vals = np.arange(c - rad, c + rad + 1, dtype=np.int64)
        u = (vals * w1) % p1
        v = (vals * w2) % p2
        if hist is None:
            hist = np.zeros((p1, p2), dtype=np.int64)
            np.add.at(hist, (u, v), 1)
        else:
            contrib = np.zeros((p1, p2), dtype=np.int64)
            nz1, nz2 = np.nonzero(hist)
            iu = (nz1[:, None] + u[None, :]) % p1
            iv = (nz2[:, None] + v[None, :]) % p2
            np.add.at(contrib, (iu, iv), hist[nz1, nz2][:, None])
            hist = contrib
        w1 = w1 * root1 % p1
        w2 = w2 * root2 % p2
    return hist


def box_prime_count(field, box: CurveBox, r: int, p: int, root: int) -> int:
    """Models in the box whose reduction at the degree-1 prime (p, root) is
    nonsingular with trace r, counted with multiplicity."""
    mult_a = _side_histogram_mod_p(box.a1, box.b1, p, root)
    mult_b = _side_histogram_mod_p(box.a2, box.b2, p, root)
    av = np.flatnonzero(mult_a)
    bv = np.flatnonzero(mult_b)
    traces, nonsingular = trace_matrix(p, av, bv)
    match = ((traces == r) & nonsingular).astype(np.int64)
    return int(mult_a[av] @ match @ mult_b[bv])


# ---------------------------------------------------------------------------
# workers


def _box_prime_worker(shard):
    field, box, r = _WORK["field"], _WORK["box"], _WORK["r"]
    out = []
    for p, roots in shard:
        total = 0
        for root in roots:
            total += box_prime_count(field, box, r, p, root)
        out.append((p, total))
    return out


def _box_extension_worker(shard):
    field, box, r, f = _WORK["field"], _WORK["box"], _WORK["r"], _WORK["f"]
    out = []
    for p in shard:
        total = 0
        for pr in degree_f_primes(field, p, f):
            fld = small_field(p, pr.modulus)
            mult_a = _side_histogram_ext(box.a1, box.b1, fld)
            mult_b = _side_histogram_ext(box.a2, box.b2, fld)
            av = np.flatnonzero(mult_a)
            bv = np.flatnonzero(mult_b)
            for ai in av.tolist():
                for bi in bv.tolist():
                    if _singular_index(fld, ai, bi):
                        continue
                    trace = curves.field_trace(fld.index_coeffs(ai), fld.index_coeffs(bi), fld)
                    if trace == r:
                        total += int(mult_a[ai]) * int(mult_b[bi])
        out.append((p, total))
    return out


def _model_coordinate_matrix(centers, radii) -> np.ndarray:
    axes = [np.arange(c - r, c + r + 1, dtype=np.int64) for c, r in zip(centers, radii)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


def _variance_worker(shard):
    field, box, r = _WORK["field"], _WORK["box"], _WORK["r"]
    A = _model_coordinate_matrix(box.a1, box.b1)
    B = _model_coordinate_matrix(box.a2, box.b2)
    counts = np.zeros((A.shape[0], B.shape[0]), dtype=np.int64)
    for p, roots in shard:
        for root in roots:
            powers = np.array([pow(root, j, p) for j in range(field.n_K)], dtype=np.int64)
            a_red = (A @ powers) % p
            b_red = (B @ powers) % p
            av = np.unique(a_red)
            bv = np.unique(b_red)
            traces, nonsingular = trace_matrix(p, av, bv)
            match = (traces == r) & nonsingular
            ra = np.searchsorted(av, a_red)
            rb = np.searchsorted(bv, b_red)
            counts += match[ra[:, None], rb[None, :]]
    return [counts]


def _hurwitz_worker(shard):
    r = _WORK["r"]
    out = []
    for p in shard:
        h = hurwitz_H(r * r - 4 * p)
        out.append((p, h.numerator, h.denominator * p))
    return out


def _a1_worker(shard):
    r, spf = _WORK["r"], _WORK["spf"]
    out = []
    for p in shard:
        m = 4 * p - r * r
        square_part = 1
        for ell, e in factorize(m, spf).items():
            square_part *= ell ** (e // 2)
        logp = math.log(p)
        for k in sorted(divisors_from_factors(factorize(square_part, spf))):
            d = -(m // (k * k))
            if d % 4 in (0, 1):
                out.append((p, k, L1_formula(d) * logp / k))
    return out


_WORKER_FNS = {
    "box1": _box_prime_worker,
    "boxf": _box_extension_worker,
    "variance": _variance_worker,
    "hurwitz": _hurwitz_worker,
    "a1": _a1_worker,
}


# ---------------------------------------------------------------------------
# experiment runners


def box_average(field, box: CurveBox, r: int, f: int, x, checkpoints=(), constant=None, workers: int = 1) -> ExperimentReport:
    """Average prime count over the box, compared for f=1 against the
    predicted multiple of pi_half at each checkpoint."""
    started = time.time()
    field = _as_field(field)
    _check_box(field, box)
    r, f, x = int(r), int(f), int(x)
    xs = _merge_checkpoints(x, checkpoints)
    if f == 1:
        items = list(split_primes_up_to(field, x, r))
        per_prime = _map_primes("box1", items, workers, field=field, box=box, r=r)
        if constant is None:
            constant = constant_product(field, r)
    else:
        items = _good_primes_for_degree(field, f, x)
        per_prime = _map_primes("boxf", items, workers, field=field, box=box, r=r, f=f)
        constant = None
    per_prime.sort()
    card = box.cardinality
    rows = []
    idx = 0
    cum = 0
    for xc in xs:
        while idx < len(per_prime) and per_prime[idx][0] ** f <= xc:
            cum += per_prime[idx][1]
            idx += 1
        theoretical = constant.value * pi_half(xc) if constant is not None else None
        rows.append(make_row(xc, cum / card, theoretical))
    report = ExperimentReport(
        kind="box-average",
        config={
            "field": field.name,
            "r": r,
            "f": f,
            "x": x,
            "box": box.describe(),
            "cardinality": card,
            "volume": box.volume,
        },
        rows=rows,
        constant=constant_provenance(constant) if constant is not None else None,
    )
    return report.finish(started)


def box_variance(field, box: CurveBox, r: int, x, C: float, workers: int = 1) -> float:
    """Mean squared deviation of per-curve prime counts from C*pi_half(x)."""
    field = _as_field(field)
    _check_box(field, box)
    r, x = int(r), int(x)
    items = list(split_primes_up_to(field, x, r))
    parts = _map_primes("variance", items, workers, field=field, box=box, r=r)
    m1 = math.prod(2 * rad + 1 for rad in box.b1)
    m2 = math.prod(2 * rad + 1 for rad in box.b2)
    counts = np.zeros((m1, m2), dtype=np.int64)
    for mat in parts:
        counts += mat
    dev = counts.astype(np.float64) - C * pi_half(x)
    return float(np.mean(dev * dev))


def _hurwitz_parts(field: GaloisFieldSpec, r: int, x: int, workers: int) -> list:
    items = [p for p, _ in split_primes_up_to(field, x, r)]
    parts = _map_primes("hurwitz", items, workers, r=r)
    parts.sort()
    return parts


def hurwitz_prime_sum(field, r: int, x, workers: int = 1) -> float:
    """Exact-rational accumulation of H(r^2-4p)/p over admissible split
    primes up to x, scaled by half the field degree."""
    field = _as_field(field)
    r, x = int(r), int(x)
    if x < 7:
        raise ValueError("x must be at least 7")
    num, den = 0, 1
    for _, hn, hd in _hurwitz_parts(field, r, x, workers):
        num = num * hd + hn * den
        den *= hd
    return float(Fraction(num, den) * Fraction(field.n_K, 2))


def hurwitz_sum_report(field, r: int, x, checkpoints=(), constant=None, workers: int = 1) -> ExperimentReport:
    started = time.time()
    field = _as_field(field)
    r, x = int(r), int(x)
    if x < 7:
        raise ValueError("x must be at least 7")
    xs = _merge_checkpoints(x, checkpoints)
    parts = _hurwitz_parts(field, r, x, workers)
    if constant is None:
        constant = constant_product(field, r)
    scale = Fraction(field.n_K, 2)
    rows = []
    num, den, idx = 0, 1, 0
    for xc in xs:
        while idx < len(parts) and parts[idx][0] <= xc:
            _, hn, hd = parts[idx]
            num = num * hd + hn * den
            den *= hd
            idx += 1
        rows.append(make_row(xc, float(Fraction(num, den) * scale), constant.value * pi_half(xc)))
    report = ExperimentReport(
        kind="hurwitz-sum",
        config={"field": field.name, "r": r, "x": x},
        rows=rows,
        constant=constant_provenance(constant),
    )
    return report.finish(started)


def _a1_parts(field: GaloisFieldSpec, r: int, x: int, workers: int) -> list:
    items = [p for p, _ in split_primes_up_to(field, x, r)]
    spf = spf_sieve(4 * x + 1)
    parts = _map_primes("a1", items, workers, r=r, spf=spf)
    parts.sort()
    return parts


def weighted_L_average(field, r: int, x, workers: int = 1) -> float:
    """The degree-weighted average of L(1, chi) over admissible primes and
    square divisors of 4p - r^2."""
    field = _as_field(field)
    r, x = int(r), int(x)
    if x < 7:
        raise ValueError("x must be at least 7")
    parts = _a1_parts(field, r, x, workers)
    return field.n_K * math.fsum(term for _, _, term in parts)


def a1_report(field, r: int, x, checkpoints=(), constant=None, workers: int = 1) -> ExperimentReport:
    started = time.time()
    field = _as_field(field)
    r, x = int(r), int(x)
    if x < 7:
        raise ValueError("x must be at least 7")
    xs = _merge_checkpoints(x, checkpoints)
    parts = _a1_parts(field, r, x, workers)
    if constant is None:
        constant = constant_product(field, r)
    rows = []
    idx = 0
    terms = []
    for xc in xs:
        while idx < len(parts) and parts[idx][0] <= xc:
            terms.append(parts[idx][2])
            idx += 1
        empirical = field.n_K * math.fsum(terms)
        rows.append(make_row(xc, empirical, (math.pi / 2) * constant.value * xc))
    report = ExperimentReport(
        kind="a1-average",
        config={"field": field.name, "r": r, "x": x},
        rows=rows,
        constant=constant_provenance(constant),
    )
    return report.finish(started)


# ---------------------------------------------------------------------------
# reduction counts at fixed primes


def _as_degree_one_prime(field: GaloisFieldSpec, prime, root=None) -> DegreeFPrime:
    if isinstance(prime, DegreeFPrime):
        if prime.f != 1:
            raise ValueError("a degree-1 prime is required")
        return prime
    p = int(prime)
    options = degree_f_primes(field, p, 1)
    if not options:
        raise ValueError(f"p={p} has no degree-1 primes here")
    options.sort(key=lambda pr: pr.root)
    if root is None:
        return options[0]
    for pr in options:
        if pr.root == root % p:
            return pr
    raise ValueError(f"no prime above {p} with the requested root")


def _validated_target(field: GaloisFieldSpec, target: ReducedCurve, pr: DegreeFPrime):
    p = pr.p
    if p <= 3 or (field.disc % p == 0):
        raise ValueError("the prime must be coprime to 6 and the field discriminant")
    if target.f != 1 or target.p != p:
        raise ValueError("target must be a prime-field curve over the same p")
    a0 = curves._as_prime_field_int(target.a, p)
    b0 = curves._as_prime_field_int(target.b, p)
    if curves.is_singular(a0, b0, p):
        raise ValueError("singular target rejected")
    return a0, b0


def count_box_reductions(field, box: CurveBox, target: ReducedCurve, prime, root=None):
    """Exact number of box models whose reduction at the prime is isomorphic
    to the target, with the first-order prediction (p-1)*V/(p^2*#Aut).

    Returns the pair (exact_count, main_term).
    """
    field = _as_field(field)
    _check_box(field, box)
    pr = _as_degree_one_prime(field, prime, root)
    a0, b0 = _validated_target(field, target, pr)
    p = pr.p
    mult_a = _side_histogram_mod_p(box.a1, box.b1, p, pr.root)
    mult_b = _side_histogram_mod_p(box.a2, box.b2, p, pr.root)
    exact = 0
    for ua, ub in curves.isomorphism_orbit(a0, b0, p):
        exact += int(mult_a[ua]) * int(mult_b[ub])
    aut = curves.aut_size(a0, b0, p)
    main = (p - 1) * box.volume / (p * p * aut)
    return exact, main


def count_box_reductions_pair(field, box: CurveBox, target1: ReducedCurve, prime1, target2: ReducedCurve, prime2):
    """Joint version of count_box_reductions at two distinct rational primes."""
    field = _as_field(field)
    _check_box(field, box)
    pr1 = _as_degree_one_prime(field, prime1)
    pr2 = _as_degree_one_prime(field, prime2)
    if pr1.p == pr2.p:
        raise ValueError("the two primes must lie over distinct rational primes")
    a1, b1 = _validated_target(field, target1, pr1)
    a2, b2 = _validated_target(field, target2, pr2)
    p1, p2 = pr1.p, pr2.p
    joint_a = _joint_histogram(box.a1, box.b1, p1, pr1.root, p2, pr2.root)
    joint_b = _joint_histogram(box.a2, box.b2, p1, pr1.root, p2, pr2.root)
    orbit1 = curves.isomorphism_orbit(a1, b1, p1)
    orbit2 = curves.isomorphism_orbit(a2, b2, p2)
    exact = 0
    for ua1, ub1 in orbit1:
        for ua2, ub2 in orbit2:
            exact += int(joint_a[ua1, ua2]) * int(joint_b[ub1, ub2])
    aut1 = curves.aut_size(a1, b1, p1)
    aut2 = curves.aut_size(a2, b2, p2)
    main = (p1 - 1) * (p2 - 1) * box.volume / ((p1 * p2) ** 2 * aut1 * aut2)
    return exact, main


# ---------------------------------------------------------------------------
# ideal counts in progressions


def theta_K(field, q: int, a: int, x, workers: int = 1) -> float:
    """Log-weighted count of degree-1 primes with norm at most x in the
    residue class a mod q."""
    field = _as_field(field)
    q, a, x = int(q), int(a), int(x)
    if math.gcd(a, q) != 1:
        raise ValueError("the residue a must be coprime to q")
    ps = [p for p in field.split_primes(x).tolist() if p % q == a % q]
    return field.n_K * math.fsum(math.log(p) for p in sorted(ps))


def theta_report(field, q: int, a: int, x, checkpoints=(), workers: int = 1) -> ExperimentReport:
    started = time.time()
    field = _as_field(field)
    q, a, x = int(q), int(a), int(x)
    if math.gcd(a, q) != 1:
        raise ValueError("the residue a must be coprime to q")
    xs = _merge_checkpoints(x, checkpoints)
    group = empirical_norm_residues(field, q, max(10_000, x))
    phi_k = len(group)
    ps = sorted(p for p in field.split_primes(x).tolist() if p % q == a % q)
    rows = []
    idx = 0
    terms = []
    for xc in xs:
        while idx < len(ps) and ps[idx] <= xc:
            terms.append(math.log(ps[idx]))
            idx += 1
        rows.append(make_row(xc, field.n_K * math.fsum(terms), xc / phi_k))
    report = ExperimentReport(
        kind="theta",
        config={
            "field": field.name,
            "q": q,
            "a": a,
            "x": x,
            "norm_classes": sorted(group),
            "residue_in_group": a % q in group,
        },
        rows=rows,
    )
    return report.finish(started)


# ---------------------------------------------------------------------------
# mass identity sweep


def deuring_check(p_max: int) -> ExperimentReport:
    """Verify the isogeny-mass identity for every prime 5 <= p <= p_max and
    every trace in the Hasse range; mismatches are listed in the config."""
    started = time.time()
    rows = []
    mismatches = []
    for p in sieve_primes(int(p_max)).tolist():
        if p < 5:
            continue
        mass_total = Fraction(0)
        expected_total = Fraction(0)
        r_max = isqrt(4 * p - 1)
        for r in range(-r_max, r_max + 1):
            mass = curves.isogeny_mass_oracle(p, r)
            expected = hurwitz_H(r * r - 4 * p) / 2
            if mass != expected:
                mismatches.append([p, r])
            mass_total += mass
            expected_total += expected
        rows.append(make_row(p, float(mass_total), float(expected_total)))
    report = ExperimentReport(
        kind="deuring-check",
        config={"p_max": int(p_max), "mismatches": mismatches},
        rows=rows,
    )
    return report.finish(started)


def constant_report(field, r: int, method: str = "both", k_max: int = 200, n_max: int = 5000, l_max: int = 100_000, workers: int = 1) -> ExperimentReport:
    """Compute the average-constant estimate(s) and wrap them in a report.

    With method="both" the row compares the series value (empirical) against
    the product value (theoretical), so the ratio exposes the gap.
    """
    started = time.time()
    field = _as_field(field)
    r = int(r)
    if method not in ("sum", "product", "both"):
        raise ValueError("method must be sum, product, or both")
    prov = {}
    series = prod = None
    if method in ("product", "both"):
        prod = constant_product(field, r, l_max)
        prov["product"] = constant_provenance(prod)
    if method in ("sum", "both"):
        series = constant_sum(field, r, k_max, n_max, workers=workers)
        prov["sum"] = constant_provenance(series)
    if method == "both":
        rows = [make_row(n_max, series.value, prod.value)]
    elif method == "sum":
        rows = [make_row(n_max, series.value)]
    else:
        rows = [make_row(l_max, prod.value)]
    report = ExperimentReport(
        kind="constant",
        config={"field": field.name, "r": r, "method": method},
        rows=rows,
        constant=prov,
    )
    return report.finish(started)
