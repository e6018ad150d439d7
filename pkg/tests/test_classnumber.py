"""Class numbers, Kronecker symbol, and L-values at s=1.

The reduced-forms oracles live in _oracles and recount everything by direct
form enumeration, independent of the square-divisor recursion in the package.
"""

import math
import random
from fractions import Fraction

import pytest
import sympy

from _oracles import class_number_forms, hurwitz_all_forms
from ltavg import (
    L1_formula,
    L1_series,
    class_number_h,
    hurwitz_H,
    is_fundamental,
    is_valid_discriminant,
    kronecker,
    unit_count_w,
)


def test_hurwitz_spot_values():
    assert hurwitz_H(-3) == Fraction(1, 3)
    assert hurwitz_H(-4) == Fraction(1, 2)
    assert hurwitz_H(-12) == Fraction(4, 3)
    assert hurwitz_H(-16) == Fraction(3, 2)
    assert hurwitz_H(-20) == 2
    assert hurwitz_H(-27) == Fraction(4, 3)


def test_hurwitz_matches_forms_oracle():
    # the full sweep down to -2000 runs in the acceptance suite
    for D in range(-3, -500, -1):
        if D % 4 in (0, 1):
            assert hurwitz_H(D) == hurwitz_all_forms(D), D


def test_hurwitz_rejects_non_discriminants():
    for D in (0, -1, -2, -5, 4, 5, -6):
        with pytest.raises(ValueError):
            hurwitz_H(D)


def test_class_number_matches_primitive_forms_oracle():
    for D in range(-3, -800, -1):
        if D % 4 in (0, 1):
            assert class_number_h(D) == class_number_forms(D), D


def test_class_number_classical_values():
    assert class_number_h(-4) == 1
    assert class_number_h(-23) == 3
    assert class_number_h(-47) == 5
    assert class_number_h(-163) == 1


def test_unit_count():
    assert unit_count_w(-3) == 6
    assert unit_count_w(-4) == 4
    assert unit_count_w(-7) == 2
    assert unit_count_w(-12) == 2


def test_discriminant_validity():
    for d in range(-1, -60, -1):
        assert is_valid_discriminant(d) == (d % 4 in (0, 1))


def test_fundamental_iff_no_square_split():
    # d is fundamental exactly when no k > 1 has k^2 | d with d / k^2 still
    # a discriminant
    for d in range(-3, -300, -1):
        if not is_valid_discriminant(d):
            continue
        reducible = any(
            d % (k * k) == 0 and is_valid_discriminant(d // (k * k))
            for k in range(2, int(math.isqrt(-d)) + 1)
        )
        assert is_fundamental(d) == (not reducible), d


def test_kronecker_matches_jacobi_on_odd_moduli():
    rng = random.Random(23)
    for _ in range(400):
        a = rng.randrange(-500, 500)
        n = rng.randrange(1, 500) * 2 + 1
        assert kronecker(a, n) == sympy.jacobi_symbol(a, n), (a, n)


def test_kronecker_at_two_and_units():
    # (a/2) depends on a mod 8; (a/1) is always 1
    for a in range(-40, 41):
        if a % 2 == 0:
            assert kronecker(a, 2) == 0
        elif a % 8 in (1, 7):
            assert kronecker(a, 2) == 1
        else:
            assert kronecker(a, 2) == -1
        assert kronecker(a, 1) == 1


def test_kronecker_rejects_negative_modulus():
    # the character attached to a discriminant only evaluates at n >= 0
    with pytest.raises(ValueError):
        kronecker(5, -3)


def test_kronecker_multiplicative_in_modulus():
    rng = random.Random(29)
    for _ in range(300):
        a = rng.randrange(-300, 300)
        m = rng.randrange(1, 60)
        n = rng.randrange(1, 60)
        assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


def test_kronecker_is_legendre_at_odd_primes():
    for d in (-3, -4, -7, -8, -11, -15, -20):
        for p in (3, 5, 7, 11, 13, 17, 19, 23):
            if d % p == 0:
                continue
            ls = pow(d, (p - 1) // 2, p)
            assert kronecker(d, p) == (1 if ls == 1 else -1), (d, p)


def test_L1_classical_anchors():
    # L(1, chi_{-4}) = pi/4 and L(1, chi_{-3}) = pi/(3 sqrt 3)
    assert abs(L1_formula(-4) - math.pi / 4) < 1e-12
    assert abs(L1_formula(-3) - math.pi / (3 * math.sqrt(3))) < 1e-12


def test_L1_series_agrees_with_formula():
    # mixed fundamental and non-fundamental discriminants
    for d in (-3, -4, -8, -12, -16, -20, -27, -36, -43, -48, -100, -163):
        assert abs(L1_series(d, 1e-5) - L1_formula(d)) < 1e-4, d


def test_L1_positive():
    for d in range(-3, -200, -1):
        if is_valid_discriminant(d):
            assert L1_formula(d) > 0
