"""Desk-scale experiment harness: prime counts over boxes, weighted sums,
reduction counting, and report determinism."""

import json
import math
from fractions import Fraction

import pytest

from ltavg import (
    CurveBox,
    CurveModel,
    aut_size,
    box_average,
    box_variance,
    count_box_reductions,
    count_box_reductions_pair,
    deuring_check,
    hurwitz_prime_sum,
    parse_field,
    pi_E_rf,
    pi_half,
    theta_K,
    weighted_L_average,
)
from ltavg.curves import ReducedCurve
from ltavg.experiments import (
    a1_report,
    constant_report,
    hurwitz_sum_report,
    theta_report,
)
from ltavg.report import ExperimentReport, make_row


def _Q():
    return parse_field("Q")


# ---------------------------------------------------------------- CurveBox

def test_curve_box_geometry():
    box = CurveBox((0,), (15,), (0,), (15,))
    assert box.n == 1
    assert box.cardinality == 31 * 31
    assert box.volume == 4 * 15 * 15
    assert box.volume_alpha == 30 and box.volume_beta == 30
    assert box.volume_min == 30
    assert list(box.alpha_ranges()[0]) == list(range(-15, 16))


def test_curve_box_degree_two():
    box = CurveBox((0, 1), (2, 3), (4, 5), (6, 7))
    assert box.n == 2
    assert box.cardinality == 5 * 7 * 13 * 15
    assert box.volume == 16 * 2 * 3 * 6 * 7
    assert box.volume_min == 2 * 2


def test_curve_box_string_roundtrip():
    box = CurveBox((12345,), (15,), (67890,), (15,))
    assert CurveBox.from_string(box.describe()) == box
    assert CurveBox.from_string("a1=(0);b1=(5);a2=(0);b2=(5)") == CurveBox(
        (0,), (5,), (0,), (5,)
    )


def test_curve_box_validation():
    with pytest.raises(ValueError):
        CurveBox((0,), (5,), (0,), (5, 6))  # mismatched lengths
    with pytest.raises(ValueError):
        CurveBox((0,), (0,), (0,), (5,))  # empty side
    with pytest.raises(ValueError):
        CurveBox.from_string("a1=(0);b1=(5)")


# ---------------------------------------------------------------- pi_E_rf

def test_pi_counts_match_direct_filtered_enumeration():
    Q = _Q()
    curve = CurveModel((1,), (1,))
    # direct recount from the split-prime stream
    from ltavg import split_primes_up_to, trace_mod_p

    for r in (0, 1, -2):
        want = 0
        for p, _ in split_primes_up_to(Q, 400, r):
            if (4 + 27) % p == 0:
                continue
            if trace_mod_p(1, 1, p) == r:
                want += 1
        assert pi_E_rf(Q, curve, r, 1, 400) == want


def test_pi_trace_window_empty():
    Q = _Q()
    # 4p never exceeds r^2 below x, so no prime qualifies
    assert pi_E_rf(Q, CurveModel((1,), (1,)), 20, 1, 50) == 0


def test_pi_additivity_over_traces():
    Q = _Q()
    x = 500
    from ltavg import split_primes_up_to, trace_mod_p

    good = 0
    for p, _ in split_primes_up_to(Q, x, 1):
        if (4 + 27) % p:
            good += 1
    r_bound = int(2 * math.isqrt(x)) + 2
    total = sum(pi_E_rf(Q, CurveModel((1,), (1,)), r, 1, x) for r in range(-r_bound, r_bound + 1))
    assert total == good


def test_pi_extension_degree():
    Qi = parse_field("Q_i")
    curve = CurveModel((1, 0), (3, 0))
    # the only inert prime with norm p^2 <= 50 is p = 7, and the trace of
    # this model over its residue field is -10 (checked in the curves tests)
    assert pi_E_rf(Qi, curve, -10, 2, 50) == 1
    assert pi_E_rf(Qi, curve, -9, 2, 50) == 0


# ---------------------------------------------------------------- averages

def test_hurwitz_prime_sum_tiny_value_exact():
    # only p = 7 contributes below 10: H(-27)/7 / 2 = (4/3)/14
    assert hurwitz_prime_sum(_Q(), 1, 10) == float(Fraction(2, 21))


def test_hurwitz_prime_sum_rejects_tiny_x():
    with pytest.raises(ValueError):
        hurwitz_prime_sum(_Q(), 1, 5)


def test_weighted_L_average_symmetric_in_trace_sign():
    Q = _Q()
    for r in (1, 2, 3):
        assert weighted_L_average(Q, r, 3000) == weighted_L_average(Q, -r, 3000)


def test_weighted_L_average_tracks_hurwitz_route():
    # both routes estimate the same constant once normalized: the weighted
    # L-sum by (pi/2) x, the class-number sum by the comparison integral
    Q = _Q()
    x = 20000
    ra = weighted_L_average(Q, 1, x) / (math.pi / 2 * x)
    rh = hurwitz_prime_sum(Q, 1, x) / pi_half(x)
    assert abs(ra - rh) / rh < 0.08


def test_box_average_matches_per_model_enumeration():
    Q = _Q()
    box = CurveBox((0,), (2,), (0,), (2,))
    rep = box_average(Q, box, 1, 1, 300)
    total = 0
    for a in range(-2, 3):
        for b in range(-2, 3):
            total += pi_E_rf(Q, CurveModel((a,), (b,)), 1, 1, 300)
    assert rep.rows[-1]["empirical"] == total / box.cardinality


def test_box_average_checkpoint_rows():
    Q = _Q()
    box = CurveBox((0,), (3,), (0,), (3,))
    rep = box_average(Q, box, 1, 1, 500, checkpoints=(100, 250))
    assert [row["x"] for row in rep.rows] == [100, 250, 500]
    empiricals = [row["empirical"] for row in rep.rows]
    assert empiricals == sorted(empiricals)  # cumulative counts never drop


def test_box_average_rejects_oversized_box():
    Q = _Q()
    with pytest.raises(ValueError):
        box_average(Q, CurveBox((0,), (600,), (0,), (600,)), 1, 1, 100)


def test_box_variance_all_zero_counts():
    Q = _Q()
    # no prime clears the 4p > 20 floor below x = 6, so every model counts
    # zero and the variance collapses to the squared centering term
    box = CurveBox((2,), (1,), (5,), (1,))
    c = 0.4
    want = (c * pi_half(6)) ** 2
    assert abs(box_variance(Q, box, 1, 6, c) - want) < 1e-12


# ---------------------------------------------------- reduction counting

def test_count_box_reductions_full_residue_exact():
    Q = _Q()
    for p in (11, 13):
        box = CurveBox((0,), ((p - 1) // 2,), (0,), ((p - 1) // 2,))
        for a, b in ((2, 4), (1, 1), (0, 1)):
            if (4 * a**3 + 27 * b**2) % p == 0:
                continue
            exact, main = count_box_reductions(Q, box, ReducedCurve(a, b, p, 1, None), p)
            # the exact identity normalizes by cardinality, the first-order
            # term by volume; they differ by the usual lattice-count slack
            assert exact == Fraction(p - 1, aut_size(a, b, p)) * Fraction(box.cardinality, p * p)
            want_main = (p - 1) / aut_size(a, b, p) * box.volume / p**2
            assert main == pytest.approx(want_main)


def test_count_box_reductions_rejects_singular_target():
    Q = _Q()
    box = CurveBox((0,), (5,), (0,), (5,))
    with pytest.raises(ValueError):
        count_box_reductions(Q, box, ReducedCurve(0, 0, 11, 1, None), 11)


def test_count_box_reductions_pair_full_residue():
    Q = _Q()
    # radius 71 spans complete residue systems mod both 11 and 13
    box = CurveBox((0,), (71,), (0,), (71,))
    t1 = ReducedCurve(2, 4, 11, 1, None)
    t2 = ReducedCurve(1, 4, 13, 1, None)
    exact, main = count_box_reductions_pair(Q, box, t1, 11, t2, 13)
    assert exact == (
        Fraction(10, aut_size(2, 4, 11))
        * Fraction(12, aut_size(1, 4, 13))
        * Fraction(box.cardinality, (11 * 13) ** 2)
    )
    # hitting residues at the two primes is independent over a joint cover
    e1, _ = count_box_reductions(Q, box, t1, 11)
    e2, _ = count_box_reductions(Q, box, t2, 13)
    assert exact == Fraction(e1 * e2, box.cardinality)
    assert abs(main - float(exact)) / float(exact) < 0.05


def test_count_box_reductions_pair_same_prime_rejected():
    Q = _Q()
    box = CurveBox((0,), (5,), (0,), (5,))
    t1 = ReducedCurve(2, 4, 11, 1, None)
    t2 = ReducedCurve(1, 3, 11, 1, None)
    with pytest.raises(ValueError):
        count_box_reductions_pair(Q, box, t1, 11, t2, 11)


# ------------------------------------------------------------------ theta

def test_theta_requires_coprime_residue():
    with pytest.raises(ValueError):
        theta_K(_Q(), 4, 2, 1000)


def test_theta_tracks_chebotarev_density():
    got = theta_K(_Q(), 3, 1, 20000)
    assert abs(got / (20000 / 2) - 1) < 0.1


def test_theta_report_flags_residue_outside_group():
    Qi = parse_field("Q_i")
    rep = theta_report(Qi, 8, 3, 4000)
    assert rep.config["residue_in_group"] is False
    assert rep.rows[-1]["empirical"] == 0.0


# --------------------------------------------------------------- reports

def test_deuring_check_clean():
    rep = deuring_check(60)
    assert rep.config["mismatches"] == []
    for row in rep.rows:
        assert row["empirical"] == row["theoretical"] == float(row["x"])


def test_report_row_shape():
    row = make_row(100, 2.0, 4.0)
    assert row == {"x": 100, "empirical": 2.0, "theoretical": 4.0, "ratio": 0.5}
    assert make_row(10, 1.0)["ratio"] is None
    assert make_row(10, 1.0, 0.0)["ratio"] is None


def test_report_rows_must_be_sorted():
    rows = [make_row(200, 1.0), make_row(100, 2.0)]
    with pytest.raises(ValueError):
        ExperimentReport(kind="demo", config={}, rows=rows)


def test_report_body_json_stable_and_metadata_quarantined():
    rep = hurwitz_sum_report(_Q(), 1, 200)
    rep.finish(0.0)
    body = json.loads(rep.body_json())
    assert set(body) == {"schema_version", "kind", "config", "rows", "constant"}
    full = json.loads(rep.to_json())
    assert "runtime_seconds" in full["metadata"]
    assert "workers" not in body["config"]


def test_reports_identical_across_worker_counts():
    Q = _Q()
    pairs = [
        hurwitz_sum_report(Q, 1, 3000, checkpoints=(1000,), workers=w)
        for w in (1, 2)
    ]
    assert pairs[0].body_json() == pairs[1].body_json()
    boxes = [
        box_average(Q, CurveBox((0,), (4,), (0,), (4,)), 1, 1, 400, workers=w)
        for w in (1, 2)
    ]
    assert boxes[0].body_json() == boxes[1].body_json()
    a1s = [a1_report(Q, 1, 2000, workers=w) for w in (1, 2)]
    assert a1s[0].body_json() == a1s[1].body_json()


def test_constant_report_both_methods():
    rep = constant_report(_Q(), 1, method="both", k_max=40, n_max=600, l_max=2000)
    assert set(rep.constant) == {"sum", "product"}
    row = rep.rows[-1]
    assert row["empirical"] == rep.constant["sum"]["value"]
    assert row["theoretical"] == rep.constant["product"]["value"]
    for prov in rep.constant.values():
        assert prov["tail_estimate"] > 0
        assert prov["field"] == "Q" and prov["r"] == 1


def test_csv_round_trip():
    rep = deuring_check(30)
    lines = rep.to_csv().strip().splitlines()
    assert lines[0] == "x,empirical,theoretical,ratio"
    assert len(lines) == len(rep.rows) + 1
