"""Study design assembly: CSV schedules, information matrix, projection.

Information-matrix assertions are checked against an explicit per-time loop
(and hand-computed scalars for constant schedules); the projection against
numpy's independent weighted-least-squares solution.
"""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from conftest import make_design
from mrtpower.design import (RandomizationSchedule, build_design,
                             information_matrix, parse_probability_csv,
                             project_effect, time_basis)
from mrtpower.errors import ValidationError
from mrtpower.trends import TrendSpec


def first_error(exc_info):
    return exc_info.value.errors[0]


# ------------------------------------------------------------------ CSV parsing

def csv_bytes(pairs, header="index,probability"):
    return ("\n".join([header] + [f"{i},{p}" for i, p in pairs]) + "\n").encode()


def test_csv_happy_path_per_day():
    sched = parse_probability_csv(
        csv_bytes([(i, 0.3 + 0.01 * i) for i in range(1, 8)]),
        mode="per_day", days=7, per_day=3)
    assert sched.mode == "per_day"
    assert np.allclose(sched.values, [0.31, 0.32, 0.33, 0.34, 0.35, 0.36, 0.37])


def test_csv_happy_path_per_time_any_order_crlf_bom():
    rows = [(i, 0.5) for i in range(1, 7)]
    rows.reverse()
    text = "\r\n".join(["index,probability"] + [f"{i},{p}" for i, p in rows])
    sched = parse_probability_csv(("﻿" + text).encode("utf-8"),
                                  mode="per_time", days=3, per_day=2)
    assert sched.mode == "per_time"
    assert len(sched.values) == 6


def test_csv_blank_lines_ignored():
    data = b"index,probability\n1,0.4\n\n2,0.5\n\n"
    sched = parse_probability_csv(data, mode="per_day", days=2, per_day=1)
    assert np.allclose(sched.values, [0.4, 0.5])


def test_csv_header_required():
    with pytest.raises(ValidationError) as ei:
        parse_probability_csv(b"day,prob\n1,0.5\n", "per_day", 1, 1)
    err = first_error(ei)
    assert err.code == "csv_header" and err.detail == {"line": 1}


def test_csv_malformed_rows_carry_line_numbers():
    with pytest.raises(ValidationError) as ei:
        parse_probability_csv(b"index,probability\n1,0.5\n2,0.5,9\n",
                              "per_day", 2, 1)
    assert first_error(ei).code == "csv_malformed_row"
    assert first_error(ei).detail == {"line": 3}

    with pytest.raises(ValidationError) as ei:
        parse_probability_csv(b"index,probability\nx,0.5\n", "per_day", 1, 1)
    assert first_error(ei).code == "csv_malformed_row"

    with pytest.raises(ValidationError) as ei:
        parse_probability_csv(b"index,probability\n1,maybe\n", "per_day", 1, 1)
    assert first_error(ei).code == "csv_malformed_row"
    assert first_error(ei).detail == {"line": 2}


def test_csv_duplicate_and_range_errors():
    with pytest.raises(ValidationError) as ei:
        parse_probability_csv(csv_bytes([(1, 0.4), (1, 0.5)]), "per_day", 2, 1)
    assert first_error(ei).code == "csv_duplicate_index"
    assert first_error(ei).detail == {"line": 3, "index": 1}

    with pytest.raises(ValidationError) as ei:
        parse_probability_csv(csv_bytes([(1, 0.4), (3, 0.5)]), "per_day", 2, 1)
    assert first_error(ei).code == "csv_index_range"

    with pytest.raises(ValidationError) as ei:
        parse_probability_csv(csv_bytes([(1, 0.4), (2, 1.0)]), "per_day", 2, 1)
    assert first_error(ei).code == "csv_probability_range"

    with pytest.raises(ValidationError) as ei:
        parse_probability_csv(csv_bytes([(1, 0.0)]), "per_day", 1, 1)
    assert first_error(ei).code == "csv_probability_range"


def test_csv_missing_indices():
    with pytest.raises(ValidationError) as ei:
        parse_probability_csv(csv_bytes([(1, 0.4)]), "per_day", 3, 1)
    err = first_error(ei)
    assert err.code == "csv_missing_index" and err.detail == {"missing": [2, 3]}


def test_csv_rejects_non_utf8():
    with pytest.raises(ValidationError) as ei:
        parse_probability_csv(b"\xff\xfe\x00bad", "per_day", 1, 1)
    assert first_error(ei).code == "csv_encoding"


# ------------------------------------------------------------------- schedules

def test_schedule_materialize_shapes():
    const = RandomizationSchedule(mode="constant", values=0.4)
    assert np.array_equal(const.materialize(3, 2), np.full(6, 0.4))

    per_day = RandomizationSchedule(mode="per_day", values=np.array([0.3, 0.6]))
    assert np.array_equal(per_day.materialize(2, 3),
                          [0.3, 0.3, 0.3, 0.6, 0.6, 0.6])

    per_time = RandomizationSchedule(
        mode="per_time", values=np.array([0.2, 0.4, 0.6, 0.8]))
    assert np.array_equal(per_time.materialize(2, 2), [0.2, 0.4, 0.6, 0.8])


def test_schedule_length_mismatch():
    with pytest.raises(ValidationError) as ei:
        RandomizationSchedule(mode="per_day",
                              values=np.array([0.5, 0.5])).materialize(3, 2)
    assert first_error(ei).code == "length_mismatch"
    with pytest.raises(ValidationError) as ei:
        RandomizationSchedule(mode="per_time",
                              values=np.array([0.5] * 5)).materialize(3, 2)
    assert first_error(ei).code == "length_mismatch"


# ---------------------------------------------------------------- build_design

def test_build_design_accepts_scalar_randomization():
    design = build_design(
        days=4, per_day=2, randomization=0.5,
        availability=TrendSpec(kind="constant", average=0.7,
                               role="availability"),
        effect=TrendSpec(kind="constant", average=0.1))
    assert np.array_equal(design.rho_t, np.full(8, 0.5))


def test_build_design_rejects_probability_on_boundary():
    with pytest.raises(ValidationError) as ei:
        make_design(days=3, per_day=2, rho=[0.5, 0.5, 1.0, 0.5, 0.5, 0.5])
    err = first_error(ei)
    assert err.code == "prob_out_of_range"
    assert "decision time 3" in err.message


def test_build_design_rejects_invalid_shape_params():
    with pytest.raises(ValidationError) as ei:
        make_design(days=0)
    assert first_error(ei).code == "invalid_days"
    with pytest.raises(ValidationError) as ei:
        make_design(per_day=0)
    assert first_error(ei).code == "invalid_per_day"


def test_build_design_runs_trend_validation():
    with pytest.raises(ValidationError) as ei:
        make_design(days=42, per_day=5, effect_kind="quadratic",
                    effect_avg=0.1, effect_init=0.0, effect_cp=21.0)
    assert first_error(ei).code == "effect_negative"
    with pytest.raises(ValidationError) as ei:
        make_design(days=10, per_day=2, tau=1.2)
    assert first_error(ei).code == "availability_range"


def test_q_defaults_to_min_three_days():
    assert make_design(days=2, per_day=3).q == 2
    assert make_design(days=3, per_day=3).q == 3
    assert make_design(days=50, per_day=1).q == 3
    assert make_design(days=10, per_day=1, q=5).q == 5


def test_design_properties():
    design = make_design(days=4, per_day=3, effect_kind="linear",
                         effect_avg=0.2, effect_init=0.1)
    assert design.T == 12
    assert design.p == 2 and design.q == 3
    assert np.array_equal(design.tau_t, np.full(12, 0.7))
    # effect curve per decision time repeats the day curve within each day
    per_day_curve = design.effect_curve_t().reshape(4, 3)
    assert np.allclose(per_day_curve, per_day_curve[:, :1])
    assert per_day_curve[0, 0] == pytest.approx(0.1, abs=1e-12)


def test_time_basis_layout():
    basis = time_basis(days=3, per_day=2, dim=3)
    g = np.array([0, 0, 1, 1, 2, 2], dtype=float)
    assert np.array_equal(basis[:, 0], np.ones(6))
    assert np.array_equal(basis[:, 1], g)
    assert np.array_equal(basis[:, 2], g ** 2)


# ---------------------------------------------------------- information matrix

def test_information_matrix_constant_scalar():
    # p = 1: M = T tau rho (1 - rho) = 500 * 0.7 * 0.4 * 0.6 = 84
    design = make_design(days=100, per_day=5, rho=0.4, tau=0.7)
    assert information_matrix(design) == pytest.approx(np.array([[84.0]]),
                                                       abs=1e-9)


def test_information_matrix_two_day_hand_computed():
    # D=2, K=1, tau=1, rho=0.5: weights 0.25; Z rows (1,0), (1,1)
    # M = 0.25 [[2, 1], [1, 1]]
    design = make_design(days=2, per_day=1, rho=0.5, tau=1.0 - 1e-12,
                         effect_kind="linear", effect_avg=0.1, effect_init=0.0)
    assert np.allclose(information_matrix(design),
                       0.25 * np.array([[2.0, 1.0], [1.0, 1.0]]), atol=1e-9)


@given(days=hs.integers(3, 12), per_day=hs.integers(1, 4),
       tau=hs.floats(0.2, 0.95), seed=hs.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_information_matrix_matches_per_time_loop(days, per_day, tau, seed):
    rng = np.random.default_rng(seed)
    rho = rng.uniform(0.1, 0.9, size=days * per_day)
    design = make_design(days=days, per_day=per_day, rho=rho, tau=tau,
                         effect_kind="quadratic", effect_avg=0.1,
                         effect_init=0.0, effect_cp=days / 2 + 1)
    z = design.z_basis()
    oracle = np.zeros((design.p, design.p))
    for t in range(design.T):
        oracle += tau * rho[t] * (1 - rho[t]) * np.outer(z[t], z[t])
    assert np.allclose(information_matrix(design), oracle, atol=1e-10)


def test_information_matrix_singular_design_rejected():
    # a single day cannot identify a linear-in-day effect
    with pytest.raises(ValidationError) as ei:
        information_matrix(make_design(days=1, per_day=4, effect_kind="linear",
                                       effect_avg=0.1, effect_init=0.1))
    assert first_error(ei).code == "singular_information"


# ------------------------------------------------------------------ projection

def test_project_effect_round_trip_in_span():
    design = make_design(days=12, per_day=3, effect_kind="quadratic",
                         effect_avg=0.2, effect_init=0.0, effect_cp=7.0)
    coeffs = np.array([0.05, 0.01, -0.002])
    curve = design.z_basis() @ coeffs
    assert np.allclose(project_effect(curve, design), coeffs, atol=1e-10)


def test_project_effect_matches_weighted_lstsq():
    rng = np.random.default_rng(7)
    design = make_design(days=20, per_day=2, effect_kind="quadratic",
                         effect_avg=0.2, effect_init=0.0, effect_cp=11.0,
                         tau=0.6)
    curve = rng.normal(0.1, 0.05, size=design.T)
    z = design.z_basis()
    w = np.sqrt(design.tau_t)
    oracle, *_ = np.linalg.lstsq(z * w[:, None], curve * w, rcond=None)
    assert np.allclose(project_effect(curve, design), oracle, atol=1e-10)


def test_project_effect_idempotent():
    design = make_design(days=15, per_day=2, effect_kind="linear",
                         effect_avg=0.15, effect_init=0.0)
    rng = np.random.default_rng(3)
    curve = rng.uniform(0.0, 0.3, size=design.T)
    once = project_effect(curve, design)
    twice = project_effect(design.z_basis() @ once, design)
    assert np.allclose(once, twice, atol=1e-12)


def test_project_effect_length_check():
    design = make_design(days=5, per_day=2)
    with pytest.raises(ValidationError) as ei:
        project_effect(np.zeros(9), design)
    assert first_error(ei).code == "length_mismatch"
