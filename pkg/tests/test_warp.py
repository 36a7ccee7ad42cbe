import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modgp.exceptions import DomainError, WarpingCSVError
from modgp.warp import (
    Warping,
    from_dict,
    read_tabulated_csv,
    theta,
    theta_dot,
    theta_inverse,
    validate,
)

from .conftest import builtin_warpings


def test_theta_examples():
    assert theta(Warping.identity(), 3.5) == 3.5
    assert theta(Warping.affine(2, 1), 3) == 7.0
    expected = float(1 + mpmath.log(2))
    assert theta(Warping.soft_shift(), 1.0) == pytest.approx(expected, rel=1e-15)
    assert round(expected, 6) == 1.693147


def test_theta_dot_examples():
    assert theta_dot(Warping.identity(), -12.0) == 1.0
    assert theta_dot(Warping.affine(2, 1), 0.0) == 2.0
    w = Warping.exp_approach()
    h = 1e-6
    fd = (theta(w, h) - theta(w, -h)) / (2 * h)
    assert theta_dot(w, 0.0) == 2.0
    assert fd == pytest.approx(2.0, rel=1e-8)


def test_theta_inverse_examples():
    assert theta_inverse(Warping.affine(2, 1), 7.0) == 3.0
    assert theta_inverse(Warping.identity(), -4.0) == -4.0
    assert theta_inverse(Warping.soft_shift(), 1.693147) == pytest.approx(1.0, abs=1e-6)
    v = theta(Warping.soft_shift(), 1.0)
    assert theta_inverse(Warping.soft_shift(), v) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("name", ["soft_shift", "exp_approach"])
def test_inverse_residual_contract(name):
    w = builtin_warpings()[name]
    v = np.linspace(theta(w, 0.0), theta(w, 50.0), 1001)
    t = theta_inverse(w, v)
    assert np.all(np.abs(theta(w, t) - v) <= 1e-12 * (1 + np.abs(v)))


def test_exp_approach_inverse_far_left():
    w = Warping.exp_approach()
    t = np.array([-30.0, -5.0, -0.5])
    np.testing.assert_allclose(theta_inverse(w, theta(w, t)), t, rtol=1e-13)


@pytest.mark.parametrize("name", list(builtin_warpings()))
def test_round_trip(name):
    w = builtin_warpings()[name]
    rng = np.random.default_rng(5)
    t = rng.uniform(0.0, 20.0, 1000)
    np.testing.assert_allclose(theta_inverse(w, theta(w, t)), t, atol=1e-9)


def test_round_trip_tabulated():
    w = Warping.tabulated([0, 1, 2, 5], [0, 1, 4, 5])
    t = np.random.default_rng(1).uniform(0, 5, 1000)
    np.testing.assert_allclose(theta_inverse(w, theta(w, t)), t, atol=1e-9)


@pytest.mark.parametrize("name", list(builtin_warpings()))
def test_theta_dot_matches_finite_differences(name):
    w = builtin_warpings()[name]
    t = np.linspace(0.05, 10, 60)
    h = 1e-6
    fd = (theta(w, t + h) - theta(w, t - h)) / (2 * h)
    np.testing.assert_allclose(theta_dot(w, t), fd, rtol=1e-5)


def test_tabulated_interpolation_and_knot_convention():
    w = Warping.tabulated([0, 1, 2], [0, 1, 4])
    assert theta(w, 1.5) == 2.5
    assert theta_dot(w, 0.5) == 1.0
    # right-continuous: a knot takes the slope of the segment to its right
    assert theta_dot(w, 1.0) == 3.0
    assert theta_dot(w, 2.0) == 3.0
    assert theta_dot(w, 0.0) == 1.0


def test_domain_errors():
    with pytest.raises(DomainError):
        theta(Warping.soft_shift(), -0.5)
    with pytest.raises(DomainError):
        theta_dot(Warping.tabulated([0, 1], [0, 1]), 1.5)
    with pytest.raises(DomainError):
        theta_inverse(Warping.soft_shift(), -1.0)
    with pytest.raises(DomainError):
        theta(Warping.identity(domain=(0, 10)), 10.5)


def test_construction_errors():
    with pytest.raises(ValueError):
        Warping.affine(0.0)
    with pytest.raises(ValueError):
        Warping.affine(-1.0)
    with pytest.raises(ValueError):
        Warping.tabulated([0, 0, 1], [0, 1, 2])
    with pytest.raises(ValueError):
        Warping.soft_shift(domain=(-0.5, 1))


def test_validate_identity():
    r = validate(Warping.identity(domain=(0, 10)), 101)
    assert r.monotone and r.validated and r.warping.validated
    assert r.min_derivative == r.max_derivative == 1.0
    assert r.violations == []


def test_validate_decreasing_table():
    r = validate(Warping.tabulated([0, 1, 2], [0, 2, 1.5]), 11)
    assert not r.monotone and not r.validated
    assert r.violations == [(1.0, 2.0)]


def test_validate_tie_fails_validation_not_construction():
    w = Warping.tabulated([0, 1, 2], [0, 1, 1])
    r = validate(w, 11)
    assert not r.validated
    assert r.violations == [(1.0, 2.0)]
    assert r.min_derivative == 0.0


def test_validate_exp_approach():
    r = validate(Warping.exp_approach(domain=(0, 10)), 1001)
    assert r.monotone and r.validated
    assert r.max_derivative == 2.0
    assert r.min_derivative == pytest.approx(1 + math.exp(-10))


def test_validate_needs_finite_interval():
    with pytest.raises(ValueError):
        validate(Warping.identity(), 11)
    assert validate(Warping.identity(), 11, interval=(-1, 1)).validated


@given(
    name=st.sampled_from(list(builtin_warpings())),
    lo=st.floats(0, 50),
    width=st.floats(1e-3, 50),
    probes=st.integers(2, 500),
)
def test_builtins_always_validate(name, lo, width, probes):
    w = builtin_warpings()[name]
    assert validate(w, probes, (lo, lo + width)).validated


def test_csv_round_trip(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("t,theta\n0,0\n1,2\n3,3\n")
    w = read_tabulated_csv(p)
    assert theta(w, 2.0) == 2.5
    assert w.domain == (0.0, 3.0)


@pytest.mark.parametrize(
    "body,line",
    [
        ("t,theta\n0,0\n1,x\n", 3),
        ("t,theta\n0,0\n1,2\n1,3\n", 4),
        ("t,theta\n0,0\n1,2\n2,1.5\n", 4),
        ("time,value\n0,0\n", 1),
        ("t,theta\n0,0\n1,2,3\n", 3),
    ],
)
def test_csv_errors_carry_line_numbers(tmp_path, body, line):
    p = tmp_path / "w.csv"
    p.write_text(body)
    with pytest.raises(WarpingCSVError) as exc:
        read_tabulated_csv(p)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_csv_non_strict_keeps_decreasing_table(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("t,theta\n0,0\n1,2\n2,1.5\n")
    w = read_tabulated_csv(p, strict=False)
    assert validate(w, 5).violations == [(1.0, 2.0)]


def test_from_dict():
    assert from_dict({"kind": "Affine", "a": 2}).params == (2.0, 0.0)
    assert from_dict({"kind": "SoftShift", "domain": [0, 4]}).domain == (0.0, 4.0)
    w = from_dict({"kind": "Tabulated", "nodes": [0, 1], "values": [0, 3]})
    assert theta_dot(w, 0.5) == 3.0
