import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subgradlab import (
    StepOutOfRange,
    classical_lower_bound,
    constant_length_rate,
    constant_step_rate,
    lower_bound,
    no_universal_step_certificate,
    optimal_constant_step,
    optimal_method_rate,
    two_step_worst_gap,
    weakened_rate_bounds,
)
from subgradlab.rates import TWO_STEP_FIRST, TWO_STEP_KNEE, RateReport
from subgradlab.sequences import s

# Frozen by independent hand computation (see the short-step branch 1 - N*h
# and the long-step branch (s^2/2 - N)*h + 1/(2*s^2*h) with s = s(1, N+1)).
FROZEN = [
    (2, 0.16, 0.68),
    (1, 1.0 / (2.0 * math.sqrt(2.0)), 1.0 / math.sqrt(2.0)),
    (2, 0.3, 0.6041666666666666),
    (5, 0.3, 0.525607289377436),
]


def test_frozen_constant_step_values():
    for N, h, expected in FROZEN:
        assert constant_step_rate(N, h) == pytest.approx(expected, abs=1e-12)


def test_branches_agree_at_knee():
    for N in (1, 2, 3, 9):
        knee = 1.0 / s(1.0, N + 1) ** 2
        below = constant_step_rate(N, knee * (1 - 1e-12))
        above = constant_step_rate(N, knee * (1 + 1e-12))
        assert below == pytest.approx(above, abs=1e-9)
        assert constant_step_rate(N, knee) == pytest.approx(1 - N * knee, abs=1e-15)


def test_optimal_constant_step_frozen():
    opt1 = optimal_constant_step(1)
    assert opt1.h_star == pytest.approx(0.35355339059327373, abs=1e-15)
    assert opt1.rate == pytest.approx(0.7071067811865476, abs=1e-15)
    opt2 = optimal_constant_step(2)
    assert opt2.h_star == pytest.approx(1.0 / 3.75, abs=1e-15)
    assert opt2.rate == pytest.approx(0.6, abs=1e-15)


def test_optimal_step_beats_neighbors():
    for N in (1, 2, 7, 30):
        opt = optimal_constant_step(N)
        assert constant_step_rate(N, opt.h_star) == pytest.approx(opt.rate, abs=1e-12)
        for factor in (0.9, 0.99, 1.01, 1.1):
            assert constant_step_rate(N, opt.h_star * factor) >= opt.rate - 1e-12


def test_weakened_bounds_dominate():
    for N in (2, 5, 100):
        opt = optimal_constant_step(N)
        w = weakened_rate_bounds(N, opt.h_star)
        assert w.log_form >= constant_step_rate(N, opt.h_star) - 1e-12
        assert w.optimal_log_form >= opt.rate - 1e-12
        assert w.optimal_log_form == pytest.approx(
            math.sqrt(1 + 0.25 * math.log(N)) / math.sqrt(N + 1), abs=1e-15
        )


def test_weakened_needs_horizon_two():
    with pytest.raises(ValueError):
        weakened_rate_bounds(1, 0.2)


def test_length_rate_matches_step_rate():
    for N, t, expected in FROZEN:
        assert constant_length_rate(N, t) == pytest.approx(expected, abs=1e-12)


def test_reference_rates():
    assert optimal_method_rate(3) == 0.5
    assert lower_bound(3) == 0.5
    assert optimal_method_rate(8) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert classical_lower_bound(3) == pytest.approx(1.0 / 8.0, abs=1e-15)


def test_two_step_gap_branches():
    # small-step branch is linear in h2
    assert two_step_worst_gap(0.05) == pytest.approx(
        1.0 / math.sqrt(2.0) - 0.05, abs=1e-15
    )
    # branch values agree where they meet
    left = two_step_worst_gap(TWO_STEP_KNEE)
    right = two_step_worst_gap(TWO_STEP_KNEE + 1e-13)
    assert left == pytest.approx(right, abs=1e-9)
    assert left == pytest.approx(7.0 / (8.0 * math.sqrt(2.0)), abs=1e-12)
    # frozen long-branch value
    assert two_step_worst_gap(0.2) == pytest.approx(0.5787219649177293, abs=1e-13)


def test_two_step_gap_rejects_nonpositive():
    with pytest.raises(StepOutOfRange):
        two_step_worst_gap(0.0)
    with pytest.raises(StepOutOfRange):
        two_step_worst_gap(-0.1)


def test_no_universal_step_certificate():
    cert = no_universal_step_certificate()
    assert 0.5775 <= cert.gap_floor <= 0.5795
    assert cert.h2_star == pytest.approx(0.194284, abs=1e-4)
    assert cert.margin > 0
    assert cert.gap_floor > 1.0 / math.sqrt(3.0)
    assert cert.gap_floor == pytest.approx(
        two_step_worst_gap(cert.h2_star), abs=1e-12
    )


def test_first_step_constant():
    assert TWO_STEP_FIRST == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)), abs=1e-16)
    assert TWO_STEP_KNEE == pytest.approx(1.0 / (8.0 * math.sqrt(2.0)), abs=1e-16)


def test_validators():
    with pytest.raises(ValueError):
        constant_step_rate(0, 0.1)
    with pytest.raises(StepOutOfRange):
        constant_step_rate(3, 0.0)
    with pytest.raises(ValueError):
        optimal_method_rate(0)


def test_rate_report_slack():
    r = RateReport(N=4, regime="short_step", predicted_bound=0.5, observed_gap=0.4)
    assert r.slack == pytest.approx(0.1)
    assert RateReport(N=4, regime="short_step", predicted_bound=0.5).slack is None


@given(
    N=st.integers(min_value=1, max_value=200),
    h=st.floats(min_value=1e-4, max_value=5.0, allow_nan=False),
)
@settings(max_examples=200, deadline=None)
def test_rate_never_beats_lower_bound(N, h):
    assert constant_step_rate(N, h) >= lower_bound(N) - 1e-12


@given(h2=st.floats(min_value=1e-6, max_value=10.0, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_two_step_gap_respects_floor(h2):
    cert = no_universal_step_certificate()
    assert two_step_worst_gap(h2) >= cert.gap_floor - 1e-10


@given(N=st.integers(min_value=1, max_value=500))
@settings(max_examples=100, deadline=None)
def test_rate_ordering_across_regimes(N):
    opt = optimal_constant_step(N)
    assert lower_bound(N) <= opt.rate + 1e-12
    assert classical_lower_bound(N) <= lower_bound(N)
