from fractions import Fraction

import pytest

from triggerlab.core import ProblemParams, TriggerPattern
from triggerlab.datagen import Scenario, StreamConfig, generate_stream, window_dataset
from triggerlab.errors import InvalidInputError, UnreachableTargetError
from triggerlab.infer import eliminate
from triggerlab.plan import (
    DataPlan,
    _min_exponent,
    data_plan,
    difficulty_curve,
    min_window,
    window_probability,
)
from triggerlab.rng import derive_seed

P243 = ProblemParams(2, 4, 3)


def test_min_window_reference_points():
    assert min_window(0.95, P243, "same-hidden") == 22
    assert min_window(0.95, P243, "particular") == 49
    assert min_window(0.95, ProblemParams(2, 1, 3), "apparent") == 11


@pytest.mark.parametrize("confidence", [0.5, 0.9, 0.95, 0.99])
@pytest.mark.parametrize("mode", ["particular", "same-hidden", "apparent"])
def test_min_window_matches_linear_scan(confidence, mode):
    n = min_window(confidence, P243, mode)
    assert window_probability(n, P243, mode) >= confidence
    assert window_probability(n - 1, P243, mode) < confidence
    scan = 0
    while window_probability(scan, P243, mode) < confidence:
        scan += 1
    assert scan == n


def test_min_window_edge_confidences():
    with pytest.raises(InvalidInputError):
        min_window(0.0, P243, "particular")
    with pytest.raises(InvalidInputError):
        min_window(1.5, P243, "particular")
    with pytest.raises(UnreachableTargetError):
        min_window(1.0, P243, "particular")
    # degenerate single-symbol alphabet reaches probability 1 at n = l
    assert min_window(1.0, ProblemParams(1, 1, 3), "particular") == 3
    assert min_window(0.5, ProblemParams(1, 1, 4), "apparent") == 4


def test_min_window_bad_mode():
    with pytest.raises(InvalidInputError):
        min_window(0.9, P243, "sideways")


def test_data_plan_paper_operating_point():
    dp = data_plan(0.05, 22, 2, 3)
    assert dp.g_exact == Fraction(8388100, 8388608)
    assert abs(dp.g - 0.999939441681) <= 1e-12
    assert dp.m == 49468
    assert dp.r == 20
    assert dp.total == dp.m * 20
    assert dp.false_candidates == 7
    # strict boundary in exact arithmetic
    alpha = Fraction(1, 20)
    assert dp.g_exact**dp.m < alpha <= dp.g_exact ** (dp.m - 1)
    ratio = Fraction(6, 7)
    assert ratio**dp.r < alpha <= ratio ** (dp.r - 1)


def test_data_plan_window_11():
    dp = data_plan(0.05, 11, 2, 3)
    assert dp.g_exact == Fraction(1981, 2048)
    assert (dp.m, dp.r, dp.total) == (91, 20, 1820)
    alpha = Fraction(1, 20)
    assert dp.g_exact**dp.m < alpha <= dp.g_exact ** (dp.m - 1)


def test_data_plan_strict_boundary_at_equality():
    # G = 1/2 exactly, alpha = 0.5: G**1 is not < alpha, so m = 2
    dp = data_plan(0.5, 3, 2, 2)
    assert dp.g_exact == Fraction(1, 2)
    assert dp.m == 2


def test_min_exponent_boundaries():
    assert _min_exponent(Fraction(1, 2), Fraction(1, 2)) == 2
    assert _min_exponent(Fraction(1, 2), Fraction(51, 100)) == 1
    assert _min_exponent(Fraction(6, 7), Fraction(1, 20)) == 20


def test_data_plan_rejects_degenerate_candidates():
    with pytest.raises(InvalidInputError):
        data_plan(0.05, 3, 1, 3)  # a**l = 1
    with pytest.raises(InvalidInputError):
        data_plan(0.05, 3, 2, 1)  # one false candidate, nothing to separate
    with pytest.raises(InvalidInputError):
        data_plan(0.05, 2, 2, 3)  # window shorter than trigger
    with pytest.raises(InvalidInputError):
        data_plan(1.5, 11, 2, 3)
    with pytest.raises(InvalidInputError):
        data_plan(0, 11, 2, 3)


def test_data_plan_alpha_from_text():
    assert data_plan("0.05", 11, 2, 3) == data_plan(0.05, 11, 2, 3)
    assert data_plan(Fraction(1, 20), 11, 2, 3).m == 91


def test_difficulty_curve_rows():
    rows = difficulty_curve(range(2, 7), window=50, h=4, l=3, alpha=0.05)
    assert len(rows) == 5
    assert rows[0][0] == 2
    assert rows[0][1].total == data_plan(0.05, 50, 2, 3).total
    totals = [dp.total for _, dp in rows]
    # Larger apparent alphabets make each positive window more informative,
    # which outweighs the growing candidate count: totals fall.
    assert all(x > y for x, y in zip(totals, totals[1:]))
    with pytest.raises(InvalidInputError):
        difficulty_curve([1])


def test_scaled_down_end_to_end_plan():
    # l = 2 scale model: data_plan-many positive windows isolate the trigger
    params = ProblemParams(2, 1, 2)
    window = 8
    dp = data_plan(0.05, window, 2, 2)
    trigger = TriggerPattern.apparent_only((0, 1))
    wins = 0
    trials = 20
    for t in range(trials):
        config = StreamConfig(
            params=params,
            trigger=trigger,
            scenario=Scenario.SUBSEQUENCE_NO_HIDDEN,
            length=120_000,
            seed=derive_seed(777, t),
            span_bound=window,
        )
        stream = generate_stream(config)
        records = window_dataset(stream, [window], seed=derive_seed(778, t))
        positives = [r for r in records if r.label == 1][: dp.total]
        assert len(positives) == dp.total
        table = eliminate(positives, 2, 2)
        survivors = table.survivors
        if len(survivors) == 1 and survivors[0].apparent == trigger.apparent:
            wins += 1
    assert wins >= trials - 1
