import pytest

from triggerlab.core import ProblemParams, TriggerPattern, render_tokens
from triggerlab.datagen import (
    GroundTruth,
    Scenario,
    StreamConfig,
    WindowRecord,
    generate_stream,
    random_trigger,
    window_dataset,
    write_dataset,
)
from triggerlab.errors import InstanceTooLargeError, InvalidInputError
from triggerlab.infer import (
    STATUS_EMPTY,
    STATUS_INSUFFICIENT,
    eliminate,
    enumerate_candidates,
    infer_trigger,
    merge_tables,
)
from triggerlab.prob import q_apparent
from triggerlab.rng import Rng, derive_seed


def test_enumerate_candidates_counts_and_order():
    cands = enumerate_candidates(2, 3)
    assert len(cands) == 8
    assert cands[0].apparent == (0, 0, 0)
    assert cands[-1].apparent == (1, 1, 1)
    assert [render_tokens(c.apparent, 2) for c in cands[:3]] == ["LLL", "LLS", "LSL"]
    assert [c.apparent for c in enumerate_candidates(2, 1)] == [(0,), (1,)]
    assert len(enumerate_candidates(3, 2)) == 9


def test_enumerate_guard():
    with pytest.raises(InstanceTooLargeError):
        enumerate_candidates(101, 3)


def test_eliminate_hand_example():
    windows = [WindowRecord(tokens=(0, 1), label=1, offset=0)]
    table = eliminate(windows, 2, 2)
    assert [c.apparent for c in table.survivors] == [(0, 1)]
    assert table.miss_counts == [1, 0, 1, 1]  # LL, LS, SL, SS
    assert table.eliminated == [True, False, True, True]


def test_eliminate_empty_dataset():
    table = eliminate([], 2, 3)
    assert table.status == STATUS_EMPTY
    assert table.eliminated == [False] * 8
    assert len(table.survivors) == 8


def test_eliminate_rejects_negative_labels():
    with pytest.raises(InvalidInputError):
        eliminate([WindowRecord(tokens=(0,), label=0, offset=0)], 2, 1)
    with pytest.raises(InvalidInputError):
        eliminate([WindowRecord(tokens=(0, 5), label=1, offset=0)], 2, 2)


def test_order_insensitivity_and_merge():
    rng = Rng(17)
    windows = [
        WindowRecord(tokens=tuple(rng.randbelow(2) for _ in range(9)), label=1, offset=0)
        for _ in range(60)
    ]
    t1 = eliminate(windows, 2, 3)
    t2 = eliminate(list(reversed(windows)), 2, 3)
    assert t1.miss_counts == t2.miss_counts
    merged = merge_tables(eliminate(windows[:25], 2, 3), eliminate(windows[25:], 2, 3))
    assert merged.miss_counts == t1.miss_counts
    assert merged.windows_seen == t1.windows_seen


def test_ranked_mode_keeps_argmin_set():
    windows = [
        WindowRecord(tokens=(0, 0, 1), label=1, offset=0),
        WindowRecord(tokens=(0, 1, 1), label=1, offset=0),
    ]
    table = eliminate(windows, 2, 2, mode="ranked")
    # LS is in both windows (0 misses); no other pattern is
    assert [c.apparent for c in table.survivors] == [(0, 1)]
    ranking = table.ranking()
    assert table.miss_counts[ranking[0]] == 0


def test_tolerance_threshold():
    windows = [
        WindowRecord(tokens=(0, 0), label=1, offset=0),
        WindowRecord(tokens=(0, 1), label=1, offset=0),
    ]
    strict = eliminate(windows, 2, 2)
    assert [c.apparent for c in strict.survivors] == []
    loose = eliminate(windows, 2, 2, tolerance=1)
    assert {c.apparent for c in loose.survivors} == {(0, 0), (0, 1)}


def test_per_window_elimination_rate_matches_q():
    # random (unconditioned) windows rule out a fixed candidate at rate 1 - q
    for n_w in (8, 11):
        rng = Rng(300 + n_w)
        trials = 20_000
        tokens = rng.fill(2, trials * n_w).reshape(trials, n_w)
        candidate = (0, 0, 1)
        misses = 0
        for row in tokens.tolist():
            k = 0
            for t in row:
                if t == candidate[k]:
                    k += 1
                    if k == 3:
                        break
            misses += k < 3
        rate = misses / trials
        expect = 1 - q_apparent(n_w, 2, 3)
        stderr = (expect * (1 - expect) / trials) ** 0.5
        assert abs(rate - expect) <= 4 * stderr


def test_true_trigger_never_eliminated_bounded_span():
    for seed in range(25):
        params = ProblemParams(2, 1, 3)
        trigger = random_trigger(params, Scenario.SUBSEQUENCE_NO_HIDDEN, seed)
        config = StreamConfig(
            params, trigger, Scenario.SUBSEQUENCE_NO_HIDDEN, 6000, seed=seed, span_bound=9
        )
        stream = generate_stream(config)
        positives = [r for r in window_dataset(stream, [9], seed=seed) if r.label == 1]
        table = eliminate(positives, 2, 3)
        idx = table.candidates.index(TriggerPattern.apparent_only(trigger.apparent))
        assert table.miss_counts[idx] == 0
        assert not table.eliminated[idx]


def test_constant_triggers_keep_structural_survivors():
    # With span_bound == window, a positive window for a constant trigger
    # can never be letter-pure: enough same-letter elements would complete
    # the matcher inside the window, and that window would be skipped as
    # event-crossing. Every positive LLL window therefore contains >= 3 S
    # (and ends in L), so SSS and SSL are contained in all of them and are
    # inseparable from the trigger by strict elimination, with any amount
    # of data. Mirrored for SSS.
    expected = {
        (0, 0, 0): {"LLL", "SSL", "SSS"},
        (1, 1, 1): {"SSS", "LLS", "LLL"},
    }
    params = ProblemParams(2, 1, 3)
    for apparent, survivors in expected.items():
        trigger = TriggerPattern.apparent_only(apparent)
        config = StreamConfig(
            params, trigger, Scenario.SUBSEQUENCE_NO_HIDDEN, 250_000, seed=902, span_bound=11
        )
        stream = generate_stream(config)
        positives = [r for r in window_dataset(stream, [11], seed=903) if r.label == 1]
        assert len(positives) > 2000
        table = eliminate(positives, 2, 3)
        assert {render_tokens(c.apparent, 2) for c in table.survivors} == survivors


def _write_sample(tmp_path, seed=5, length=60_000):
    params = ProblemParams(2, 4, 3)
    trigger = random_trigger(params, Scenario.SUBSEQUENCE_HIDDEN, seed)
    config = StreamConfig(
        params, trigger, Scenario.SUBSEQUENCE_HIDDEN, length, seed=seed, span_bound=11
    )
    stream = generate_stream(config)
    records = window_dataset(stream, [11], seed=derive_seed(seed, 2))
    path = tmp_path / "win.jsonl"
    write_dataset(path, records, GroundTruth.of(config, stream))
    return path, trigger


def test_infer_trigger_end_to_end(tmp_path):
    path, trigger = _write_sample(tmp_path)
    report = infer_trigger(path)  # a and l come from the sidecar
    assert report.status == "ok"
    assert report.truth_apparent == render_tokens(trigger.apparent, 2)
    assert report.truth_is_survivor
    assert report.truth_apparent in report.survivors


def test_infer_trigger_shuffled_dataset_same_survivors(tmp_path):
    path, _ = _write_sample(tmp_path, seed=6)
    before = infer_trigger(path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(reversed(lines)) + "\n")
    after = infer_trigger(path)
    assert before.survivors == after.survivors


def test_infer_trigger_zero_positives(tmp_path):
    path = tmp_path / "neg.jsonl"
    write_dataset(path, [WindowRecord(tokens=(0, 1, 0), label=0, offset=0)])
    report = infer_trigger(path, a=2, l=3)
    assert report.status == STATUS_INSUFFICIENT
    assert len(report.survivors) == 8


def test_infer_trigger_needs_a_and_l_without_sidecar(tmp_path):
    path = tmp_path / "plain.jsonl"
    write_dataset(path, [WindowRecord(tokens=(0, 1, 0), label=1, offset=0)])
    with pytest.raises(InvalidInputError):
        infer_trigger(path)
    report = infer_trigger(path, a=2, l=2)
    assert report.truth_trigger is None
