import pytest
from hypothesis import given, strategies as st

from triggerlab.core import (
    Element,
    HiddenConstraint,
    MatchMode,
    ProblemParams,
    Sequence,
    TriggerPattern,
    contains,
    default_letters,
    parse_pattern,
    parse_sequence,
    render_pattern,
    render_sequence,
    render_tokens,
    tokens_contain,
)
from triggerlab.errors import InvalidInputError, ParseError
from triggerlab.rng import Rng

from oracles import exhaustive_contains

P243 = ProblemParams(2, 4, 3)


# --- type invariants ---------------------------------------------------------

def test_params_validation():
    with pytest.raises(InvalidInputError):
        ProblemParams(0, 1, 1)
    with pytest.raises(InvalidInputError):
        ProblemParams(2, 4, 0)
    assert ProblemParams(2, 4, 3).joint_states == 8


def test_pattern_homogeneity_is_structural():
    with pytest.raises(InvalidInputError):
        TriggerPattern((0, 1), HiddenConstraint.FIXED)  # fixed without hidden
    with pytest.raises(InvalidInputError):
        TriggerPattern((0, 1), HiddenConstraint.IGNORE, hidden=(0, 1))
    with pytest.raises(InvalidInputError):
        TriggerPattern.fixed((0, 1), (0,))  # length mismatch


def test_sequence_validation():
    with pytest.raises(InvalidInputError):
        Sequence(P243, (0, 1), (0,))
    with pytest.raises(InvalidInputError):
        Sequence(P243, (0, 2), (0, 0))  # apparent out of range
    with pytest.raises(InvalidInputError):
        Sequence(P243, (0, 1), (0, 0), events=(1, 1))
    with pytest.raises(InvalidInputError):
        Sequence(P243, (0, 1), (0, 0), events=(2,))
    seq = Sequence.from_elements(P243, [Element(0, 1), Element(1, 3)], events=(0,))
    assert len(seq) == 2 and seq.element(1) == Element(1, 3)


# --- matcher -----------------------------------------------------------------

def test_contains_paper_style_example():
    seq = parse_sequence("L2L4L1S2L3L3S2", P243)
    pattern = parse_pattern("L1L3S2", P243)
    assert contains(seq, pattern)


def test_empty_pattern_matches_everything():
    seq = parse_sequence("L1S2", P243)
    assert contains(seq, parse_pattern("", P243))
    assert contains(seq, parse_pattern("", P243), start=2)  # even the empty slice


def test_order_violation():
    params = ProblemParams(2, 1, 2)
    seq = parse_sequence("L1S1", params)
    assert not contains(seq, parse_pattern("SL", params))
    assert contains(seq, parse_pattern("LS", params))


def test_consecutive_examples():
    params = ProblemParams(2, 1, 3)
    pat = parse_pattern("LLS", params, MatchMode.CONSECUTIVE)
    assert contains(parse_sequence("L1L1S1", params), pat)
    assert not contains(parse_sequence("L1S1L1S1", params), pat)


def test_consecutive_self_overlap():
    # LLS inside LLLS: a naive reset-to-zero scanner misses this
    params = ProblemParams(2, 1, 3)
    pat = parse_pattern("LLS", params, MatchMode.CONSECUTIVE)
    assert contains(parse_sequence("L1L1L1S1", params), pat)


def test_alphabet_mismatch_error():
    with pytest.raises(InvalidInputError):
        contains(parse_sequence("L1S1", P243), TriggerPattern.apparent_only((2,)))
    with pytest.raises(InvalidInputError):
        contains(parse_sequence("L1S1", P243), TriggerPattern.fixed((0,), (4,)))


def test_tokens_contain_requires_ignore_rule():
    with pytest.raises(InvalidInputError):
        tokens_contain((0, 1), TriggerPattern.fixed((0,), (0,)))
    assert tokens_contain((0, 0, 1), TriggerPattern.apparent_only((0, 1)))
    assert not tokens_contain((1, 0), TriggerPattern.apparent_only((0, 1), MatchMode.CONSECUTIVE))


_SMALL_AH = [(1, 1), (2, 1), (1, 2), (2, 2), (2, 4), (4, 2), (8, 1), (2, 3)]


@st.composite
def _case(draw):
    a, h = draw(st.sampled_from(_SMALL_AH))
    n = draw(st.integers(0, 8))
    elements = [
        (draw(st.integers(0, a - 1)), draw(st.integers(0, h - 1))) for _ in range(n)
    ]
    l = draw(st.integers(0, 3))
    apparent = tuple(draw(st.integers(0, a - 1)) for _ in range(l))
    mode = draw(st.sampled_from(list(MatchMode)))
    constraint = draw(st.sampled_from(list(HiddenConstraint)))
    if constraint is HiddenConstraint.FIXED:
        hidden = tuple(draw(st.integers(0, h - 1)) for _ in range(l))
        pattern = TriggerPattern.fixed(apparent, hidden, mode)
    elif constraint is HiddenConstraint.SHARED:
        pattern = TriggerPattern.shared(apparent, mode)
    else:
        pattern = TriggerPattern.apparent_only(apparent, mode)
    return a, h, elements, pattern


@given(_case())
def test_greedy_equals_exhaustive(case):
    a, h, elements, pattern = case
    seq = Sequence.from_elements(ProblemParams(a, h, max(1, len(pattern))), map(Element._make, elements))
    assert contains(seq, pattern) == exhaustive_contains(elements, pattern, h)


@given(_case(), st.integers(0, 8))
def test_greedy_dominance_on_suffixes(case, start):
    a, h, elements, pattern = case
    start = min(start, len(elements))
    seq = Sequence.from_elements(ProblemParams(a, h, max(1, len(pattern))), map(Element._make, elements))
    suffix_truth = exhaustive_contains(elements[start:], pattern, h)
    assert contains(seq, pattern, start=start) == suffix_truth
    if suffix_truth:
        assert contains(seq, pattern)  # an occurrence in a suffix is one in the whole


# --- codec -------------------------------------------------------------------

def test_render_canonical_example():
    seq = Sequence.from_elements(P243, [Element(0, 0), Element(0, 0), Element(1, 0)])
    assert render_sequence(seq) == "L1L1S1"


def test_default_letters():
    assert default_letters(2) == "LS"
    assert default_letters(3) == "ABC"
    with pytest.raises(InvalidInputError):
        default_letters(27)


def test_parse_empty():
    assert len(parse_sequence("", P243)) == 0
    assert len(parse_pattern("", P243)) == 0


def test_pattern_render_styles():
    assert render_pattern(parse_pattern("L1L3S2", P243), 2) == "L1L3S2"
    assert render_pattern(parse_pattern("LiLiSi", P243), 2) == "LiLiSi"
    assert render_pattern(parse_pattern("LLS", P243), 2) == "LLS"
    assert render_tokens((0, 0, 1), 2) == "LLS"


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_sequence("L1X2", P243)
    assert e.value.position == 2
    with pytest.raises(ParseError) as e:
        parse_sequence("L1L5", P243)  # hidden 5 out of range for h=4
    assert e.value.position == 2
    with pytest.raises(ParseError):
        parse_sequence("L1L", P243)  # sequences need hidden indices
    with pytest.raises(ParseError):
        parse_sequence("L0", P243)  # hidden labels are 1-based
    with pytest.raises(ParseError):
        parse_pattern("L1Li", P243)  # mixed styles


def test_roundtrip_random_sequences():
    rng = Rng(2024)
    for _ in range(1000):
        a = 1 + rng.randbelow(5)
        h = 1 + rng.randbelow(5)
        n = rng.randbelow(12)
        params = ProblemParams(a, h, 1)
        seq = Sequence(
            params,
            tuple(rng.randbelow(a) for _ in range(n)),
            tuple(rng.randbelow(h) for _ in range(n)),
        )
        assert parse_sequence(render_sequence(seq), params) == seq


@given(_case())
def test_roundtrip_patterns(case):
    a, h, _, pattern = case
    params = ProblemParams(a, h, max(1, len(pattern)))
    text = render_pattern(pattern, a)
    parsed = parse_pattern(text, params, pattern.mode)
    if len(pattern) == 0:
        # the hidden rule is unobservable in empty text; ignore is canonical
        assert parsed == TriggerPattern.apparent_only((), pattern.mode)
    else:
        assert parsed == pattern
