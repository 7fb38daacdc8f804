"""Domain types, the greedy matcher, and the canonical token text format.

An element of a stream has an observable ("apparent") state from an
alphabet of size ``a`` and an unobservable ("hidden") state from an
alphabet of size ``h``. A trigger is an ordered pattern of length ``l``
over the same alphabets; it may be required to occur contiguously
(consecutive mode) or merely in order (subsequence mode), and its hidden
side may be pinned per entry (fixed), required to take one common value
that may be any of the h states (shared), or ignored entirely.

Indices are 0-based everywhere in code. Rendered text uses 1-based
hidden labels: ``L1`` is apparent letter L with hidden index 0.
"""

from __future__ import annotations

import enum
import string
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence as PySequence

from .errors import InvalidInputError, ParseError


class HiddenConstraint(enum.Enum):
    FIXED = "fixed"
    SHARED = "shared"
    IGNORE = "ignore"


class MatchMode(enum.Enum):
    CONSECUTIVE = "consecutive"
    SUBSEQUENCE = "subsequence"


@dataclass(frozen=True)
class ProblemParams:
    """The (a, h, l) triple that parameterises every formula."""

    a: int
    h: int
    l: int

    def __post_init__(self):
        for name in ("a", "h", "l"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise InvalidInputError(f"{name} must be an integer >= 1, got {v!r}")

    @property
    def joint_states(self) -> int:
        return self.a * self.h


class Element(NamedTuple):
    apparent: int
    hidden: int


@dataclass(frozen=True)
class TriggerPattern:
    """Ordered trigger pattern with a homogeneous hidden-state rule.

    ``hidden`` is required (and same length as ``apparent``) for FIXED,
    and must be absent otherwise, so mixed per-entry rules cannot be
    represented.
    """

    apparent: tuple[int, ...]
    constraint: HiddenConstraint = HiddenConstraint.IGNORE
    hidden: tuple[int, ...] | None = None
    mode: MatchMode = MatchMode.SUBSEQUENCE

    def __post_init__(self):
        object.__setattr__(self, "apparent", tuple(self.apparent))
        if any(not isinstance(x, int) or x < 0 for x in self.apparent):
            raise InvalidInputError("apparent entries must be integers >= 0")
        if self.constraint is HiddenConstraint.FIXED:
            if self.hidden is None:
                raise InvalidInputError("fixed-hidden pattern needs hidden indices")
            object.__setattr__(self, "hidden", tuple(self.hidden))
            if len(self.hidden) != len(self.apparent):
                raise InvalidInputError("hidden and apparent lengths differ")
            if any(not isinstance(x, int) or x < 0 for x in self.hidden):
                raise InvalidInputError("hidden entries must be integers >= 0")
        elif self.hidden is not None:
            raise InvalidInputError(
                f"{self.constraint.value} pattern must not carry hidden indices"
            )

    def __len__(self) -> int:
        return len(self.apparent)

    @classmethod
    def fixed(cls, apparent, hidden, mode=MatchMode.SUBSEQUENCE) -> "TriggerPattern":
        return cls(tuple(apparent), HiddenConstraint.FIXED, tuple(hidden), mode)

    @classmethod
    def shared(cls, apparent, mode=MatchMode.SUBSEQUENCE) -> "TriggerPattern":
        return cls(tuple(apparent), HiddenConstraint.SHARED, None, mode)

    @classmethod
    def apparent_only(cls, apparent, mode=MatchMode.SUBSEQUENCE) -> "TriggerPattern":
        return cls(tuple(apparent), HiddenConstraint.IGNORE, None, mode)


@dataclass(frozen=True)
class Sequence:
    """A stream of elements plus the positions after which an event fired.

    Elements are stored as parallel apparent/hidden tuples; ``events``
    holds completing element indices, strictly increasing. Immutable
    after construction, so instances can be shared across threads.
    """

    params: ProblemParams
    apparent: tuple[int, ...]
    hidden: tuple[int, ...]
    events: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "apparent", tuple(self.apparent))
        object.__setattr__(self, "hidden", tuple(self.hidden))
        object.__setattr__(self, "events", tuple(self.events))
        if len(self.apparent) != len(self.hidden):
            raise InvalidInputError("apparent and hidden lengths differ")
        n = len(self.apparent)
        if self.apparent and not (
            0 <= min(self.apparent) and max(self.apparent) < self.params.a
        ):
            raise InvalidInputError("apparent state out of range")
        if self.hidden and not (
            0 <= min(self.hidden) and max(self.hidden) < self.params.h
        ):
            raise InvalidInputError("hidden state out of range")
        prev = -1
        for e in self.events:
            if not isinstance(e, int) or e <= prev or e >= n:
                raise InvalidInputError("event positions must be strictly increasing and < length")
            prev = e

    def __len__(self) -> int:
        return len(self.apparent)

    def element(self, i: int) -> Element:
        return Element(self.apparent[i], self.hidden[i])

    @property
    def elements(self) -> tuple[Element, ...]:
        return tuple(Element(a, h) for a, h in zip(self.apparent, self.hidden))

    @classmethod
    def from_elements(cls, params, elements: Iterable[Element], events=()) -> "Sequence":
        els = list(elements)
        return cls(params, tuple(e[0] for e in els), tuple(e[1] for e in els), tuple(events))


# ---------------------------------------------------------------------------
# Greedy matcher


def _subseq(ap, hid, pat_ap, pat_hid) -> bool:
    k = 0
    last = len(pat_ap)
    if last == 0:
        return True
    if pat_hid is None:
        for x in ap:
            if x == pat_ap[k]:
                k += 1
                if k == last:
                    return True
    else:
        for x, y in zip(ap, hid):
            if x == pat_ap[k] and y == pat_hid[k]:
                k += 1
                if k == last:
                    return True
    return False


def _subseq_shared(ap, hid, pat_ap, h) -> bool:
    # One greedy counter per hidden value; the element only ever touches
    # the counter of its own hidden state, so the scan stays O(n).
    last = len(pat_ap)
    if last == 0:
        return True
    progress = [0] * h
    for x, y in zip(ap, hid):
        k = progress[y]
        if x == pat_ap[k]:
            k += 1
            if k == last:
                return True
            progress[y] = k
    return False


def _consecutive(ap, hid, pat_ap, pat_hid) -> bool:
    last = len(pat_ap)
    if last == 0:
        return True
    for j in range(len(ap) - last + 1):
        for o in range(last):
            if ap[j + o] != pat_ap[o]:
                break
            if pat_hid is not None and hid[j + o] != pat_hid[o]:
                break
        else:
            return True
    return False


def _consecutive_shared(ap, hid, pat_ap) -> bool:
    last = len(pat_ap)
    if last == 0:
        return True
    for j in range(len(ap) - last + 1):
        first = hid[j]
        for o in range(last):
            if ap[j + o] != pat_ap[o] or hid[j + o] != first:
                break
        else:
            return True
    return False


def _check_alphabets(params: ProblemParams, pattern: TriggerPattern) -> None:
    if pattern.apparent and max(pattern.apparent) >= params.a:
        raise InvalidInputError(
            f"pattern apparent index {max(pattern.apparent)} out of range for a={params.a}"
        )
    if pattern.constraint is HiddenConstraint.FIXED and pattern.hidden:
        if max(pattern.hidden) >= params.h:
            raise InvalidInputError(
                f"pattern hidden index {max(pattern.hidden)} out of range for h={params.h}"
            )


def contains(seq: Sequence, pattern: TriggerPattern, start: int = 0, stop: int | None = None) -> bool:
    """True iff the pattern occurs in seq[start:stop] under its mode and rule.

    Subsequence mode matches in order but not necessarily contiguously;
    consecutive mode requires contiguous positions. The shared rule holds
    iff there is a single hidden value for which the fully pinned pattern
    occurs.
    """
    _check_alphabets(seq.params, pattern)
    ap = seq.apparent[start:stop]
    hid = seq.hidden[start:stop]
    if pattern.mode is MatchMode.SUBSEQUENCE:
        if pattern.constraint is HiddenConstraint.SHARED:
            return _subseq_shared(ap, hid, pattern.apparent, seq.params.h)
        hidden = pattern.hidden if pattern.constraint is HiddenConstraint.FIXED else None
        return _subseq(ap, hid, pattern.apparent, hidden)
    if pattern.constraint is HiddenConstraint.SHARED:
        return _consecutive_shared(ap, hid, pattern.apparent)
    hidden = pattern.hidden if pattern.constraint is HiddenConstraint.FIXED else None
    return _consecutive(ap, hid, pattern.apparent, hidden)


def tokens_contain(tokens: PySequence[int], pattern: TriggerPattern) -> bool:
    """Containment for an observed (apparent-only) token window.

    Only ignore-rule patterns can be tested against observed data.
    """
    if pattern.constraint is not HiddenConstraint.IGNORE:
        raise InvalidInputError("observed windows carry no hidden states; use an ignore-rule pattern")
    if pattern.mode is MatchMode.SUBSEQUENCE:
        return _subseq(tokens, None, pattern.apparent, None)
    return _consecutive(tokens, None, pattern.apparent, None)


# ---------------------------------------------------------------------------
# Token text codec

_SHARED_MARK = "i"


def default_letters(a: int) -> str:
    """Apparent-state letters: LS for two states, A.. otherwise."""
    if a < 1 or a > 26:
        raise InvalidInputError(f"letter rendering supports 1 <= a <= 26, got {a}")
    if a == 2:
        return "LS"
    return string.ascii_uppercase[:a]


def render_element(el: Element, letters: str) -> str:
    return f"{letters[el.apparent]}{el.hidden + 1}"


def render_sequence(seq: Sequence, letters: str | None = None) -> str:
    letters = letters or default_letters(seq.params.a)
    return "".join(
        f"{letters[a]}{h + 1}" for a, h in zip(seq.apparent, seq.hidden)
    )


def render_pattern(pattern: TriggerPattern, a: int, letters: str | None = None) -> str:
    letters = letters or default_letters(a)
    if pattern.constraint is HiddenConstraint.FIXED:
        return "".join(f"{letters[x]}{y + 1}" for x, y in zip(pattern.apparent, pattern.hidden))
    if pattern.constraint is HiddenConstraint.SHARED:
        return "".join(f"{letters[x]}{_SHARED_MARK}" for x in pattern.apparent)
    return "".join(letters[x] for x in pattern.apparent)


def render_tokens(tokens: PySequence[int], a: int, letters: str | None = None) -> str:
    letters = letters or default_letters(a)
    return "".join(letters[t] for t in tokens)


def _tokenize(text: str, letters: str):
    """Split text into (apparent, suffix, position) raw tokens.

    suffix is an int hidden label (1-based), the shared mark, or None.
    """
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        idx = letters.find(ch)
        if idx < 0:
            raise ParseError(f"unknown letter {ch!r}", i)
        pos = i
        i += 1
        if i < n and text[i] == _SHARED_MARK:
            out.append((idx, _SHARED_MARK, pos))
            i += 1
            continue
        j = i
        while j < n and text[j].isdigit():
            j += 1
        if j > i:
            out.append((idx, int(text[i:j]), pos))
            i = j
        else:
            out.append((idx, None, pos))
    return out


def parse_sequence(text: str, params: ProblemParams, letters: str | None = None) -> Sequence:
    """Parse token text like ``L1L1S2`` into a Sequence (without events)."""
    letters = letters or default_letters(params.a)
    ap, hid = [], []
    for idx, suffix, pos in _tokenize(text, letters):
        if suffix is None or suffix == _SHARED_MARK:
            raise ParseError("sequence tokens need a hidden index", pos)
        if not (1 <= suffix <= params.h):
            raise ParseError(f"hidden index {suffix} out of range 1..{params.h}", pos)
        ap.append(idx)
        hid.append(suffix - 1)
    return Sequence(params, tuple(ap), tuple(hid))


def parse_pattern(
    text: str,
    params: ProblemParams,
    mode: MatchMode = MatchMode.SUBSEQUENCE,
    letters: str | None = None,
) -> TriggerPattern:
    """Parse pattern text; the suffix style picks the hidden rule.

    ``L1L3S2`` pins hidden states, ``LiLiSi`` requires one shared state,
    bare letters ignore hidden states. Styles cannot be mixed.
    """
    letters = letters or default_letters(params.a)
    toks = _tokenize(text, letters)
    if not toks:
        return TriggerPattern.apparent_only((), mode)
    kinds = set()
    for idx, suffix, pos in toks:
        if suffix is None:
            kinds.add(HiddenConstraint.IGNORE)
        elif suffix == _SHARED_MARK:
            kinds.add(HiddenConstraint.SHARED)
        else:
            kinds.add(HiddenConstraint.FIXED)
            if not (1 <= suffix <= params.h):
                raise ParseError(f"hidden index {suffix} out of range 1..{params.h}", pos)
        if len(kinds) > 1:
            raise ParseError("mixed hidden-state styles in one pattern", pos)
    kind = kinds.pop()
    apparent = tuple(idx for idx, _, _ in toks)
    if kind is HiddenConstraint.FIXED:
        return TriggerPattern.fixed(apparent, tuple(s - 1 for _, s, _ in toks), mode)
    if kind is HiddenConstraint.SHARED:
        return TriggerPattern.shared(apparent, mode)
    return TriggerPattern.apparent_only(apparent, mode)
