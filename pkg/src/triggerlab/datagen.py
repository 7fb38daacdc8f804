"""Synthetic stream generation and window slicing.

A stream is a run of i.i.d. uniform elements scanned by a single greedy
matcher for the trigger. When the matcher completes, an event is
recorded immediately after the completing element and the matcher is
fully reset, so no element ever contributes to two events. In
subsequence scenarios a partial match whose stretch from first to last
needed element would exceed ``span_bound`` is abandoned (fully reset)
before the current element is considered; with ``span_bound <= window``
every positive window therefore contains the whole trigger occurrence.
In consecutive scenarios a candidate placement must start after the
previous event's completing element.

Windowing emits, for each stream position p, the window of the n
preceding elements (a length drawn per position, uniformly, from the
supplied list) labelled 1 iff an event fired immediately after p.
Windows that would cross an earlier event marker are skipped; event
markers are positions between elements, not tokens, so the observed
alphabet stays of size a.

Datasets are line-delimited JSON records; the ground truth (config echo,
seed, rendered trigger, event positions) travels in a separate sidecar
file so the observed file never exposes hidden states.
"""

from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    HiddenConstraint,
    MatchMode,
    ProblemParams,
    Sequence,
    TriggerPattern,
    parse_pattern,
    render_pattern,
)
from .errors import DatasetFormatError, InvalidInputError
from .rng import Rng, derive_seed

__all__ = [
    "Scenario",
    "StreamConfig",
    "WindowRecord",
    "GroundTruth",
    "random_trigger",
    "generate_stream",
    "window_dataset",
    "write_dataset",
    "read_dataset",
    "write_stream",
    "read_stream",
    "truth_path",
]

FORMAT_VERSION = 1

# Sub-stream tags for derive_seed, so an explicitly supplied trigger and a
# drawn one lead to the identical element stream.
_ELEMENT_STREAM = 0
_TRIGGER_STREAM = 1


class Scenario(enum.Enum):
    CONSECUTIVE_NO_HIDDEN = "consecutive-nohidden"
    CONSECUTIVE_HIDDEN = "consecutive-hidden"
    SUBSEQUENCE_NO_HIDDEN = "subsequence-nohidden"
    SUBSEQUENCE_HIDDEN = "subsequence-hidden"

    @property
    def consecutive(self) -> bool:
        return self in (Scenario.CONSECUTIVE_NO_HIDDEN, Scenario.CONSECUTIVE_HIDDEN)

    @property
    def hidden(self) -> bool:
        return self in (Scenario.CONSECUTIVE_HIDDEN, Scenario.SUBSEQUENCE_HIDDEN)

    @classmethod
    def of(cls, params: ProblemParams, trigger: TriggerPattern) -> "Scenario":
        consecutive = trigger.mode is MatchMode.CONSECUTIVE
        hidden = params.h > 1 and trigger.constraint is not HiddenConstraint.IGNORE
        table = {
            (True, False): cls.CONSECUTIVE_NO_HIDDEN,
            (True, True): cls.CONSECUTIVE_HIDDEN,
            (False, False): cls.SUBSEQUENCE_NO_HIDDEN,
            (False, True): cls.SUBSEQUENCE_HIDDEN,
        }
        return table[(consecutive, hidden)]


@dataclass(frozen=True)
class StreamConfig:
    params: ProblemParams
    trigger: TriggerPattern
    scenario: Scenario
    length: int
    seed: int
    span_bound: int | None = None  # None means unbounded stretch

    def __post_init__(self):
        if len(self.trigger) != self.params.l:
            raise InvalidInputError(
                f"trigger length {len(self.trigger)} != l={self.params.l}"
            )
        if self.length < 0:
            raise InvalidInputError(f"length must be >= 0, got {self.length}")
        if Scenario.of(self.params, self.trigger) is not self.scenario:
            raise InvalidInputError(
                f"scenario {self.scenario.value} does not match the trigger/params combination"
            )
        if self.span_bound is not None and self.span_bound < self.params.l:
            raise InvalidInputError(
                f"span_bound {self.span_bound} is shorter than the trigger length {self.params.l}"
            )


@dataclass(frozen=True)
class WindowRecord:
    """A fixed-length observed window; label 1 means an event fired right
    after the last token."""

    tokens: tuple[int, ...]
    label: int
    offset: int

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.label not in (0, 1):
            raise InvalidInputError(f"label must be 0 or 1, got {self.label}")

    @property
    def n(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class GroundTruth:
    a: int
    h: int
    l: int
    scenario: str
    length: int
    seed: int
    span_bound: int | None
    trigger: str
    trigger_mode: str
    events: tuple[int, ...]

    @classmethod
    def of(cls, config: StreamConfig, stream: Sequence) -> "GroundTruth":
        return cls(
            a=config.params.a,
            h=config.params.h,
            l=config.params.l,
            scenario=config.scenario.value,
            length=config.length,
            seed=config.seed,
            span_bound=config.span_bound,
            trigger=render_pattern(config.trigger, config.params.a),
            trigger_mode=config.trigger.mode.value,
            events=tuple(stream.events),
        )

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "config": {
                "a": self.a,
                "h": self.h,
                "l": self.l,
                "scenario": self.scenario,
                "length": self.length,
                "seed": self.seed,
                "span_bound": self.span_bound,
            },
            "trigger": self.trigger,
            "trigger_mode": self.trigger_mode,
            "events": list(self.events),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "GroundTruth":
        cfg = obj["config"]
        return cls(
            a=cfg["a"],
            h=cfg["h"],
            l=cfg["l"],
            scenario=cfg["scenario"],
            length=cfg["length"],
            seed=cfg["seed"],
            span_bound=cfg.get("span_bound"),
            trigger=obj["trigger"],
            trigger_mode=obj["trigger_mode"],
            events=tuple(obj["events"]),
        )

    def trigger_pattern(self) -> TriggerPattern:
        params = ProblemParams(self.a, self.h, self.l)
        return parse_pattern(self.trigger, params, MatchMode(self.trigger_mode))


def random_trigger(params: ProblemParams, scenario: Scenario, seed: int) -> TriggerPattern:
    """Draw a trigger for the scenario from the dedicated trigger sub-stream."""
    rng = Rng(derive_seed(seed, _TRIGGER_STREAM))
    apparent = tuple(rng.randbelow(params.a) for _ in range(params.l))
    mode = MatchMode.CONSECUTIVE if scenario.consecutive else MatchMode.SUBSEQUENCE
    if scenario.hidden:
        if params.h < 2:
            raise InvalidInputError("hidden scenarios need h >= 2")
        hidden = tuple(rng.randbelow(params.h) for _ in range(params.l))
        return TriggerPattern.fixed(apparent, hidden, mode)
    return TriggerPattern.apparent_only(apparent, mode)


def _scan_subsequence(ap, hid, trigger: TriggerPattern, h: int, span_bound) -> list[int]:
    """Greedy span-bounded scan; returns completing element indices."""
    l = len(trigger)
    pat_ap = trigger.apparent
    constraint = trigger.constraint
    bound = span_bound if span_bound is not None else len(ap) + 1
    events: list[int] = []
    if constraint is HiddenConstraint.SHARED:
        progress = [0] * h
        starts = [0] * h
        for i, (x, y) in enumerate(zip(ap, hid)):
            k = progress[y]
            if k > 0 and i - starts[y] + 1 > bound:
                k = 0
            if x == pat_ap[k]:
                if k == 0:
                    starts[y] = i
                k += 1
                if k == l:
                    events.append(i)
                    progress = [0] * h
                    continue
            progress[y] = k
        return events
    pat_hid = trigger.hidden if constraint is HiddenConstraint.FIXED else None
    k = 0
    start = 0
    for i, (x, y) in enumerate(zip(ap, hid)):
        if k > 0 and i - start + 1 > bound:
            k = 0
        if x == pat_ap[k] and (pat_hid is None or y == pat_hid[k]):
            if k == 0:
                start = i
            k += 1
            if k == l:
                events.append(i)
                k = 0
    return events


def _scan_consecutive(ap, hid, trigger: TriggerPattern, n: int) -> list[int]:
    """Contiguous placements, earliest first, never reusing elements."""
    l = len(trigger)
    if n < l:
        return []
    pat_ap = np.array(trigger.apparent, dtype=np.int64)
    ok = np.ones(n - l + 1, dtype=bool)
    for o in range(l):
        ok &= ap[o : n - l + 1 + o] == pat_ap[o]
    if trigger.constraint is HiddenConstraint.FIXED:
        for o in range(l):
            ok &= hid[o : n - l + 1 + o] == trigger.hidden[o]
    elif trigger.constraint is HiddenConstraint.SHARED:
        for o in range(1, l):
            ok &= hid[o : n - l + 1 + o] == hid[: n - l + 1]
    events: list[int] = []
    last_end = -1
    for j in np.flatnonzero(ok):
        if j > last_end:
            end = int(j) + l - 1
            events.append(end)
            last_end = end
    return events


def generate_stream(config: StreamConfig) -> Sequence:
    """Draw the element stream and insert events per the matcher policy."""
    params = config.params
    s = params.joint_states
    rng = Rng(derive_seed(config.seed, _ELEMENT_STREAM))
    joint = rng.fill(s, config.length)
    ap_arr, hid_arr = np.divmod(joint, params.h)
    ap_list = ap_arr.tolist()
    hid_list = hid_arr.tolist()
    if config.scenario.consecutive:
        events = _scan_consecutive(ap_arr, hid_arr, config.trigger, config.length)
    else:
        events = _scan_subsequence(
            ap_list, hid_list, config.trigger, params.h, config.span_bound
        )
    return Sequence(params, tuple(ap_list), tuple(hid_list), tuple(events))


def window_dataset(
    stream: Sequence,
    window_lengths,
    balance: str = "keep-all",
    negative_ratio: float = 1.0,
    seed: int = 0,
    skip_crossing: bool = True,
) -> list[WindowRecord]:
    """Slice a stream into labelled windows.

    balance "keep-all" emits every admissible window; "downsample" keeps
    all positives plus round(negative_ratio * positives) negatives,
    sampled without replacement in stream order. The per-position window
    length draw consumes one Rng value per position, then the sampler
    continues on the same stream.

    skip_crossing drops windows with an event marker strictly inside.
    Pass False to slice straight through dense-event streams (the ML
    training regime); positive windows still contain their trigger
    whenever the generator's span bound fits the window.
    """
    lengths = list(window_lengths)
    if not lengths or any(not isinstance(w, int) or w < 1 for w in lengths):
        raise InvalidInputError(f"window lengths must be integers >= 1, got {window_lengths!r}")
    if min(lengths) < stream.params.l:
        raise InvalidInputError("window lengths must be >= the trigger length")
    if balance not in ("keep-all", "downsample"):
        raise InvalidInputError(f"balance must be keep-all or downsample, got {balance!r}")
    if negative_ratio < 0:
        raise InvalidInputError(f"negative_ratio must be >= 0, got {negative_ratio}")
    n = len(stream)
    rng = Rng(seed)
    choice = rng.fill(len(lengths), n)
    lengths_arr = np.array(lengths, dtype=np.int64)
    n_w = lengths_arr[choice]
    positions = np.arange(n, dtype=np.int64)
    starts = positions - n_w + 1
    events_arr = np.array(stream.events, dtype=np.int64)
    is_event = np.zeros(n, dtype=bool)
    if events_arr.size:
        is_event[events_arr] = True
    valid = starts >= 0
    if skip_crossing:
        # A window crosses a marker iff some event lies in [start, p-1].
        before_p = np.searchsorted(events_arr, positions, side="left")
        before_start = np.searchsorted(events_arr, starts, side="left")
        valid &= before_p == before_start
    pos_idx = np.flatnonzero(valid & is_event)
    neg_idx = np.flatnonzero(valid & ~is_event)
    if balance == "downsample":
        want = min(int(round(negative_ratio * pos_idx.size)), int(neg_idx.size))
        pool = neg_idx.tolist()
        picked = []
        for j in range(want):
            t = j + rng.randbelow(len(pool) - j)
            pool[j], pool[t] = pool[t], pool[j]
            picked.append(pool[j])
        neg_idx = np.array(sorted(picked), dtype=np.int64)
    keep = np.sort(np.concatenate([pos_idx, neg_idx]))
    apparent = stream.apparent
    records = [
        WindowRecord(
            tokens=apparent[int(starts[p]) : int(p) + 1],
            label=int(is_event[p]),
            offset=int(starts[p]),
        )
        for p in keep
    ]
    if not records:
        warnings.warn("stream shorter than every window length; no records emitted")
    return records


# ---------------------------------------------------------------------------
# Files


def truth_path(path) -> Path:
    return Path(path).with_suffix(".truth.json")


def write_dataset(path, records, truth: GroundTruth | None = None) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as f:
        for rec in records:
            f.write(
                json.dumps(
                    {
                        "tokens": list(rec.tokens),
                        "label": rec.label,
                        "offset": rec.offset,
                        "n": rec.n,
                    },
                    separators=(",", ":"),
                )
            )
            f.write("\n")
    if truth is not None:
        truth_path(path).write_text(
            json.dumps(truth.to_dict(), indent=2) + "\n", encoding="utf-8"
        )


def read_dataset(path) -> tuple[list[WindowRecord], GroundTruth | None]:
    path = Path(path)
    records = []
    with path.open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DatasetFormatError(f"bad JSON: {e.msg}", line=lineno) from e
            try:
                tokens = tuple(int(t) for t in obj["tokens"])
                rec = WindowRecord(tokens=tokens, label=int(obj["label"]), offset=int(obj["offset"]))
                if int(obj["n"]) != rec.n:
                    raise DatasetFormatError(
                        f"n field {obj['n']} != token count {rec.n}", line=lineno
                    )
            except DatasetFormatError:
                raise
            except (KeyError, TypeError, ValueError, InvalidInputError) as e:
                raise DatasetFormatError(f"bad record: {e}", line=lineno) from e
            records.append(rec)
    tp = truth_path(path)
    truth = None
    if tp.exists():
        truth = GroundTruth.from_dict(json.loads(tp.read_text(encoding="utf-8")))
    return records, truth


def write_stream(path, stream: Sequence, truth: GroundTruth | None = None) -> None:
    """Observed stream file: apparent states and event positions only."""
    path = Path(path)
    obj = {
        "format": FORMAT_VERSION,
        "a": stream.params.a,
        "length": len(stream),
        "apparent": list(stream.apparent),
        "events": list(stream.events),
    }
    path.write_text(json.dumps(obj, separators=(",", ":")) + "\n", encoding="utf-8")
    if truth is not None:
        truth_path(path).write_text(
            json.dumps(truth.to_dict(), indent=2) + "\n", encoding="utf-8"
        )


def read_stream(path) -> tuple[dict, GroundTruth | None]:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DatasetFormatError(f"bad stream file: {e.msg}") from e
    for key in ("format", "a", "length", "apparent", "events"):
        if key not in obj:
            raise DatasetFormatError(f"stream file missing field {key!r}")
    tp = truth_path(path)
    truth = None
    if tp.exists():
        truth = GroundTruth.from_dict(json.loads(tp.read_text(encoding="utf-8")))
    return obj, truth
