"""Trigger inference by candidate elimination.

Only apparent patterns can be candidates: hidden states are unobservable
in the data, so the best any observer can do from windows alone is to
recover the trigger's apparent projection. A candidate is ruled out by a
positive (event-causing) window that does not contain it; the true
trigger's projection is contained in every positive window when the
generator's span bound does not exceed the window length, so it can
never be ruled out on such data.

Strict mode eliminates on the first miss (tolerance 0 by default).
Ranked mode keeps the candidates with the fewest misses instead, for
data without a hard span guarantee. Counters are additive, so shards of
a dataset may be processed independently and merged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .core import MatchMode, TriggerPattern, render_tokens, tokens_contain
from .datagen import GroundTruth, WindowRecord, read_dataset
from .errors import InstanceTooLargeError, InvalidInputError

__all__ = ["CandidateTable", "InferenceReport", "enumerate_candidates", "eliminate", "infer_trigger"]

CANDIDATE_GUARD = 10**6

STATUS_OK = "ok"
STATUS_EMPTY = "empty"
STATUS_INSUFFICIENT = "insufficient-data"


def enumerate_candidates(a: int, l: int) -> tuple[TriggerPattern, ...]:
    """All a**l apparent subsequence patterns, lexicographic."""
    if a < 1 or l < 0:
        raise InvalidInputError(f"need a >= 1 and l >= 0, got a={a} l={l}")
    if a**l > CANDIDATE_GUARD:
        raise InstanceTooLargeError(f"a**l = {a**l} exceeds the candidate guard {CANDIDATE_GUARD}")
    return tuple(
        TriggerPattern.apparent_only(combo, MatchMode.SUBSEQUENCE)
        for combo in product(range(a), repeat=l)
    )


@dataclass
class CandidateTable:
    """Per-candidate miss counters plus the policy that reads them."""

    candidates: tuple[TriggerPattern, ...]
    miss_counts: list[int]
    mode: str
    tolerance: int
    windows_seen: int
    status: str

    @property
    def eliminated(self) -> list[bool]:
        if self.windows_seen == 0:
            return [False] * len(self.candidates)
        if self.mode == "ranked":
            best = min(self.miss_counts)
            return [m > best for m in self.miss_counts]
        return [m > self.tolerance for m in self.miss_counts]

    @property
    def survivors(self) -> list[TriggerPattern]:
        return [c for c, e in zip(self.candidates, self.eliminated) if not e]

    def ranking(self) -> list[int]:
        """Candidate indices ordered by ascending miss count."""
        return sorted(range(len(self.candidates)), key=lambda i: (self.miss_counts[i], i))


def eliminate(
    windows,
    a: int,
    l: int,
    mode: str = "strict",
    tolerance: int = 0,
) -> CandidateTable:
    """Single streaming pass over positive windows; O(a**l) memory."""
    if mode not in ("strict", "ranked"):
        raise InvalidInputError(f"mode must be strict or ranked, got {mode!r}")
    if tolerance < 0:
        raise InvalidInputError(f"tolerance must be >= 0, got {tolerance}")
    candidates = enumerate_candidates(a, l)
    apparents = [c.apparent for c in candidates]
    miss = [0] * len(candidates)
    seen = 0
    for w in windows:
        if w.label != 1:
            raise InvalidInputError("eliminate expects positive windows only")
        tokens = w.tokens
        if tokens and max(tokens) >= a:
            raise InvalidInputError(f"window token out of range for a={a}")
        seen += 1
        if l == 0:
            continue  # the empty pattern is contained everywhere
        for i, pat in enumerate(apparents):
            # inline greedy subsequence check, hot path
            k = 0
            last = l
            for t in tokens:
                if t == pat[k]:
                    k += 1
                    if k == last:
                        break
            if k < last:
                miss[i] += 1
    status = STATUS_EMPTY if seen == 0 else STATUS_OK
    return CandidateTable(
        candidates=candidates,
        miss_counts=miss,
        mode=mode,
        tolerance=tolerance,
        windows_seen=seen,
        status=status,
    )


def merge_tables(left: CandidateTable, right: CandidateTable) -> CandidateTable:
    """Combine tables produced from disjoint shards of one dataset."""
    if left.candidates != right.candidates or left.mode != right.mode or left.tolerance != right.tolerance:
        raise InvalidInputError("tables to merge must share candidates, mode and tolerance")
    seen = left.windows_seen + right.windows_seen
    return CandidateTable(
        candidates=left.candidates,
        miss_counts=[x + y for x, y in zip(left.miss_counts, right.miss_counts)],
        mode=left.mode,
        tolerance=left.tolerance,
        windows_seen=seen,
        status=STATUS_EMPTY if seen == 0 else STATUS_OK,
    )


@dataclass
class InferenceReport:
    a: int
    l: int
    mode: str
    status: str
    positives: int
    windows_total: int
    survivors: list[str]
    candidates: list[dict] = field(default_factory=list)
    truth_trigger: str | None = None
    truth_apparent: str | None = None
    truth_is_survivor: bool | None = None

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "l": self.l,
            "mode": self.mode,
            "status": self.status,
            "positives": self.positives,
            "windows_total": self.windows_total,
            "survivors": self.survivors,
            "candidates": self.candidates,
            "truth_trigger": self.truth_trigger,
            "truth_apparent": self.truth_apparent,
            "truth_is_survivor": self.truth_is_survivor,
        }


def report_from_table(
    table: CandidateTable,
    a: int,
    l: int,
    windows_total: int,
    truth: GroundTruth | None = None,
) -> InferenceReport:
    ranked = table.ranking()
    eliminated = table.eliminated
    survivors = [render_tokens(table.candidates[i].apparent, a) for i in ranked if not eliminated[i]]
    rows = [
        {
            "pattern": render_tokens(table.candidates[i].apparent, a),
            "miss_count": table.miss_counts[i],
            "eliminated": eliminated[i],
        }
        for i in ranked
    ]
    status = STATUS_INSUFFICIENT if table.windows_seen == 0 else table.status
    report = InferenceReport(
        a=a,
        l=l,
        mode=table.mode,
        status=status,
        positives=table.windows_seen,
        windows_total=windows_total,
        survivors=survivors,
        candidates=rows,
    )
    if truth is not None:
        pattern = truth.trigger_pattern()
        report.truth_trigger = truth.trigger
        report.truth_apparent = render_tokens(pattern.apparent, a)
        report.truth_is_survivor = report.truth_apparent in survivors
    return report


def infer_trigger(
    path,
    a: int | None = None,
    l: int | None = None,
    mode: str = "strict",
    tolerance: int = 0,
) -> InferenceReport:
    """Read a window dataset, eliminate over its positive records, and
    compare against the ground-truth sidecar when one is present."""
    records, truth = read_dataset(path)
    if a is None or l is None:
        if truth is None:
            raise InvalidInputError("no ground-truth sidecar; pass a and l explicitly")
        a = a if a is not None else truth.a
        l = l if l is not None else truth.l
    positives = [r for r in records if r.label == 1]
    table = eliminate(positives, a, l, mode=mode, tolerance=tolerance)
    return report_from_table(table, a, l, windows_total=len(records), truth=truth)
