"""Monte Carlo estimation and exhaustive oracles for the formulas in `prob`.

Random windows are drawn element by element: one `Rng.fill` draw over the
joint alphabet of size s = a*h per element, decoded as
(apparent, hidden) = divmod(value, h). Trial t of a run consumes draws
[t*n, (t+1)*n) of the stream for seed `seed`, so estimates are exactly
reproducible and independent of batching or trial-level parallelism.

`exact_enumeration` walks every one of the (a*h)**n joint windows (in
chunks, behind a size guard) and returns the exact rational containment
probability. `dp_probability` evolves the distribution of the greedy
matcher's progress instead; both exist as independent routes to the same
numbers as the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import HiddenConstraint, MatchMode, ProblemParams, TriggerPattern, _check_alphabets
from .errors import InstanceTooLargeError, InvalidInputError
from .rng import Rng

__all__ = ["McEstimate", "mc_probability", "exact_enumeration", "dp_probability"]

ENUMERATION_GUARD = 10**8
_BATCH_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    trials: int
    stderr: float
    ci95: tuple[float, float]

    @classmethod
    def from_hits(cls, hits: int, trials: int) -> "McEstimate":
        est = hits / trials
        stderr = math.sqrt(est * (1.0 - est) / trials)
        lo = max(0.0, est - 1.96 * stderr)
        hi = min(1.0, est + 1.96 * stderr)
        return cls(est, trials, stderr, (lo, hi))


def _match_batch(ap: np.ndarray, hid: np.ndarray, pattern: TriggerPattern, h: int) -> np.ndarray:
    """Per-row containment for a (rows, n) batch of joint windows."""
    rows, n = ap.shape
    l = len(pattern)
    if l == 0:
        return np.ones(rows, dtype=bool)
    pat_ap = np.array(pattern.apparent, dtype=np.int64)
    if pattern.mode is MatchMode.SUBSEQUENCE:
        if pattern.constraint is HiddenConstraint.SHARED:
            # One greedy counter per hidden value, advanced in lockstep.
            state = np.zeros((rows, h), dtype=np.int64)
            pad_ap = np.append(pat_ap, -1)
            hvals = np.arange(h, dtype=np.int64)
            for i in range(n):
                need = pad_ap[state]
                adv = (ap[:, i, None] == need) & (hid[:, i, None] == hvals)
                state += adv
            return (state >= l).any(axis=1)
        state = np.zeros(rows, dtype=np.int64)
        pad_ap = np.append(pat_ap, -1)
        if pattern.constraint is HiddenConstraint.FIXED:
            pad_hid = np.append(np.array(pattern.hidden, dtype=np.int64), -1)
            for i in range(n):
                adv = (ap[:, i] == pad_ap[state]) & (hid[:, i] == pad_hid[state])
                state += adv
        else:
            for i in range(n):
                state += ap[:, i] == pad_ap[state]
        return state >= l
    # Consecutive: test every placement.
    if n < l:
        return np.zeros(rows, dtype=bool)
    hit = np.zeros(rows, dtype=bool)
    for j in range(n - l + 1):
        ok = np.ones(rows, dtype=bool)
        for o in range(l):
            ok &= ap[:, j + o] == pat_ap[o]
        if pattern.constraint is HiddenConstraint.FIXED:
            for o in range(l):
                ok &= hid[:, j + o] == pattern.hidden[o]
        elif pattern.constraint is HiddenConstraint.SHARED:
            for o in range(1, l):
                ok &= hid[:, j + o] == hid[:, j]
        hit |= ok
    return hit


def mc_probability(
    n: int,
    params: ProblemParams,
    pattern: TriggerPattern,
    trials: int,
    seed: int,
) -> McEstimate:
    """Fraction of `trials` random windows of length n containing the pattern."""
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials}")
    if n < 0:
        raise InvalidInputError(f"n must be >= 0, got {n}")
    _check_alphabets(params, pattern)
    s = params.joint_states
    h = params.h
    rng = Rng(seed)
    if n == 0:
        hits = trials if len(pattern) == 0 else 0
        return McEstimate.from_hits(hits, trials)
    hits = 0
    batch_rows = max(1, _BATCH_ELEMENTS // n)
    done = 0
    while done < trials:
        rows = min(batch_rows, trials - done)
        joint = rng.fill(s, rows * n).reshape(rows, n)
        ap, hid = np.divmod(joint, h)
        hits += int(_match_batch(ap, hid, pattern, h).sum())
        done += rows
    return McEstimate.from_hits(hits, trials)


def exact_enumeration(n: int, params: ProblemParams, pattern: TriggerPattern) -> Fraction:
    """Exact containment probability by visiting every joint window."""
    if n < 0:
        raise InvalidInputError(f"n must be >= 0, got {n}")
    _check_alphabets(params, pattern)
    s = params.joint_states
    total = s**n
    if total > ENUMERATION_GUARD:
        raise InstanceTooLargeError(
            f"(a*h)**n = {total} exceeds the enumeration guard {ENUMERATION_GUARD}"
        )
    if n == 0:
        return Fraction(1 if len(pattern) == 0 else 0)
    h = params.h
    count = 0
    chunk = max(1, _BATCH_ELEMENTS // n)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        joint = np.empty((idx.size, n), dtype=np.int64)
        for j in range(n):
            joint[:, j] = (idx // s**j) % s
        ap, hid = np.divmod(joint, h)
        count += int(_match_batch(ap, hid, pattern, h).sum())
    return Fraction(count, total)


def dp_probability(n: int, params: ProblemParams, l: int) -> float:
    """Containment probability from the greedy matcher's progress chain.

    The progress over matched entries is a Markov chain that advances
    with probability 1/(a*h) per element and is absorbed at l.
    """
    if n < 0 or l < 0:
        raise InvalidInputError(f"dp_probability needs n >= 0 and l >= 0")
    if l == 0:
        return 1.0
    u = 1.0 / params.joint_states
    dist = [1.0] + [0.0] * l
    for _ in range(n):
        nxt = [0.0] * (l + 1)
        for j in range(l):
            nxt[j] += dist[j] * (1.0 - u)
            nxt[j + 1] += dist[j] * u
        nxt[l] += dist[l]
        dist = nxt
    return min(1.0, max(0.0, dist[l]))
