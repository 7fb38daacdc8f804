"""Closed-form occurrence probabilities for a trigger in a random window.

Write s = a*h for the joint alphabet size. Scanning a window left to
right, each element independently matches the next needed entry of a
fully pinned trigger with probability 1/s, and the trigger is present as
a subsequence iff at least l matches accumulate. The occurrence
probability of a particular trigger is therefore the binomial tail
P[Binomial(n, 1/s) >= l], independent of the trigger's shape. Four
algebraic forms of that tail are implemented (they are cross-checked
against each other and against exhaustive enumeration in the tests):

p_binom      direct sum over the number of matching elements
p_negbinom   waiting-time form: the l-th match lands at position i <= n
p_iter       one-step recurrence with correction terms (l = 3 only)
p_rec        two-variable recurrence in (n, l)
p_repeated   conditional split for the two-letter, four-hidden-state
             repeated pattern X.X.Y pinned to one hidden value

On top of the particular-trigger tail:

p_same_hidden        estimator and lower bound for the probability that
                     the trigger occurs at any of the h hidden values
                     when all entries share one hidden state
count_noncontaining  exact number of apparent strings of length n that
                     avoid a fixed apparent pattern of length l
q_apparent           the complementary occurrence probability, identical
                     to p_binom with h = 1

Floats are returned by default. ``exact=True`` (where offered) returns
`fractions.Fraction`, used for golden-number and boundary tests. All
functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .core import ProblemParams
from .errors import InvalidInputError, UnsupportedParameterError

__all__ = [
    "p_binom",
    "p_negbinom",
    "p_iter",
    "p_rec",
    "p_repeated",
    "p_same_hidden",
    "count_noncontaining",
    "q_apparent",
]


def _check_length(n: int) -> None:
    if not isinstance(n, int) or n < 0:
        raise InvalidInputError(f"window length must be an integer >= 0, got {n!r}")


def _clamp(x: float) -> float:
    if x != x:
        raise ArithmeticError("probability computed as NaN")
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _miss_count(n: int, s: int, l: int) -> int:
    """Number of length-n strings over s symbols with fewer than l greedy matches."""
    return sum(math.comb(n, k) * (s - 1) ** (n - k) for k in range(min(l, n + 1)))


def _tail_float(n: int, s: int, l: int) -> float:
    if n < l:
        return 0.0
    if l == 0:
        return 1.0
    if s == 1:
        return 1.0
    if _log_comb(n, l - 1) < 700.0:
        # Exact binomial coefficients with float powers; bit-exact for
        # power-of-two alphabets at small n.
        q = 1.0 / s
        r = (s - 1) / s
        miss = math.fsum(math.comb(n, k) * q**k * r ** (n - k) for k in range(l))
    else:
        log_q = -math.log(s)
        log_r = math.log1p(-1.0 / s)
        miss = math.fsum(
            math.exp(_log_comb(n, k) + k * log_q + (n - k) * log_r) for k in range(l)
        )
    return _clamp(1.0 - miss)


def _tail_exact(n: int, s: int, l: int) -> Fraction:
    if n < l:
        return Fraction(0)
    if l == 0 or s == 1:
        return Fraction(1)
    return 1 - Fraction(_miss_count(n, s, l), s**n)


def p_binom(n: int, params: ProblemParams, exact: bool = False):
    """P[a particular trigger of length params.l occurs in a window of n].

    Zero for n < l; numerically stable up to n ~ 1e4 (the complement has
    only l log-space terms).
    """
    _check_length(n)
    s = params.joint_states
    return _tail_exact(n, s, params.l) if exact else _tail_float(n, s, params.l)


def p_negbinom(n: int, params: ProblemParams, exact: bool = False):
    """Waiting-time form: sums P[l-th matching element is the i-th] for i <= n."""
    _check_length(n)
    s = params.joint_states
    l = params.l
    if n < l:
        return Fraction(0) if exact else 0.0
    if s == 1:
        return Fraction(1) if exact else 1.0
    if exact:
        q = Fraction(1, s)
        r = 1 - q
        term = q**l
        total = term
        for i in range(l, n):
            term = term * r * i / (i + 1 - l)
            total += term
        return total
    q = 1.0 / s
    r = 1.0 - q
    term = q**l
    total = term
    for i in range(l, n):
        term *= r * i / (i + 1 - l)
        total += term
    return _clamp(total)


def p_iter(n: int, params: ProblemParams) -> float:
    """One-step recurrence form. Only defined for l = 3: the correction
    terms hard-code 'at least two matches among the first n elements'."""
    _check_length(n)
    if params.l != 3:
        raise UnsupportedParameterError(f"p_iter is defined for l = 3 only, got l={params.l}")
    s = params.joint_states
    if s == 1:
        return 1.0 if n >= 3 else 0.0
    q = 1.0 / s
    r = 1.0 - q
    p = 0.0
    for m in range(n):
        correction = 1.0 - r**m
        if m >= 1:
            correction -= r ** (m - 1) * m * q
        p = r * p + q * correction
    return _clamp(p)


def p_rec(n: int, l: int, params: ProblemParams) -> float:
    """Two-variable recurrence p(n+1, l) = r p(n, l) + q p(n, l-1) with
    p(0, l>0) = 0 and p(n, 0) = 1, evaluated as a table.

    ``l`` is passed explicitly (and may be 0 or exceed params.l) so the
    boundary rows are reachable.
    """
    if not isinstance(n, int) or n < 0 or not isinstance(l, int) or l < 0:
        raise InvalidInputError(f"p_rec needs n >= 0 and l >= 0, got n={n!r} l={l!r}")
    s = params.joint_states
    q = 1.0 / s
    r = 1.0 - q
    row = [1.0] + [0.0] * l
    for _ in range(n):
        prev = row
        row = [1.0] * (l + 1)
        for lam in range(1, l + 1):
            row[lam] = r * prev[lam] + q * prev[lam - 1]
    return _clamp(row[l])


def p_repeated(n: int, exact: bool = False):
    """Occurrence probability of the repeated-letter trigger X.X.Y pinned
    to one hidden value, for two apparent and four hidden states.

    Conditions on the number k of match-relevant elements (probability
    2/8 each) and, within k, on the split x/y between the two letters;
    an arrangement factor counts the splits in which the pattern cannot
    be assembled, clamped to 1 when x < 2 or y < 1.
    """
    _check_length(n)
    if exact:
        total = Fraction(0)
        for k in range(3, n + 1):
            outer = (
                Fraction(math.comb(n, k))
                * Fraction(1, 4) ** k
                * Fraction(3, 4) ** (n - k)
            )
            no_trigger = Fraction(0)
            for x in range(k + 1):
                y = k - x
                gamma = Fraction(math.comb(k, x), 2**k)
                if x < 2 or y < 1:
                    arrangement = Fraction(1)
                else:
                    arrangement = min(Fraction(1), Fraction(y + 1, math.comb(k, x)))
                no_trigger += gamma * arrangement
            total += outer * (1 - no_trigger)
        return total
    log_quarter = math.log(0.25)
    log_rest = math.log(0.75)
    log_half = math.log(0.5)
    total = []
    for k in range(3, n + 1):
        outer = math.exp(_log_comb(n, k) + k * log_quarter + (n - k) * log_rest)
        parts = []
        for x in range(k + 1):
            y = k - x
            log_gamma = _log_comb(k, x) + k * log_half
            if x < 2 or y < 1:
                parts.append(math.exp(log_gamma))
            else:
                # gamma * (y+1)/C(k,x) simplifies to (y+1) * 2**-k
                parts.append(min(math.exp(log_gamma), (y + 1) * math.exp(k * log_half)))
        bracket = max(0.0, 1.0 - math.fsum(parts))
        total.append(outer * bracket)
    return _clamp(math.fsum(total))


def p_same_hidden(n: int, params: ProblemParams, exact: bool = False):
    """Estimator 1 - (1 - p_binom(n))**h for the probability that a
    shared-hidden trigger occurs at any of the h hidden values.

    A lower bound of the true union probability: the per-value misses are
    negatively associated, so the product form undershoots slightly.
    """
    _check_length(n)
    if params.h == 1:
        return p_binom(n, params, exact)
    p = p_binom(n, params, exact)
    if exact:
        return 1 - (1 - p) ** params.h
    return _clamp(1.0 - (1.0 - p) ** params.h)


def count_noncontaining(n: int, a: int, l: int) -> int:
    """Exact number of apparent strings of length n over a letters that do
    not contain a fixed apparent pattern of length l as a subsequence.

    Reduces to (n*n + n + 2) / 2 for a = 2, l = 3.
    """
    _check_length(n)
    if a < 1:
        raise InvalidInputError(f"a must be >= 1, got {a}")
    if l < 1:
        raise InvalidInputError(f"l must be >= 1, got {l}")
    return _miss_count(n, a, l)


def q_apparent(n: int, a: int, l: int, exact: bool = False):
    """Occurrence probability of an apparent pattern when hidden states are
    ignored; the same code path as p_binom with h = 1."""
    return p_binom(n, ProblemParams(a, 1, l), exact)
