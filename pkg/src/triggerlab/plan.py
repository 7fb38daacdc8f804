"""Window-length and data-size planning.

``min_window`` inverts the monotone occurrence probabilities: the
smallest window length whose containment probability reaches a given
confidence.

``data_plan`` sizes an elimination experiment. G is the probability that
one positive window fails to rule out a fixed false candidate (because
it contains the candidate by chance), m the number of windows needed to
push that survival below alpha, and r the number of repeated runs that
cover all F = a**l - 1 false candidates; total = m * r is an upper bound
by construction (a window is only credited with eliminating one
candidate). Boundaries use the strict inequality base**m < alpha, with
alpha taken at its exact decimal value and the comparison done in
rational arithmetic when the integers stay manageable, otherwise at
60-digit precision with an explicit margin check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

import mpmath

from .core import ProblemParams
from .errors import (
    InstanceTooLargeError,
    InvalidInputError,
    PrecisionError,
    UnreachableTargetError,
)
from .prob import count_noncontaining, p_binom, p_same_hidden, q_apparent

__all__ = ["DataPlan", "WindowMode", "min_window", "data_plan", "difficulty_curve"]

WINDOW_MODES = ("particular", "same-hidden", "apparent")
WindowMode = str

# Above this bit size the exact power comparison falls back to mpmath.
_EXACT_BITS_LIMIT = 8_000_000
_MPMATH_DPS = 60
_MPMATH_MARGIN = mpmath.mpf("1e-40")


@dataclass(frozen=True)
class DataPlan:
    """Output of the data-size pipeline; g_exact is the rational G."""

    alpha: float
    window: int
    g: float
    m: int
    r: int
    total: int
    false_candidates: int
    g_exact: Fraction | None = None


def window_probability(n: int, params: ProblemParams, mode: WindowMode) -> float:
    if mode == "particular":
        return p_binom(n, params)
    if mode == "same-hidden":
        return p_same_hidden(n, params)
    if mode == "apparent":
        return q_apparent(n, params.a, params.l)
    raise InvalidInputError(f"mode must be one of {WINDOW_MODES}, got {mode!r}")


def min_window(confidence: float, params: ProblemParams, mode: WindowMode) -> int:
    """Smallest n with containment probability >= confidence for the mode.

    Exponential doubling followed by binary search, both leaning on the
    monotonicity of the probability in n.
    """
    if not (0.0 < confidence <= 1.0):
        raise InvalidInputError(f"confidence must be in (0, 1), got {confidence!r}")
    prob = lambda n: window_probability(n, params, mode)
    if confidence == 1.0:
        # Reachable only in the degenerate single-symbol alphabets.
        if prob(params.l) >= 1.0:
            return params.l
        raise UnreachableTargetError("confidence 1.0 is unreachable for a*h >= 2")
    lo = params.l - 1  # probability is 0 below the trigger length
    hi = params.l
    while prob(hi) < confidence:
        lo = hi
        hi *= 2
        if hi > 1 << 62:
            raise InstanceTooLargeError("window search exceeded 2**62")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if prob(mid) >= confidence:
            hi = mid
        else:
            lo = mid
    return hi


def _alpha_fraction(alpha) -> Fraction:
    """Exact value of alpha; floats are taken at their decimal rendering."""
    if isinstance(alpha, Fraction):
        frac = alpha
    elif isinstance(alpha, int):
        frac = Fraction(alpha)
    elif isinstance(alpha, float):
        frac = Fraction(Decimal(repr(alpha)))
    elif isinstance(alpha, str):
        frac = Fraction(Decimal(alpha))
    else:
        raise InvalidInputError(f"cannot interpret alpha {alpha!r}")
    if not (0 < frac < 1):
        raise InvalidInputError(f"alpha must be in (0, 1), got {alpha!r}")
    return frac


def _pow_lt(base: Fraction, e: int, alpha: Fraction) -> bool:
    """Decide base**e < alpha rigorously for 0 < base < 1, e >= 0."""
    if e == 0:
        return 1 < alpha
    bits = e * max(base.numerator.bit_length(), base.denominator.bit_length())
    if bits <= _EXACT_BITS_LIMIT:
        return (
            alpha.denominator * base.numerator**e
            < alpha.numerator * base.denominator**e
        )
    with mpmath.workdps(_MPMATH_DPS):
        diff = e * (mpmath.log(base.numerator) - mpmath.log(base.denominator)) - (
            mpmath.log(alpha.numerator) - mpmath.log(alpha.denominator)
        )
        if abs(diff) <= _MPMATH_MARGIN:
            raise PrecisionError(
                f"base**{e} vs alpha is too close to decide at {_MPMATH_DPS} digits"
            )
        return diff < 0


def _min_exponent(base: Fraction, alpha: Fraction) -> int:
    """Smallest integer e >= 1 with base**e < alpha (strict)."""
    if not (0 < base < 1):
        raise InvalidInputError(f"base must be in (0, 1), got {base}")
    num, den = base.numerator, base.denominator
    an, ad = alpha.numerator, alpha.denominator
    with mpmath.workdps(_MPMATH_DPS):
        est = mpmath.log(mpmath.mpf(an) / ad) / (
            mpmath.log(mpmath.mpf(num)) - mpmath.log(mpmath.mpf(den))
        )
        start = max(1, int(mpmath.floor(est)) - 2)
    bits = (start + 4) * max(num.bit_length(), den.bit_length())
    if bits <= _EXACT_BITS_LIMIT:
        # Exact integer scan; powers are maintained incrementally so the
        # big exponentiation happens once.
        e = start
        pn, pd = num**e, den**e
        while not ad * pn < an * pd:
            e += 1
            pn *= num
            pd *= den
        while e > 1:
            qn, qd = pn // num, pd // den
            if ad * qn < an * qd:
                e, pn, pd = e - 1, qn, qd
            else:
                break
        return e
    e = start
    while not _pow_lt(base, e, alpha):
        e += 1
    while e > 1 and _pow_lt(base, e - 1, alpha):
        e -= 1
    return e


def data_plan(alpha, window: int, a: int, l: int) -> DataPlan:
    """Sequences needed to eliminate all false candidates at risk alpha.

    G is computed as an exact rational from the noncontaining count, and
    the m and r boundaries satisfy base**m < alpha <= base**(m-1).
    """
    alpha_frac = _alpha_fraction(alpha)
    if a < 1 or l < 1:
        raise InvalidInputError(f"a and l must be >= 1, got a={a} l={l}")
    if window < l:
        raise InvalidInputError(f"window {window} is shorter than the trigger length {l}")
    if a**l < 2:
        raise InvalidInputError("a**l must be at least 2 for elimination to mean anything")
    false_candidates = a**l - 1
    if false_candidates < 2:
        raise InvalidInputError(
            "the repetition step needs at least two false candidates (a**l >= 3)"
        )
    g = 1 - Fraction(count_noncontaining(window, a, l), a**window)
    m = _min_exponent(g, alpha_frac)
    r = _min_exponent(Fraction(false_candidates - 1, false_candidates), alpha_frac)
    return DataPlan(
        alpha=float(alpha_frac),
        window=window,
        g=float(g),
        m=m,
        r=r,
        total=m * r,
        false_candidates=false_candidates,
        g_exact=g,
    )


def difficulty_curve(a_values, window: int = 50, h: int = 4, l: int = 3, alpha=0.05):
    """data_plan applied per apparent-alphabet size at a fixed window.

    Returns (a, DataPlan) pairs. h does not enter the arithmetic (the
    pipeline works on apparent sequences) and is carried for labelling
    only. Note the totals shrink as a grows at fixed n: windows saturate
    far less, so each positive window eliminates candidates far more
    often, which outweighs the growing candidate count.
    """
    rows = []
    for a in a_values:
        if a < 2:
            raise InvalidInputError(f"difficulty curve needs a >= 2, got {a}")
        rows.append((a, data_plan(alpha, window, a, l)))
    return rows
