"""Exact verification of the counting identities and the H(n)/I(n) tables.

Everything combinatorial is done in ``fractions.Fraction``. Real-valued
bounds (logarithms, Euler's constant) are evaluated with ``mpmath.iv``
outward-rounded intervals, so a reported "holds" is a sound verdict.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from mpmath import iv, mpf

from .hypergraph import Hypergraph, degree_profile, is_economical, max_partition

EULER_GAMMA = "0.577215664901532860606512090082"
IV_PREC = 128


class PreconditionError(ValueError):
    pass


def k_sequence(nmax: int) -> list[int]:
    """``[k_1, ..., k_nmax]`` with ``k_n = n//2 + k_{n//2} + k_{(n+1)//2}``."""
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    k = [0, 1]
    for n in range(2, nmax + 1):
        k.append(n // 2 + k[n // 2] + k[(n + 1) // 2])
    return k[1:]


@lru_cache(maxsize=None)
def k_of(n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 1
    return n // 2 + k_of(n // 2) + k_of((n + 1) // 2)


def upper_bound_H(n: int) -> Fraction:
    if n < 1:
        raise ValueError("n must be >= 1")
    return sum((Fraction(n, k) for k in range(1, n + 1)), Fraction(0))


def ineq_j_lhs(m: dict[int, int], n: int, j: int) -> int:
    return sum(m.get(k, 0) * comb(n - k, j - k + 1) for k in range(1, j + 2))


def ineq_j_audit(h: Hypergraph, n: int, j: int,
                 check_partitions: bool = True) -> tuple[int, int, bool]:
    """Evaluate the degree inequality for one ``j``.

    Returns ``(lhs, rhs, holds)`` with
    ``lhs = sum_{k<=j+1} m_k C(n-k, j-k+1)`` and ``rhs = n C(n, j)``.
    """
    if not 0 <= j < n:
        raise PreconditionError(f"need 0 <= j < n, got j={j}, n={n}")
    if not is_economical(h):
        raise PreconditionError("hypergraph is not economical")
    if check_partitions and max_partition(h)[0] > n:
        raise PreconditionError(f"hypergraph has a partition larger than {n}")
    m = degree_profile(h).m
    lhs = ineq_j_lhs(m, n, j)
    rhs = n * comb(n, j)
    return lhs, rhs, lhs <= rhs


def aggregation_identity(m: dict[int, int], n: int) -> tuple[Fraction, Fraction]:
    """Both sides of sum_j lhs_j / C(n-1, j) = sum_k n m_k / k."""
    left = sum((Fraction(ineq_j_lhs(m, n, j), comb(n - 1, j)) for j in range(n)),
               Fraction(0))
    right = sum((Fraction(n * mk, k) for k, mk in m.items() if 1 <= k <= n),
                Fraction(0))
    return left, right


def identity_ddagger(n: int, k: int) -> tuple[Fraction, Fraction, bool]:
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    lhs = sum((Fraction(comb(n - k, j - k + 1), comb(n - 1, j))
               for j in range(k - 1, n)), Fraction(0))
    rhs = Fraction(n, k)
    return lhs, rhs, lhs == rhs


def hockey_stick(m: int, r: int) -> bool:
    if not 0 <= r <= m:
        raise ValueError("need 0 <= r <= m")
    return sum(comb(j, r) for j in range(r, m + 1)) == comb(m + 1, r + 1)


def trinomial_revision(m: int, r: int, s: int) -> bool:
    if not 0 <= s <= r <= m:
        raise ValueError("need 0 <= s <= r <= m")
    return comb(m, r) * comb(r, s) == comb(m, s) * comb(m - s, r - s)


# -- real-valued bounds -----------------------------------------------------

@contextmanager
def _iv_precision(bits: int = IV_PREC):
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def f_lower_iv(x):
    """Interval enclosure of (x log2 x - x + 1) / 2."""
    with _iv_precision():
        x = iv.mpf(x)
        return (x * iv.log(x) / iv.log(2) - x + 1) / 2


def f_float(x: float) -> float:
    return 0.5 * (x * math.log2(x) - x + 1) if x > 0 else 0.5


# for x <= 2^21 the float evaluation of f is accurate to well under 1e-7
_FLOAT_MARGIN = 1e-6


def _less_than_int(x: int, bound: int, shift: float = 0.0) -> bool:
    """Sound test of f(x) + shift < bound."""
    approx = f_float(x) + shift
    if bound - approx > _FLOAT_MARGIN and x <= 1 << 21:
        return True
    with _iv_precision():
        enc = f_lower_iv(x) + shift
        return bool(enc.b < bound)


@dataclass
class LowerBoundReport:
    nmax: int
    f_below_k: bool
    first_failure: int | None
    convexity_samples: int
    convexity_ok: bool
    k_above_shifted: bool
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.f_below_k and self.convexity_ok and self.k_above_shifted


def lower_bound_audit(nmax: int, convexity_samples: int = 2000) -> LowerBoundReport:
    """Check f(n) < k_n, midpoint convexity of f, and the shifted bound.

    The shifted bound is ``k_n > (n-1) log2(n-1) / 2 - n/2 + 2`` for n >= 2,
    i.e. ``f(n-1) + 1 < k_n``.
    """
    if nmax < 2:
        raise ValueError("nmax must be >= 2")
    ks = k_sequence(nmax)
    failures = []
    first = None
    for n in range(1, nmax + 1):
        if not _less_than_int(n, ks[n - 1]):
            failures.append(("f<k", n))
            first = first if first is not None else n
    shifted_ok = True
    for n in range(2, nmax + 1):
        if not _less_than_int(n - 1, ks[n - 1], 1.0):
            shifted_ok = False
            failures.append(("shifted", n))
    conv_ok = True
    with _iv_precision():
        for i in range(convexity_samples):
            # x spread over (0, nmax], including small fractional points
            x = mpf(nmax) * (i + 1) / convexity_samples if i % 2 else mpf(i + 1) / 64
            mid = f_lower_iv(iv.mpf(x) + iv.mpf(0.5))
            avg = (f_lower_iv(x) + f_lower_iv(iv.mpf(x) + 1)) / 2
            if not mid.a <= avg.b:
                conv_ok = False
                failures.append(("convexity", float(x)))
    return LowerBoundReport(nmax, first is None, first, convexity_samples,
                            conv_ok, shifted_ok, failures)


def harmonic_bound_check(nmax: int) -> tuple[bool, int | None]:
    """Check sum_{k<=n} n/k < n ln n + gamma n + 1/2 for 1 <= n <= nmax."""
    with _iv_precision():
        gamma = iv.mpf(EULER_GAMMA)
        # widen by the truncation of the stored digits
        gamma = iv.mpf([gamma.a - mpf("1e-30"), gamma.b + mpf("1e-30")])
        h = iv.mpf(0)
        for n in range(1, nmax + 1):
            h += iv.mpf(1) / n
            left = h * n
            right = n * iv.log(n) + gamma * n + iv.mpf(0.5)
            if not left.b < right.a:
                return False, n
    return True, None


# -- tables -----------------------------------------------------------------

@dataclass
class BoundsRow:
    n: int
    k_n: int
    lower_f: float
    upper_H: Fraction
    H_lo: int
    H_hi: int
    I_next_lo: int
    I_next_hi: int
    H_quadratic: int
    I_next_quadratic: int
    H_log_upper: float
    I_next_log_upper: float
    I_next_log_lower: float
    H_exact_source: str = "bounds"

    @property
    def H_exact(self) -> bool:
        return self.H_lo == self.H_hi

    @property
    def I_next_exact(self) -> bool:
        return self.I_next_lo == self.I_next_hi

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k_n": self.k_n,
            "lower_f": self.lower_f,
            "upper_H": [self.upper_H.numerator, self.upper_H.denominator],
            "H": [self.H_lo, self.H_hi],
            "H_exact": self.H_exact,
            "H_source": self.H_exact_source,
            "I_next": [self.I_next_lo, self.I_next_hi],
            "I_next_exact": self.I_next_exact,
            "H_quadratic": self.H_quadratic,
            "I_next_quadratic": self.I_next_quadratic,
            "H_log_upper": self.H_log_upper,
            "I_next_log_upper": self.I_next_log_upper,
            "I_next_log_lower": self.I_next_log_lower,
        }


def _I_log_upper(n: int) -> float:
    g = float(EULER_GAMMA)
    return n * math.log(n) + g * n - math.log(n) + 1.5 - g


def _I_log_lower(n: int) -> float:
    return (0.5 * n * math.log2(n) - 0.5 * n - 0.5 * math.log2(n)
            + (math.log(16) - 1) / math.log(4))


def derive_tables(nmax: int, exact_H: dict[int, int] | None = None) -> list[BoundsRow]:
    """Bounds on H(n) and I(n+1) for 1 <= n <= nmax.

    ``exact_H`` maps n to proved-optimal solver values; they replace the
    interval for H(n) and tighten I(n+1) <= H(n) + 1.
    """
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    exact_H = exact_H or {}
    ks = k_sequence(nmax)
    rows = []
    g = float(EULER_GAMMA)
    for n in range(1, nmax + 1):
        k = ks[n - 1]
        ub = upper_bound_H(n)
        lo, hi = k, math.floor(ub)
        source = "bounds"
        if n in exact_H:
            v = exact_H[n]
            if not lo <= v <= hi:
                raise ValueError(f"solver value H({n})={v} outside [{lo}, {hi}]")
            lo = hi = v
            source = "solver"
        rows.append(BoundsRow(
            n=n, k_n=k, lower_f=f_float(n), upper_H=ub,
            H_lo=lo, H_hi=hi,
            I_next_lo=k + 1, I_next_hi=hi + 1,
            H_quadratic=n * n,
            I_next_quadratic=(n + 1) ** 2 - 2 * (n + 1) + 2,
            H_log_upper=n * math.log(n) + g * n + 0.5,
            I_next_log_upper=_I_log_upper(n + 1),
            I_next_log_lower=_I_log_lower(n + 1),
            H_exact_source=source,
        ))
    return rows


def I_values(rows: list[BoundsRow]) -> dict[int, tuple[int, int]]:
    """Intervals for I(1), I(2), ... read off the table (I(1) = 1)."""
    out = {1: (1, 1)}
    for r in rows:
        out[r.n + 1] = (r.I_next_lo, r.I_next_hi)
    return out
