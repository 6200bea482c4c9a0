"""The 2n-series construction, evaluated exactly on per-block aggregates.

The index set is cut into adjacent blocks ``I_1, I_2, ...`` of even lengths
``b_m``, so every block starts at an odd index. On block ``m`` let ``j`` be
the residue of ``m`` mod ``n`` taken in ``1..n``. Then, at odd/even ``k``:

    series i <= n, i != j :  +1/m  / -1/m
    series j              :  -1/m  / +1/m
    series n+j            :  +1/b_m / -1/b_m
    series n+i, i != j    :  0

Inside a block a term depends only on the parity of ``k``, so a selection
``A`` is described on block ``m`` by how many odd and even positions it takes,
``(o_m, e_m)``, and ``Delta(m) = o_m - e_m`` fixes every block sum.
"""

from __future__ import annotations

import bisect
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class SeriesSpec:
    n: int
    b: tuple[int, ...]

    def __post_init__(self):
        if self.n < 2:
            raise SeriesError("n must be >= 2")
        if not self.b:
            raise SeriesError("need at least one block")
        if any(x <= 0 or x % 2 for x in self.b):
            raise SeriesError("block lengths must be positive and even")

    @property
    def M(self) -> int:
        return len(self.b)

    @property
    def count(self) -> int:
        return 2 * self.n

    @property
    def starts(self) -> tuple[int, ...]:
        out, s = [], 1
        for x in self.b:
            out.append(s)
            s += x
        return tuple(out)

    @property
    def length(self) -> int:
        return sum(self.b)

    def residue(self, m: int) -> int:
        return (m - 1) % self.n + 1

    def block_of(self, k: int) -> int:
        if not 1 <= k <= self.length:
            raise SeriesError(f"index {k} is outside the generated blocks")
        return bisect.bisect_right(self.starts, k)

    def prior_total(self, m: int) -> int:
        """``b_1 + ... + b_{m-1}``."""
        return sum(self.b[:m - 1])

    def to_json(self) -> dict:
        return {"n": self.n, "b": [str(x) for x in self.b]}


def build_spec(n: int, M: int) -> SeriesSpec:
    """Smallest admissible lengths: b_1 = 2, b_{m+1} the least even number
    at least ``m^3 (b_1 + ... + b_m)``."""
    if M < 1:
        raise SeriesError("M must be >= 1")
    b = [2]
    for m in range(1, M):
        need = m ** 3 * sum(b)
        b.append(need + need % 2)
    return SeriesSpec(n, tuple(b))


def term(spec: SeriesSpec, i: int, k: int) -> Fraction:
    if not 1 <= i <= spec.count:
        raise SeriesError(f"series index {i} outside 1..{spec.count}")
    m = spec.block_of(k)
    j = spec.residue(m)
    odd = k % 2 == 1
    if i <= spec.n:
        sign = 1 if odd else -1
        if i == j:
            sign = -sign
        return Fraction(sign, m)
    if i == spec.n + j:
        return Fraction(1 if odd else -1, spec.b[m - 1])
    return Fraction(0)


@dataclass(frozen=True)
class BlockPattern:
    counts: tuple[tuple[int, int], ...]  # (odd picks, even picks) per block

    def delta(self, m: int) -> int:
        o, e = self.counts[m - 1]
        return o - e

    def check(self, spec: SeriesSpec) -> None:
        if len(self.counts) != spec.M:
            raise SeriesError(f"pattern has {len(self.counts)} blocks, spec has {spec.M}")
        for m, (o, e) in enumerate(self.counts, start=1):
            half = spec.b[m - 1] // 2
            if not (0 <= o <= half and 0 <= e <= half):
                raise SeriesError(f"block {m}: counts ({o}, {e}) exceed capacity {half}")

    def to_json(self) -> dict:
        return {"counts": [[str(o), str(e)] for o, e in self.counts]}

    @classmethod
    def from_json(cls, data: dict) -> "BlockPattern":
        return cls(tuple((int(o), int(e)) for o, e in data["counts"]))


def empty_pattern(spec: SeriesSpec) -> BlockPattern:
    return BlockPattern(tuple((0, 0) for _ in spec.b))


def demo_pattern(spec: SeriesSpec, residue: int = 1) -> BlockPattern:
    """Every odd position of the blocks congruent to ``residue``, nothing else."""
    return BlockPattern(tuple(
        (x // 2, 0) if spec.residue(m) == residue else (0, 0)
        for m, x in enumerate(spec.b, start=1)))


def random_pattern(spec: SeriesSpec, rng: random.Random) -> BlockPattern:
    """Per block, one of: uniform counts, all odds, all evens, empty, or a
    near-balanced pick. Mixing extremes in makes the large-imbalance case
    frequent."""
    out = []
    for x in spec.b:
        half = x // 2
        kind = rng.randrange(5)
        if kind == 0:
            out.append((rng.randint(0, half), rng.randint(0, half)))
        elif kind == 1:
            out.append((half, rng.randint(0, half // 8)))
        elif kind == 2:
            out.append((rng.randint(0, half // 8), half))
        elif kind == 3:
            out.append((0, 0))
        else:
            o = rng.randint(0, half)
            out.append((o, max(0, min(half, o + rng.randint(-1, 1)))))
    return BlockPattern(tuple(out))


def random_patterns(spec: SeriesSpec, count: int, seed: int) -> list[BlockPattern]:
    rng = random.Random(seed)
    return [random_pattern(spec, rng) for _ in range(count)]


def pattern_of_indices(spec: SeriesSpec, indices: Iterable[int]) -> BlockPattern:
    counts = [[0, 0] for _ in spec.b]
    for k in set(indices):
        m = spec.block_of(k)
        counts[m - 1][0 if k % 2 else 1] += 1
    return BlockPattern(tuple((o, e) for o, e in counts))


# -- evaluation -------------------------------------------------------------

def block_contribution(spec: SeriesSpec, pattern: BlockPattern, i: int,
                       m: int) -> Fraction:
    j = spec.residue(m)
    d = pattern.delta(m)
    if i <= spec.n:
        return Fraction(-d if i == j else d, m)
    if i == spec.n + j:
        return Fraction(d, spec.b[m - 1])
    return Fraction(0)


@dataclass
class BoundaryReport:
    spec: SeriesSpec
    sums: list[list[Fraction]]  # sums[i-1][m-1]: series i after block m

    def at(self, i: int, m: int) -> Fraction:
        """Partial sum of series ``i`` over the selection through block ``m``
        (``m = 0`` is the empty prefix)."""
        return self.sums[i - 1][m - 1] if m else Fraction(0)

    def rows(self) -> list[dict]:
        out = []
        for i, row in enumerate(self.sums, start=1):
            for m, s in enumerate(row, start=1):
                out.append({"block": m, "series": i,
                            "sum_num": s.numerator, "sum_den": s.denominator})
        return out


def boundary_sums(spec: SeriesSpec, pattern: BlockPattern) -> BoundaryReport:
    pattern.check(spec)
    sums = []
    for i in range(1, spec.count + 1):
        acc = Fraction(0)
        row = []
        for m in range(1, spec.M + 1):
            acc += block_contribution(spec, pattern, i, m)
            row.append(acc)
        sums.append(row)
    return BoundaryReport(spec, sums)


def explicit_sums(spec: SeriesSpec, indices: Iterable[int],
                  blocks: int) -> list[list[Fraction]]:
    """Term-by-term partial sums at the end of blocks ``1..blocks``."""
    if blocks > spec.M:
        raise SeriesError("more blocks requested than generated")
    chosen = sorted(set(indices))
    ends = [s + x - 1 for s, x in zip(spec.starts, spec.b)][:blocks]
    out = []
    for i in range(1, spec.count + 1):
        acc, row, pos = Fraction(0), [], 0
        for end in ends:
            while pos < len(chosen) and chosen[pos] <= end:
                acc += term(spec, i, chosen[pos])
                pos += 1
            row.append(acc)
        out.append(row)
    return out


def indices_for(spec: SeriesSpec, pattern: BlockPattern, blocks: int) -> list[int]:
    """The first ``o_m`` odd and first ``e_m`` even positions of each block."""
    out = []
    for m in range(1, blocks + 1):
        start, o, e = spec.starts[m - 1], *pattern.counts[m - 1]
        out.extend(start + 2 * t for t in range(o))
        out.extend(start + 1 + 2 * t for t in range(e))
    return out


# -- the claim --------------------------------------------------------------

@dataclass
class Trigger:
    block: int
    series: int  # the residue i of the block
    delta: int
    direction: str  # "up" for Delta > threshold, "down" for the mirror case
    sum_i: Fraction
    others_ok: bool
    ok: bool


@dataclass
class ClaimReport:
    triggers: list[Trigger] = field(default_factory=list)
    prior_violations: list[tuple[int, int]] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(not t.ok for t in self.triggers) + len(self.prior_violations)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def claim_audit(spec: SeriesSpec, pattern: BlockPattern,
                report: BoundaryReport | None = None) -> ClaimReport:
    """Finite sign consequences of a large imbalance on a block.

    On block ``m`` with residue ``i`` and ``Delta(m) > m (b_1 + ... +
    b_{m-1})`` the partial sum of series ``i`` at the end of the block is
    negative and every other series ``j <= n`` is positive. The mirrored
    case ``Delta(m) < -m (...)`` flips both signs. Also checked for every
    ``m >= 2`` and ``i <= n``: the sum before block ``m`` is smaller in
    absolute value than ``b_1 + ... + b_{m-1}`` (for ``m = 1`` both sides
    are 0, so the strict form is skipped).
    """
    report = report or boundary_sums(spec, pattern)
    out = ClaimReport()
    for m in range(1, spec.M + 1):
        prior = spec.prior_total(m)
        if m >= 2:
            for i in range(1, spec.n + 1):
                if not abs(report.at(i, m - 1)) < prior:
                    out.prior_violations.append((m, i))
        d = pattern.delta(m)
        threshold = m * prior
        if abs(d) <= threshold:
            continue
        i = spec.residue(m)
        sgn = 1 if d > 0 else -1
        s_i = report.at(i, m)
        others = all(sgn * report.at(j, m) > 0
                     for j in range(1, spec.n + 1) if j != i)
        own = sgn * s_i < 0
        out.triggers.append(Trigger(m, i, d, "up" if sgn > 0 else "down",
                                    s_i, others, own and others))
    return out


# -- finite verdicts --------------------------------------------------------

@dataclass
class SeriesVerdict:
    series: int
    trend: str
    positive_part: Fraction
    negative_part: Fraction

    def to_json(self) -> dict:
        return {"series": self.series, "verdict": self.trend,
                "positive_part": str(self.positive_part),
                "negative_part": str(self.negative_part)}


def _trend(steps: list[Fraction]) -> str:
    if all(s == 0 for s in steps):
        return "flat"
    if all(s >= 0 for s in steps):
        return "rising"
    if all(s <= 0 for s in steps):
        return "falling"
    return "oscillating"


def _parts(spec: SeriesSpec, pattern: BlockPattern, i: int) -> tuple[Fraction, Fraction]:
    pos = neg = Fraction(0)
    for m in range(1, spec.M + 1):
        o, e = pattern.counts[m - 1]
        j = spec.residue(m)
        if i <= spec.n:
            unit = Fraction(1, m)
            up, down = (e, o) if i == j else (o, e)
        elif i == spec.n + j:
            unit = Fraction(1, spec.b[m - 1])
            up, down = o, e
        else:
            continue
        pos += up * unit
        neg -= down * unit
    return pos, neg


def classify_pattern(spec: SeriesSpec, pattern: BlockPattern) -> list[SeriesVerdict]:
    """Trend of each series over the last ceil(M/2) blocks, plus the exact
    positive and negative parts of the selected terms."""
    report = boundary_sums(spec, pattern)
    window = math.ceil(spec.M / 2)
    out = []
    for i in range(1, spec.count + 1):
        steps = [report.at(i, m) - report.at(i, m - 1)
                 for m in range(spec.M - window + 1, spec.M + 1)]
        pos, neg = _parts(spec, pattern, i)
        out.append(SeriesVerdict(i, _trend(steps), pos, neg))
    return out


def dumps(obj) -> str:
    return json.dumps(obj.to_json())
