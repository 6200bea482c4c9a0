"""Tame index sets on a finite window of a family of series.

Level 0 keeps the positions where series 0 is nonnegative. Level ``l``
splits the previous set by the sign of series ``l`` and keeps one side. After
each level the next threshold is the first index at which series 0 summed
over the current set, past the previous threshold, reaches 1. The union of
the level sets between consecutive thresholds is then sign-homogeneous for
every series used, from that series' threshold on, and its series-0 partial
sums climb by at least 1 per level.

Which side to keep should be one on which series 0 still diverges. On a
finite window that is not decidable, so the side with the larger remaining
positive part of series 0 is kept (ties to the nonnegative side). The sides
are recorded and can be replayed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .series import SeriesSpec, term


class TameError(ValueError):
    pass


@dataclass
class TruncatedSeriesFamily:
    terms: list[list[Fraction]]  # terms[i][k-1] is a^i_k

    def __post_init__(self):
        if not self.terms:
            raise TameError("family must contain at least one series")
        if len({len(r) for r in self.terms}) != 1:
            raise TameError("all series must have the same truncation length")

    @property
    def count(self) -> int:
        return len(self.terms)

    @property
    def N(self) -> int:
        return len(self.terms[0])

    def a(self, i: int, k: int) -> Fraction:
        return self.terms[i][k - 1]

    @classmethod
    def from_spec(cls, spec: SeriesSpec, N: int | None = None) -> "TruncatedSeriesFamily":
        """Series ``1..2n`` of the spec become series ``0..2n-1``."""
        N = spec.length if N is None else N
        if not 1 <= N <= spec.length:
            raise TameError(f"truncation must be in 1..{spec.length}")
        return cls([[term(spec, i, k) for k in range(1, N + 1)]
                    for i in range(1, spec.count + 1)])

    def to_json(self) -> dict:
        return {"count": self.count, "N": self.N,
                "terms": [[str(x) for x in row] for row in self.terms]}

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedSeriesFamily":
        try:
            fam = cls([[Fraction(x) for x in row] for row in data["terms"]])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise TameError(f"malformed series JSON: {exc}") from exc
        if "N" in data and int(data["N"]) != fam.N:
            raise TameError("N does not match the term rows")
        if "count" in data and int(data["count"]) != fam.count:
            raise TameError("count does not match the number of rows")
        return fam


def alternating_harmonic(N: int) -> TruncatedSeriesFamily:
    """The single series ``(-1)^(k+1) / k``."""
    return TruncatedSeriesFamily([[Fraction(1 if k % 2 else -1, k)
                                   for k in range(1, N + 1)]])


@dataclass
class TameChainCertificate:
    N: int
    depth: int
    C: list[list[int]]  # C[l], sorted indices
    thresholds: list[int]  # k_0 = 0, k_1, ..., one past each achieved level
    level_sums: list[Fraction]  # series 0 over C[l] in (k_l, k_{l+1}]
    sides: list[str]  # "ge" / "lt" per level >= 1, "none" past the last series

    @property
    def achieved(self) -> int:
        """Number of levels whose threshold was found."""
        return len(self.thresholds) - 1

    @property
    def complete(self) -> bool:
        return self.achieved == self.depth + 1

    def to_json(self) -> dict:
        return {"N": self.N, "depth": self.depth,
                "achieved_levels": self.achieved, "partial": not self.complete,
                "thresholds": self.thresholds,
                "level_sums": [str(s) for s in self.level_sums],
                "sides": self.sides,
                "C": [_runs(c) for c in self.C]}


def _runs(indices: Sequence[int]) -> list[list[int]]:
    """Sorted indices as inclusive ``[start, end]`` runs."""
    out: list[list[int]] = []
    for k in indices:
        if out and out[-1][1] == k - 1:
            out[-1][1] = k
        else:
            out.append([k, k])
    return out


def _positive_part(fam: TruncatedSeriesFamily, idx: Iterable[int], after: int) -> Fraction:
    return sum((fam.a(0, k) for k in idx if k > after and fam.a(0, k) > 0),
               Fraction(0))


def _next_threshold(fam: TruncatedSeriesFamily, C: Sequence[int],
                    after: int) -> tuple[int, Fraction] | None:
    acc = Fraction(0)
    for k in C:
        if k <= after:
            continue
        acc += fam.a(0, k)
        if acc >= 1:
            return k, acc
    return None


def build_tame_chain(fam: TruncatedSeriesFamily, depth: int,
                     sides: Sequence[str] | None = None) -> TameChainCertificate:
    """Run levels ``0..depth``; stop early when the window runs out.

    ``sides[l-1]`` forces the side kept at level ``l`` (``"ge"`` or
    ``"lt"``); missing entries fall back to the surrogate rule.
    """
    if depth < 0:
        raise TameError("depth must be >= 0")
    sides = list(sides or [])
    if any(s not in ("ge", "lt", "none") for s in sides):
        raise TameError("sides must be 'ge', 'lt' or 'none'")
    N = fam.N
    C = [k for k in range(1, N + 1) if fam.a(0, k) >= 0]
    cert = TameChainCertificate(N, depth, [C], [0], [], [])
    hit = _next_threshold(fam, C, 0)
    if hit is None:
        return cert
    cert.thresholds.append(hit[0])
    cert.level_sums.append(hit[1])
    for level in range(1, depth + 1):
        prev = cert.C[-1]
        k_l = cert.thresholds[-1]
        if level < fam.count:
            ge = [k for k in prev if fam.a(level, k) >= 0]
            lt = [k for k in prev if fam.a(level, k) < 0]
            if level - 1 < len(sides) and sides[level - 1] != "none":
                side = sides[level - 1]
            else:
                side = "ge" if _positive_part(fam, ge, k_l) >= \
                    _positive_part(fam, lt, k_l) else "lt"
            C = ge if side == "ge" else lt
        else:
            side, C = "none", prev
        cert.C.append(C)
        cert.sides.append(side)
        hit = _next_threshold(fam, C, k_l)
        if hit is None:
            break
        cert.thresholds.append(hit[0])
        cert.level_sums.append(hit[1])
    return cert


def assemble_A(cert: TameChainCertificate) -> list[int]:
    """Union over achieved levels of ``C_l`` restricted to ``(k_l, k_{l+1}]``."""
    out = []
    for l in range(cert.achieved):
        lo, hi = cert.thresholds[l], cert.thresholds[l + 1]
        out.extend(k for k in cert.C[l] if lo < k <= hi)
    return sorted(out)


def combine_tails(sets: Sequence[Iterable[int]], cutoffs: Sequence[int],
                  N: int | None = None) -> list[int]:
    """Union of ``A_k`` restricted to ``[M_k, N]``."""
    if len(sets) != len(cutoffs):
        raise TameError("sets and cutoffs must have the same length")
    out: set[int] = set()
    for A, M in zip(sets, cutoffs):
        out.update(k for k in A if k >= M and (N is None or k <= N))
    return sorted(out)


@dataclass
class CertificateCheck:
    nested: bool
    sums_ok: bool
    homogeneous: bool
    partial_sums: list[Fraction] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.nested and self.sums_ok and self.homogeneous


def verify_certificate(fam: TruncatedSeriesFamily,
                       cert: TameChainCertificate) -> CertificateCheck:
    """Recheck a certificate from the raw terms.

    Checks nesting of the C sets, that series 0 over ``A`` reaches ``l+1`` by
    ``k_{l+1}``, and that for each series ``i`` used by an achieved level the
    terms of ``A`` past ``k_i`` never take both signs.
    """
    nested = all(set(cert.C[l + 1]) <= set(cert.C[l])
                 for l in range(len(cert.C) - 1))
    A = assemble_A(cert)
    partial = []
    sums_ok = True
    for l in range(1, cert.achieved + 1):
        s = sum((fam.a(0, k) for k in A if k <= cert.thresholds[l]), Fraction(0))
        partial.append(s)
        sums_ok &= s >= l
    homogeneous = True
    for i in range(min(cert.achieved, fam.count)):
        signs = {(fam.a(i, k) > 0) - (fam.a(i, k) < 0)
                 for k in A if k > cert.thresholds[i]}
        homogeneous &= not {1, -1} <= signs
    return CertificateCheck(nested, sums_ok, homogeneous, partial)


def dumps(cert: TameChainCertificate) -> str:
    return json.dumps(cert.to_json())
