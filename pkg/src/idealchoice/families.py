"""Families of partial sign functions on coordinates ``1..k``.

A function is a pair of bit masks ``(pos, neg)``: bit ``i-1`` of ``pos`` is
set when coordinate ``i`` maps to ``p``, likewise ``neg`` for ``n``. The two
masks are disjoint and their union is the domain.

For a subfamily G write ``P = OR of pos`` and ``N = OR of neg``. A
coordinate in the union of the domains is free of conflicts exactly when it
lies in one of ``P``, ``N`` but not both, so the conflict-free set is
``P ^ N``. Every predicate below reduces to that identity.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .hypergraph import Hypergraph, members

MAX_DAGGER_FAMILY = 25
_VECTOR_BITS = 16


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class PartialSignFunction:
    pos: int
    neg: int

    def __post_init__(self):
        if self.pos & self.neg:
            raise FamilyError("a coordinate cannot map to both p and n")

    @property
    def domain(self) -> int:
        return self.pos | self.neg

    @classmethod
    def from_dict(cls, d: dict) -> "PartialSignFunction":
        pos = neg = 0
        for key, val in d.items():
            i = int(key)
            if i < 1:
                raise FamilyError(f"coordinates are 1-based, got {key!r}")
            if val == "p":
                pos |= 1 << (i - 1)
            elif val == "n":
                neg |= 1 << (i - 1)
            else:
                raise FamilyError(f"sign must be 'p' or 'n', got {val!r}")
        return cls(pos, neg)

    def to_dict(self) -> dict[str, str]:
        out = {}
        for c in members(self.domain):
            out[str(c + 1)] = "p" if self.pos >> c & 1 else "n"
        return dict(sorted(out.items(), key=lambda kv: int(kv[0])))

    def __call__(self, coord: int) -> str | None:
        b = 1 << (coord - 1)
        if self.pos & b:
            return "p"
        if self.neg & b:
            return "n"
        return None


@dataclass
class Family:
    k: int
    functions: list[PartialSignFunction] = field(default_factory=list)

    def __post_init__(self):
        limit = (1 << self.k) - 1
        for f in self.functions:
            if f.domain & ~limit:
                raise FamilyError(f"function uses a coordinate beyond k={self.k}")

    def __len__(self) -> int:
        return len(self.functions)

    @property
    def duplicates(self) -> list[int]:
        seen, dup = set(), []
        for i, f in enumerate(self.functions):
            if f in seen:
                dup.append(i)
            seen.add(f)
        return dup

    def to_json(self) -> dict:
        return {"k": self.k, "functions": [f.to_dict() for f in self.functions]}

    @classmethod
    def from_json(cls, data: dict) -> "Family":
        try:
            k = int(data["k"])
            fs = [PartialSignFunction.from_dict(d) for d in data["functions"]]
        except (KeyError, TypeError, AttributeError) as exc:
            raise FamilyError(f"malformed family JSON: {exc}") from exc
        return cls(k, fs)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass(frozen=True)
class DaggerWitness:
    G: frozenset
    D: frozenset

    def to_json(self) -> dict:
        return {"G": sorted(self.G), "D": sorted(self.D)}


def _coords(mask: int) -> frozenset:
    return frozenset(c + 1 for c in members(mask))


def is_full(F: Family) -> bool:
    P = N = 0
    for f in F.functions:
        P |= f.pos
        N |= f.neg
    want = (1 << F.k) - 1
    return P == want and N == want


def conflict_free_coords(F: Family, G: Iterable[int]) -> frozenset:
    P = N = 0
    for i in G:
        if not 0 <= i < len(F.functions):
            raise FamilyError(f"function index {i} out of range")
        P |= F.functions[i].pos
        N |= F.functions[i].neg
    return _coords(P ^ N)


def _subset_or_table(masks: Sequence[int]) -> np.ndarray:
    """OR of masks over every subset of ``masks`` (index bit i = mask i)."""
    out = np.zeros(1 << len(masks), dtype=np.uint64)
    for i, m in enumerate(masks):
        half = 1 << i
        out[half:2 * half] = out[:half] | np.uint64(m)
    return out


def max_conflict_free(F: Family) -> tuple[int, int]:
    """Maximum ``|P ^ N|`` over all subfamilies, with the maximizing index code.

    The low ``_VECTOR_BITS`` functions are tabulated with numpy; the rest are
    enumerated in Python on top of that table.
    """
    fs = F.functions
    if len(fs) > MAX_DAGGER_FAMILY:
        raise FamilyError(
            f"family of {len(fs)} functions exceeds the exhaustive cap of "
            f"{MAX_DAGGER_FAMILY}")
    if F.k > 64:
        raise FamilyError("more than 64 coordinates is not supported")
    if not fs:
        return 0, 0
    lo = fs[:_VECTOR_BITS]
    hi = fs[_VECTOR_BITS:]
    P_lo = _subset_or_table([f.pos for f in lo])
    N_lo = _subset_or_table([f.neg for f in lo])
    best, best_code = -1, 0
    shift = len(lo)
    for code_hi in range(1 << len(hi)):
        p = n = 0
        for j, f in enumerate(hi):
            if code_hi >> j & 1:
                p |= f.pos
                n |= f.neg
        counts = np.bitwise_count((P_lo | np.uint64(p)) ^ (N_lo | np.uint64(n)))
        idx = int(np.argmax(counts))
        if int(counts[idx]) > best:
            best = int(counts[idx])
            best_code = idx | code_hi << shift
    return best, best_code


def _decode(code: int) -> frozenset:
    return frozenset(i for i in range(code.bit_length()) if code >> i & 1)


def dagger_holds(F: Family, n: int) -> tuple[bool, DaggerWitness | None]:
    """Is there a subfamily with at least ``n`` conflict-free coordinates?"""
    best, code = max_conflict_free(F)
    if best >= n:
        G = _decode(code)
        return True, DaggerWitness(G, conflict_free_coords(F, G))
    return False, None


def is_bounding(F: Family, n: int) -> bool:
    if not is_full(F):
        return False
    return not dagger_holds(F, n)[0]


def to_hypergraph(F: Family) -> Hypergraph:
    """Coordinates become vertices ``0..k-1``; edges are the distinct domains."""
    seen: list[int] = []
    for f in F.functions:
        d = f.domain
        if d and d not in seen:
            seen.append(d)
    return Hypergraph(F.k, tuple(seen))


# -- search for full families failing the dagger property -------------------

def _candidates(k: int, n: int) -> list[PartialSignFunction]:
    """Nonempty partial functions with fewer than ``n`` coordinates.

    A function whose domain has ``n`` or more coordinates already gives the
    dagger property on its own, so it can never occur in a bounding family.
    """
    out = []
    for size in range(1, min(n - 1, k) + 1):
        for dom in itertools.combinations(range(k), size):
            for signs in itertools.product((0, 1), repeat=size):
                pos = neg = 0
                for c, s in zip(dom, signs):
                    if s:
                        neg |= 1 << c
                    else:
                        pos |= 1 << c
                out.append(PartialSignFunction(pos, neg))
    return out


@dataclass
class SearchResult:
    family: Family | None
    exhausted: bool
    nodes: int
    elapsed: float

    @property
    def proves_none(self) -> bool:
        return self.family is None and self.exhausted


def search_full_non_dagger(k: int, n: int, budget: float = 60.0,
                           seed: int | None = None) -> SearchResult:
    """Look for a full family on ``k`` coordinates without property dagger_n.

    Both properties are monotone under adding functions, so it suffices to
    build minimal full families: repeatedly take the first (coordinate, sign)
    pair not yet covered and branch over every candidate covering it, pruning
    as soon as the partial family has ``n`` conflict-free coordinates. With
    ``seed=None`` the branch order is fixed; a seed shuffles it. Running to
    completion without a hit proves no such family exists.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > 6:
        raise ValueError("k is capped at 6")
    start = time.monotonic()
    rng = random.Random(seed)
    cands = _candidates(k, n)
    by_pair: dict[tuple[int, int], list[PartialSignFunction]] = {}
    for c in range(k):
        for sgn in (0, 1):
            lst = [f for f in cands if (f.neg if sgn else f.pos) >> c & 1]
            if seed is not None:
                rng.shuffle(lst)
            by_pair[c, sgn] = lst
    nodes = 0
    timed_out = False

    def first_uncovered(P, N):
        for c in range(k):
            if not P >> c & 1:
                return c, 0
            if not N >> c & 1:
                return c, 1
        return None

    def rec(chosen, tableP, tableN, P, N):
        nonlocal nodes, timed_out
        nodes += 1
        if nodes & 1023 == 0 and time.monotonic() - start > budget:
            timed_out = True
        if timed_out:
            return None
        pair = first_uncovered(P, N)
        if pair is None:
            return list(chosen)
        for f in by_pair[pair]:
            if f in chosen:
                continue
            newP = tableP | np.uint64(f.pos)
            newN = tableN | np.uint64(f.neg)
            if int(np.bitwise_count(newP ^ newN).max()) >= n:
                continue
            chosen.append(f)
            got = rec(chosen, np.concatenate([tableP, newP]),
                      np.concatenate([tableN, newN]), P | f.pos, N | f.neg)
            chosen.pop()
            if got is not None or timed_out:
                return got
        return None

    zero = np.zeros(1, dtype=np.uint64)
    if n <= 0:
        found = None
    else:
        found = rec([], zero, zero, 0, 0)
    fam = Family(k, found) if found is not None else None
    if fam is not None:
        assert is_full(fam) and not dagger_holds(fam, n)[0]
    return SearchResult(fam, not timed_out, nodes, time.monotonic() - start)
