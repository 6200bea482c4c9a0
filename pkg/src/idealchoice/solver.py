"""Exact H(n) for small n, and randomized witness search.

Only economical hypergraphs need to be searched, and in those every edge owns
a private vertex, so there are at most ``n`` edges. Vertices with the same
set of incident edges (their *type*) are interchangeable, which turns a
hypergraph on ``m`` edges into a count vector over the ``2^m - 1`` nonempty
types. For a nonempty edge subset ``P`` the vertices covered exactly once by
``P`` are those whose type meets ``P`` in one point, so "no partition larger
than n" is the family of linear constraints

    sum_{t : |t & P| = 1} c_t <= n        for every nonempty P,

and economy is ``c_{i} >= 1`` for every singleton type.

Branch and bound: the singleton minimums are reserved up front, types are
assigned in order of decreasing size (ties by bit pattern), and each count is
tried from its largest feasible value down to 0. The bound at a node comes
from the dual of the remaining LP restricted to symmetric weights (one weight
per ``|P|``): for every dual point ``w`` the remaining vertices are at most
``sum_r w_r * S_r``, where ``S_r`` is the total slack over subsets of size
``r``. The dual points are precomputed exactly as rationals.
"""

from __future__ import annotations

import itertools
import json
import math
import multiprocessing as mp
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .counting import k_of, upper_bound_H
from .hypergraph import Hypergraph, isolated_vertices, max_partition, restrict
from .trees import branch_hypergraph

MAX_N = 7


class SolverError(ValueError):
    pass


def _type_members(t: int) -> list[int]:
    """1-based edge labels of a type mask."""
    return [i + 1 for i in range(t.bit_length()) if t >> i & 1]


@dataclass
class TypeProfile:
    n: int
    m: int
    counts: dict[int, int] = field(default_factory=dict)  # type mask -> count

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def cover(self, P: int) -> int:
        return sum(c for t, c in self.counts.items() if (t & P).bit_count() == 1)

    def validate(self) -> None:
        if not 1 <= self.m <= self.n:
            raise SolverError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        full = (1 << self.m) - 1
        for t, c in self.counts.items():
            if not 0 < t <= full:
                raise SolverError(f"type {t:#b} is not a nonempty subset of the edges")
            if c < 0:
                raise SolverError("counts must be nonnegative")
        for i in range(self.m):
            if self.counts.get(1 << i, 0) < 1:
                raise SolverError(f"edge {i + 1} has no private vertex")
        for P in range(1, full + 1):
            if self.cover(P) > self.n:
                raise SolverError(f"edge subset {_type_members(P)} covers "
                                  f"{self.cover(P)} > {self.n} vertices exactly once")

    def to_json(self) -> dict:
        rows = [{"type": _type_members(t), "count": c}
                for t, c in sorted(self.counts.items()) if c]
        return {"n": self.n, "m": self.m, "counts": rows}

    @classmethod
    def from_json(cls, data: dict) -> "TypeProfile":
        counts: dict[int, int] = {}
        for row in data["counts"]:
            t = 0
            for i in row["type"]:
                t |= 1 << (int(i) - 1)
            counts[t] = counts.get(t, 0) + int(row["count"])
        return cls(int(data["n"]), int(data["m"]), counts)


def expand_witness(p: TypeProfile) -> Hypergraph:
    """One vertex per unit of count, numbered by type in increasing bit order."""
    edges = [0] * p.m
    v = 0
    for t in sorted(p.counts):
        for _ in range(p.counts[t]):
            for i in range(p.m):
                if t >> i & 1:
                    edges[i] |= 1 << v
            v += 1
    return Hypergraph(v, tuple(edges))


def profile_of(h: Hypergraph, n: int) -> TypeProfile:
    """Group the vertices of ``h`` by incidence type."""
    counts: dict[int, int] = {}
    for v in range(h.vertex_count):
        t = 0
        for i, e in enumerate(h.edges):
            if e >> v & 1:
                t |= 1 << i
        if t:
            counts[t] = counts.get(t, 0) + 1
    return TypeProfile(n, len(h.edges), counts)


def harmonic_cap(n: int) -> int:
    return math.floor(upper_bound_H(n))


# -- dual bound -------------------------------------------------------------

def _hits(m: int, k: int, r: int) -> int:
    """Number of subsets P of size r meeting a fixed k-set in exactly one point."""
    if r < 1:
        return 0
    return k * comb(m - k, r - 1)


@lru_cache(maxsize=None)
def _dual_points(m: int, c: int) -> tuple[tuple[int, ...], ...]:
    """Symmetric dual points for types of size <= c, as integer rows.

    Each row is ``(L, L*w_1, ..., L*w_m)`` with ``w`` exactly feasible:
    ``sum_r hits(k, r) w_r >= 1`` for ``1 <= k <= c`` and ``w >= 0``. Vertices
    are found in floating point, then rationalised and rescaled so exact
    feasibility holds; any feasible point gives a valid bound.
    """
    A = np.array([[_hits(m, k, r) for r in range(1, m + 1)]
                  for k in range(1, c + 1)], dtype=float)
    rows = list(A) + list(np.eye(m))
    rhs = [1.0] * c + [0.0] * m
    found: set[tuple[Fraction, ...]] = set()
    for basis in itertools.combinations(range(len(rows)), m):
        M = np.array([rows[i] for i in basis])
        if abs(np.linalg.det(M)) < 1e-9:
            continue
        w = np.linalg.solve(M, np.array([rhs[i] for i in basis]))
        if (w < -1e-9).any() or (A @ w < 1 - 1e-9).any():
            continue
        wf = [max(Fraction(x).limit_denominator(10**6), Fraction(0)) for x in w]
        worst = min(sum(_hits(m, k, r + 1) * wf[r] for r in range(m))
                    for k in range(1, c + 1))
        if worst <= 0:
            continue
        if worst < 1:
            wf = [x / worst for x in wf]
        found.add(tuple(wf))
    out = []
    for wf in sorted(found):
        L = math.lcm(*(x.denominator for x in wf))
        out.append((L,) + tuple(int(x * L) for x in wf))
    return tuple(out)


# -- branch and bound -------------------------------------------------------

@dataclass
class _MResult:
    m: int
    best: int
    counts: dict | None
    exhausted: bool
    nodes: int


_SHARED = None  # cross-process best-so-far, set by the pool initializer


def _pool_init(shared):
    global _SHARED
    _SHARED = shared


def _search_m(n: int, m: int, best: int, cap: int, deadline: float | None,
              node_limit: int | None = None) -> _MResult:
    """Find a profile on exactly ``m`` edges with more than ``best`` vertices."""
    full = (1 << m) - 1
    subsets = range(1, full + 1)
    types = sorted(subsets, key=lambda t: (-t.bit_count(), t))
    aff = [[P for P in subsets if (t & P).bit_count() == 1] for t in types]
    size_of = [t.bit_count() for t in types]
    # slack after reserving one private vertex per edge
    slack = [0] * (full + 1)
    for P in subsets:
        slack[P] = n - P.bit_count()
    if min(slack[1:]) < 0:
        return _MResult(m, best, None, True, 0)
    S = [0] * (m + 1)  # S[r] = total slack over |P| = r
    for P in subsets:
        S[P.bit_count()] += slack[P]
    hits = [[_hits(m, k, r) for r in range(m + 1)] for k in range(m + 1)]
    duals = [None] + [_dual_points(m, c) for c in range(1, m + 1)]
    T = len(types)
    values = [0] * T
    state = {"best": best, "counts": None, "nodes": 0, "stop": False}

    def record(total):
        state["best"] = total
        state["counts"] = {types[i]: values[i] for i in range(T) if values[i]}
        for i in range(m):
            state["counts"][1 << i] = state["counts"].get(1 << i, 0) + 1
        if _SHARED is not None:
            with _SHARED.get_lock():
                if total > _SHARED.value:
                    _SHARED.value = total

    def bound(c):
        b = None
        for row in duals[c]:
            val = 0
            for r in range(1, m + 1):
                val += row[r] * S[r]
            val //= row[0]
            if b is None or val < b:
                b = val
        return b

    def rec(idx, total):
        state["nodes"] += 1
        nodes = state["nodes"]
        if nodes & 4095 == 0:
            if deadline is not None and time.monotonic() > deadline:
                state["stop"] = True
            if node_limit is not None and nodes > node_limit:
                state["stop"] = True
            if _SHARED is not None and _SHARED.value > state["best"]:
                state["best"] = _SHARED.value
        if state["stop"]:
            return
        if total > state["best"]:
            record(total)
            if total >= cap:
                state["stop"] = True
                return
        if idx == T:
            return
        k = size_of[idx]
        if total + bound(k) <= state["best"]:
            return
        a = aff[idx]
        hk = hits[k]
        mx = min(slack[P] for P in a)
        for v in range(mx, -1, -1):
            if v:
                for P in a:
                    slack[P] -= v
                for r in range(1, m + 1):
                    S[r] -= v * hk[r]
            values[idx] = v
            rec(idx + 1, total + v)
            values[idx] = 0
            if v:
                for P in a:
                    slack[P] += v
                for r in range(1, m + 1):
                    S[r] += v * hk[r]
            if state["stop"]:
                return

    rec(0, m)
    exhausted = not state["stop"] or state["best"] >= cap
    return _MResult(m, state["best"], state["counts"], exhausted, state["nodes"])


def _search_m_worker(args):
    return _search_m(*args)


@dataclass
class HResult:
    n: int
    value: int
    witness: TypeProfile
    proved_optimal: bool
    cap: int
    nodes: int
    elapsed: float
    exhausted_m: list[int] = field(default_factory=list)

    @property
    def upper(self) -> int:
        """Best proved upper bound on H(n)."""
        return self.value if self.proved_optimal else self.cap

    def to_json(self) -> dict:
        return {"n": self.n, "value": self.value,
                "proved_optimal": self.proved_optimal,
                "bounds": [self.value, self.upper],
                "nodes": self.nodes, "witness": self.witness.to_json()}


def _singletons(n: int) -> TypeProfile:
    return TypeProfile(n, 1, {1: n})


def exact_H(n: int, time_budget: float | None = None, threads: int = 1,
            node_limit: int | None = None) -> HResult:
    """Largest vertex count over all feasible type profiles with ``m <= n``.

    ``proved_optimal`` is true when every ``m`` was searched to exhaustion or
    the harmonic cap ``floor(sum n/k)`` was reached. With a budget, the best
    profile found so far is returned.
    """
    if not 1 <= n <= MAX_N:
        raise SolverError(f"n must be in 1..{MAX_N}")
    start = time.monotonic()
    deadline = None if time_budget is None else start + time_budget
    cap = harmonic_cap(n)
    # one edge with n private vertices is always feasible
    best, witness = n, _singletons(n)
    results: list[_MResult] = []
    if threads <= 1:
        for m in range(2, n + 1):
            r = _search_m(n, m, best, cap, deadline, node_limit)
            results.append(r)
            if r.counts is not None and r.best > best:
                best, witness = r.best, TypeProfile(n, m, r.counts)
            if best >= cap:
                break
    else:
        shared = mp.Value("i", best)
        with ProcessPoolExecutor(max_workers=threads, initializer=_pool_init,
                                 initargs=(shared,)) as pool:
            jobs = [(n, m, best, cap, deadline, node_limit)
                    for m in range(n, 1, -1)]
            results = list(pool.map(_search_m_worker, jobs))
        # deterministic winner: largest total, then smallest m
        for r in sorted(results, key=lambda r: r.m):
            if r.counts is not None and r.best > best:
                best, witness = r.best, TypeProfile(n, r.m, r.counts)
    exhausted = [1] + [r.m for r in results if r.exhausted]
    proved = best >= cap or len(exhausted) == n
    witness.validate()
    return HResult(n, best, witness, proved, cap,
                   sum(r.nodes for r in results), time.monotonic() - start,
                   sorted(exhausted))


# -- randomized witness search ---------------------------------------------

@dataclass
class WitnessSearchResult:
    hypergraph: Hypergraph | None
    attempts: int
    elapsed: float
    method: str

    @property
    def found(self) -> bool:
        return self.hypergraph is not None


def _verify_witness(h: Hypergraph, n: int, v_target: int) -> bool:
    return (h.vertex_count == v_target and not isolated_vertices(h)
            and max_partition(h)[0] <= n)


def search_witness(v_target: int, n: int, seed: int, budget: float = 60.0,
                   max_attempts: int | None = None) -> WitnessSearchResult:
    """Look for a hypergraph on ``v_target`` vertices with no partition above n.

    Up to ``k_n`` vertices the tree-branch hypergraph, restricted to the
    first ``v_target`` vertices, always works. Beyond that, simulated
    annealing runs over type profiles on ``n`` edges, minimising the total
    excess ``sum_P max(0, cover(P) - n)``. One attempt is one proposed move.
    Anything returned has been re-checked by ``max_partition``.
    """
    start = time.monotonic()
    if v_target < 1 or n < 1:
        raise SolverError("v_target and n must be positive")
    if n <= 12 and v_target <= k_of(n):
        h = restrict(branch_hypergraph(n), range(v_target))
        assert _verify_witness(h, n, v_target)
        return WitnessSearchResult(h, 0, time.monotonic() - start, "tree")
    if n > 10:
        raise SolverError("annealing search is limited to n <= 10")
    if v_target < n:
        raise SolverError("v_target below n is covered by the tree branch")
    rng = np.random.default_rng(seed)
    m = n
    full = (1 << m) - 1
    types = np.arange(1, full + 1)
    # inc[P-1, t-1] = 1 when |t & P| = 1
    inc = np.array([[1 if (t & P).bit_count() == 1 else 0 for t in types]
                    for P in types], dtype=np.int64)
    ntypes = len(types)
    floor_ = np.zeros(ntypes, dtype=np.int64)
    for i in range(m):
        floor_[(1 << i) - 1] = 1
    attempts = 0
    temp0 = 1.0
    while True:
        counts = floor_.copy()
        extra = rng.integers(0, ntypes, size=v_target - m)
        np.add.at(counts, extra, 1)
        cover = inc @ counts
        excess = int(np.maximum(cover - n, 0).sum())
        steps = 20000 * m
        for step in range(steps):
            if excess == 0:
                break
            if max_attempts is not None and attempts >= max_attempts:
                break
            if step & 1023 == 0 and time.monotonic() - start > budget:
                break
            attempts += 1
            movable = np.flatnonzero(counts > floor_)
            src = movable[rng.integers(len(movable))]
            dst = rng.integers(ntypes)
            if dst == src:
                continue
            new_cover = cover - inc[:, src] + inc[:, dst]
            new_excess = int(np.maximum(new_cover - n, 0).sum())
            temp = temp0 * (1 - step / steps) + 1e-3
            delta = new_excess - excess
            if delta <= 0 or rng.random() < math.exp(-delta / temp):
                counts[src] -= 1
                counts[dst] += 1
                cover, excess = new_cover, new_excess
        if excess == 0:
            prof = TypeProfile(n, m, {int(types[i]): int(c)
                                      for i, c in enumerate(counts) if c})
            h = expand_witness(prof)
            if _verify_witness(h, n, v_target):
                return WitnessSearchResult(h, attempts, time.monotonic() - start,
                                           "anneal")
        if max_attempts is not None and attempts >= max_attempts:
            break
        if time.monotonic() - start > budget:
            break
    return WitnessSearchResult(None, attempts, time.monotonic() - start, "anneal")


def dumps(p: TypeProfile) -> str:
    return json.dumps(p.to_json())
