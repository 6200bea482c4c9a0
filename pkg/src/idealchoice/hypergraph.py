"""Hypergraphs over a finite vertex universe, stored as bit masks.

Vertices are ``0..vertex_count-1``; each edge is an int whose bit ``v`` is set
when vertex ``v`` belongs to it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

MAX_PARTITION_EDGES = 30


class HypergraphError(ValueError):
    pass


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        if v < 0:
            raise HypergraphError(f"negative vertex {v}")
        m |= 1 << v
    return m


def members(mask: int) -> list[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


@dataclass(frozen=True)
class Hypergraph:
    vertex_count: int
    edges: tuple[int, ...]

    def __post_init__(self):
        if self.vertex_count < 0:
            raise HypergraphError("vertex_count must be nonnegative")
        universe = (1 << self.vertex_count) - 1
        seen = set()
        for i, e in enumerate(self.edges):
            if e & ~universe:
                raise HypergraphError(
                    f"edge {i} uses a vertex >= {self.vertex_count}")
            if e in seen:
                raise HypergraphError(f"duplicate edge {members(e)}")
            seen.add(e)

    @classmethod
    def from_sets(cls, vertex_count: int,
                  edges: Iterable[Iterable[int]]) -> "Hypergraph":
        return cls(vertex_count, tuple(mask_of(e) for e in edges))

    @property
    def universe(self) -> int:
        return (1 << self.vertex_count) - 1

    def edge_sets(self) -> list[list[int]]:
        return [members(e) for e in self.edges]

    def to_json(self) -> dict:
        return {"vertices": self.vertex_count, "edges": self.edge_sets()}

    @classmethod
    def from_json(cls, data: dict) -> "Hypergraph":
        try:
            return cls.from_sets(int(data["vertices"]), data["edges"])
        except (KeyError, TypeError) as exc:
            raise HypergraphError(f"malformed hypergraph JSON: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass(frozen=True)
class PartitionWitness:
    D: frozenset
    P: frozenset

    @property
    def size(self) -> int:
        return len(self.D)

    def to_json(self) -> dict:
        return {"size": self.size, "D": sorted(self.D), "P": sorted(self.P)}

    @classmethod
    def from_json(cls, data: dict) -> "PartitionWitness":
        w = cls(frozenset(data["D"]), frozenset(data["P"]))
        if "size" in data and data["size"] != w.size:
            raise HypergraphError("witness size does not match |D|")
        return w


@dataclass
class DegreeProfile:
    degrees: dict[int, int]
    D_sizes: dict[int, int] = field(default_factory=dict)
    m: dict[int, int] = field(default_factory=dict)

    @property
    def isolated_count(self) -> int:
        return self.D_sizes.get(0, 0)


def isolated_vertices(h: Hypergraph) -> set[int]:
    covered = 0
    for e in h.edges:
        covered |= e
    return set(members(h.universe & ~covered))


def _once_mask(edges: Sequence[int]) -> int:
    once = twice = 0
    for e in edges:
        twice |= once & e
        once ^= e
        once &= ~twice
    return once


def exactly_once_set(h: Hypergraph, P: Iterable[int]) -> set[int]:
    """Vertices lying in exactly one edge indexed by ``P``."""
    chosen = []
    for i in P:
        if not 0 <= i < len(h.edges):
            raise HypergraphError(f"edge index {i} out of range")
        chosen.append(h.edges[i])
    return set(members(_once_mask(chosen)))


def is_partition_witness(h: Hypergraph, w: PartitionWitness) -> bool:
    if any(not 0 <= i < len(h.edges) for i in w.P):
        return False
    once = _once_mask([h.edges[i] for i in w.P])
    return mask_of(w.D) & ~once == 0


def max_partition(h: Hypergraph) -> tuple[int, PartitionWitness]:
    """Largest partition, by exhaustive search over all edge subsets.

    Subsets are walked in Gray-code order so each step toggles one edge.
    Per-vertex coverage counts are kept bit-sliced across ``planes``; the
    exactly-once set is the vertices whose count equals 1.
    """
    m = len(h.edges)
    if m > MAX_PARTITION_EDGES:
        raise HypergraphError(
            f"{m} edges exceeds the exhaustive cap of {MAX_PARTITION_EDGES}")
    if m == 0:
        return 0, PartitionWitness(frozenset(), frozenset())
    # coverage counts as bit-sliced counters: planes[b] holds bit b of count
    nbits = m.bit_length()
    planes = [0] * nbits
    edges = h.edges
    best_size, best_code = -1, 0
    code = 0
    for step in range(1 << m):
        if step:
            bit = (step & -step).bit_length() - 1
            e = edges[bit]
            if code >> bit & 1:
                # subtract e from bit-sliced counters
                borrow = e
                for b in range(nbits):
                    p = planes[b]
                    planes[b] = p ^ borrow
                    borrow &= ~p
                    if not borrow:
                        break
            else:
                carry = e
                for b in range(nbits):
                    p = planes[b]
                    planes[b] = p ^ carry
                    carry &= p
                    if not carry:
                        break
            code ^= 1 << bit
        once = planes[0]
        for b in range(1, nbits):
            once &= ~planes[b]
        size = once.bit_count()
        if size > best_size:
            best_size, best_code = size, code
    P = frozenset(i for i in range(m) if best_code >> i & 1)
    D = frozenset(members(_once_mask([edges[i] for i in P])))
    return best_size, PartitionWitness(D, P)


def has_partition_larger_than(h: Hypergraph, n: int) -> bool:
    return max_partition(h)[0] > n


def _is_economical_masks(universe: int, edges: Sequence[int]) -> bool:
    if _covered(edges) != universe:
        return False
    for i in range(len(edges)):
        if _covered(edges[:i] + edges[i + 1:]) == universe:
            return False
    return True


def _covered(edges: Sequence[int]) -> int:
    c = 0
    for e in edges:
        c |= e
    return c


def is_economical(h: Hypergraph) -> bool:
    return _is_economical_masks(h.universe, list(h.edges))


def trim_economical(h: Hypergraph) -> Hypergraph:
    """Delete edges until every remaining edge owns a private vertex.

    Candidates are tried largest first (ties: lowest index); the scan restarts
    after every deletion.
    """
    if isolated_vertices(h):
        raise HypergraphError("input has isolated vertices")
    kept = list(h.edges)
    universe = h.universe
    while True:
        order = sorted(range(len(kept)),
                       key=lambda i: (-kept[i].bit_count(), i))
        for i in order:
            rest = kept[:i] + kept[i + 1:]
            if _covered(rest) == universe:
                kept = rest
                break
        else:
            return Hypergraph(h.vertex_count, tuple(kept))


def degree_profile(h: Hypergraph) -> DegreeProfile:
    degrees = {v: 0 for v in range(h.vertex_count)}
    for e in h.edges:
        for v in members(e):
            degrees[v] += 1
    sizes: dict[int, int] = {}
    for d in degrees.values():
        sizes[d] = sizes.get(d, 0) + 1
    m = {k: k * c for k, c in sizes.items() if k >= 1}
    return DegreeProfile(degrees, dict(sorted(sizes.items())), dict(sorted(m.items())))


def restrict(h: Hypergraph, keep: Iterable[int]) -> Hypergraph:
    """Induced hypergraph on ``keep``, relabelled 0.. in sorted order.

    Empty traces are dropped and duplicate traces merged. Any partition of
    the result is a partition of ``h``.
    """
    keep = sorted(set(keep))
    index = {v: i for i, v in enumerate(keep)}
    out: list[int] = []
    seen = set()
    for e in h.edges:
        t = mask_of(index[v] for v in members(e) if v in index)
        if t and t not in seen:
            seen.add(t)
            out.append(t)
    return Hypergraph(len(keep), tuple(out))
