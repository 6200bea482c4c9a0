"""The recursive trees T_n and the sign families read off their branches.

T_1 is a single vertex. For n >= 2, T_n is a path of n // 2 vertices (the
bottom one is the root) whose top vertex has two children: the root of a
copy of T_{n//2} and the root of a copy of T_{(n+1)//2}, in that order.
Vertices are numbered in preorder, smaller copy first.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .families import Family, PartialSignFunction
from .hypergraph import Hypergraph, mask_of


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class RootedTree:
    parent: tuple  # parent[v] is None for the root
    children: tuple  # children[v] is a tuple in left-to-right order

    @property
    def size(self) -> int:
        return len(self.parent)

    @property
    def root(self) -> int:
        return self.parent.index(None)

    def is_splitting(self, v: int) -> bool:
        return len(self.children[v]) > 1

    def is_maximal(self, v: int) -> bool:
        return not self.children[v]

    def ancestors(self, v: int) -> list[int]:
        """``v`` and everything below it, from ``v`` down to the root."""
        out = [v]
        while self.parent[v] is not None:
            v = self.parent[v]
            out.append(v)
        return out

    def leq(self, a: int, b: int) -> bool:
        """Tree order: ``a <= b`` when ``a`` lies on the root path of ``b``."""
        while b is not None:
            if b == a:
                return True
            b = self.parent[b]
        return False

    def comparable(self, a: int, b: int) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def to_json(self) -> dict:
        return {"vertices": self.size,
                "parent": list(self.parent),
                "children": [list(c) for c in self.children]}

    @classmethod
    def from_parents(cls, parent: Iterable) -> "RootedTree":
        parent = tuple(parent)
        kids: list[list[int]] = [[] for _ in parent]
        for v, p in enumerate(parent):
            if p is not None:
                kids[p].append(v)
        t = cls(parent, tuple(tuple(c) for c in kids))
        t.validate()
        return t

    def validate(self) -> None:
        roots = [v for v, p in enumerate(self.parent) if p is None]
        if len(roots) != 1:
            raise TreeError(f"expected one root, found {len(roots)}")
        seen = set()
        stack = [roots[0]]
        while stack:
            v = stack.pop()
            if v in seen:
                raise TreeError("cycle detected")
            seen.add(v)
            stack.extend(self.children[v])
        if len(seen) != self.size:
            raise TreeError("some vertices are unreachable from the root")


@lru_cache(maxsize=None)
def _shape(n: int) -> tuple:
    """Nested ``(path_length, left, right)`` description of T_n."""
    if n < 1:
        raise TreeError("n must be >= 1")
    if n == 1:
        return None
    return (n // 2, _shape(n // 2), _shape((n + 1) // 2))


def build_T(n: int) -> RootedTree:
    parent: list = []

    def emit(shape, below):
        if shape is None:
            parent.append(below)
            return
        path, left, right = shape
        for _ in range(path):
            parent.append(below)
            below = len(parent) - 1
        emit(left, below)
        emit(right, below)

    emit(_shape(n), None)
    return RootedTree.from_parents(parent)


def sigma(t: RootedTree, v: int) -> int:
    """Least splitting vertex weakly above ``v``."""
    if t.is_maximal(v):
        raise TreeError(f"vertex {v} is maximal; sigma is undefined")
    while not t.is_splitting(v):
        (v,) = t.children[v]
        if t.is_maximal(v):
            raise TreeError("no splitting vertex above; not a T_n-like tree")
    return v


def meet(t: RootedTree, b: int, c: int) -> int:
    """Greatest common lower bound of two incomparable vertices."""
    if t.comparable(b, c):
        raise TreeError(f"vertices {b} and {c} are comparable")
    below_b = set(t.ancestors(b))
    for w in t.ancestors(c):
        if w in below_b:
            return w
    raise TreeError("no common lower bound")  # unreachable in a rooted tree


def triple_claim_check(n: int, D: Iterable[int],
                       t: RootedTree | None = None) -> tuple[int, int, int] | None:
    """Find ``a, b, c`` in ``D`` with ``b, c`` incomparable and sigma(a) = b ^ c."""
    t = t or build_T(n)
    D = sorted(set(D))
    if any(not 0 <= v < t.size for v in D):
        raise TreeError("D is not a subset of the tree's vertices")
    meets: dict[int, tuple[int, int]] = {}
    for i, b in enumerate(D):
        for c in D[i + 1:]:
            if not t.comparable(b, c):
                meets.setdefault(meet(t, b, c), (b, c))
    for a in D:
        if t.is_maximal(a):
            continue
        s = sigma(t, a)
        if s in meets:
            b, c = meets[s]
            return a, b, c
    return None


def maximal_chains(t: RootedTree) -> list[frozenset]:
    """Root-to-leaf vertex sets, leaves in preorder."""
    return [frozenset(t.ancestors(v)) for v in range(t.size) if t.is_maximal(v)]


def chain_path(t: RootedTree, leaf: int) -> list[int]:
    return list(reversed(t.ancestors(leaf)))


def default_labeling(t: RootedTree) -> dict[int, dict[int, str]]:
    """First child of each splitting vertex gets ``p``, second gets ``n``."""
    return {s: {t.children[s][0]: "p", t.children[s][1]: "n"}
            for s in range(t.size) if t.is_splitting(s)}


def random_labeling(t: RootedTree, rng: random.Random) -> dict[int, dict[int, str]]:
    out = {}
    for s in range(t.size):
        if t.is_splitting(s):
            a, b = t.children[s]
            if rng.random() < 0.5:
                a, b = b, a
            out[s] = {a: "p", b: "n"}
    return out


def check_labeling(t: RootedTree, labeling: dict) -> None:
    for s in range(t.size):
        if not t.is_splitting(s):
            continue
        lab = labeling.get(s)
        if lab is None or set(lab) != set(t.children[s]) or \
                sorted(lab.values()) != ["n", "p"]:
            raise TreeError(f"labeling at splitting vertex {s} is not a bijection "
                            "from its children onto {p, n}")


def build_bounding_family(n: int, labeling: dict | None = None,
                          t: RootedTree | None = None) -> Family:
    """Two functions per maximal chain of T_n, on coordinates ``1..k_n``.

    On chain ``P`` a non-top vertex ``v`` gets the label of the child of
    sigma(v) that ``P`` passes through; the top vertex gets ``p`` in one
    function and ``n`` in the other.
    """
    t = t or build_T(n)
    labeling = labeling if labeling is not None else default_labeling(t)
    check_labeling(t, labeling)
    fs = []
    for leaf in (v for v in range(t.size) if t.is_maximal(v)):
        path = chain_path(t, leaf)
        succ = {path[i]: path[i + 1] for i in range(len(path) - 1)}
        pos = neg = 0
        for v in path[:-1]:
            s = sigma(t, v)
            if labeling[s][succ[s]] == "p":
                pos |= 1 << v
            else:
                neg |= 1 << v
        top = 1 << leaf
        fs.append(PartialSignFunction(pos | top, neg))
        fs.append(PartialSignFunction(pos, neg | top))
    return Family(t.size, fs)


def branch_hypergraph(n: int, t: RootedTree | None = None) -> Hypergraph:
    t = t or build_T(n)
    return Hypergraph(t.size, tuple(mask_of(c) for c in maximal_chains(t)))


def dumps(t: RootedTree) -> str:
    return json.dumps(t.to_json())
