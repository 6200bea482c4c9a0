"""Slow, obviously-correct reference implementations used by the tests.

These share no code with the package beyond plain data: sets of vertices,
lists of edges, dicts of signs.
"""

import itertools
from fractions import Fraction


def edge_sets(h):
    """Edges of a package Hypergraph as Python sets."""
    return [{v for v in range(h.vertex_count) if e >> v & 1} for e in h.edges]


def once_covered(edges, P):
    seen = {}
    for i in P:
        for v in edges[i]:
            seen[v] = seen.get(v, 0) + 1
    return {v for v, c in seen.items() if c == 1}


def max_partition_bruteforce(edges):
    """Largest |D| over every edge subset, from the definition."""
    best = 0
    for r in range(len(edges) + 1):
        for P in itertools.combinations(range(len(edges)), r):
            best = max(best, len(once_covered(edges, P)))
    return best


def isolated(nverts, edges):
    covered = set().union(*edges) if edges else set()
    return set(range(nverts)) - covered


def economical(nverts, edges):
    if isolated(nverts, edges):
        return False
    return all(isolated(nverts, edges[:i] + edges[i + 1:]) for i in range(len(edges)))


def H_bruteforce(n, v):
    """Is there a hypergraph on v vertices, no isolated vertices, no
    partition larger than n? Searches economical ones with <= n edges."""
    subsets = [set(c) for r in range(1, v + 1)
               for c in itertools.combinations(range(v), r)]
    for m in range(1, n + 1):
        for edges in itertools.combinations(subsets, m):
            edges = list(edges)
            if isolated(v, edges):
                continue
            if max_partition_bruteforce(edges) <= n:
                return True
    return False


def H_milp(n):
    """H(n) by a mixed-integer program over incidence-type counts, solved by
    scipy's HiGHS. Independent of the package's branch and bound."""
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    best = 0
    for m in range(1, n + 1):
        types = list(range(1, 1 << m))
        A = np.array([[1 if bin(t & P).count("1") == 1 else 0 for t in types]
                      for P in types], dtype=float)
        lb = np.array([1 if bin(t).count("1") == 1 else 0 for t in types], dtype=float)
        res = milp(c=-np.ones(len(types)), integrality=np.ones(len(types)),
                   bounds=Bounds(lb, np.full(len(types), n)),
                   constraints=LinearConstraint(A, -np.inf, n))
        if res.status == 0:
            best = max(best, round(-res.fun))
    return best


def conflict_free(functions, G):
    """functions: list of dicts coord -> 'p'/'n'."""
    vals = {}
    for i in G:
        for c, s in functions[i].items():
            vals.setdefault(c, set()).add(s)
    return {c for c, s in vals.items() if len(s) == 1}


def dagger_bruteforce(functions, n):
    for r in range(len(functions) + 1):
        for G in itertools.combinations(range(len(functions)), r):
            if len(conflict_free(functions, G)) >= n:
                return True
    return False


def full(functions, k):
    return all(any(f.get(i) == s for f in functions)
               for i in range(1, k + 1) for s in "pn")


def series_term(n, b, i, k):
    """a^i_k straight from the construction, walking the blocks."""
    start, m = 1, 1
    for length in b:
        if k < start + length:
            break
        start += length
        m += 1
    else:
        raise IndexError(k)
    j = (m - 1) % n + 1
    odd = k % 2 == 1
    if i <= n:
        if i == j:
            return Fraction(-1, m) if odd else Fraction(1, m)
        return Fraction(1, m) if odd else Fraction(-1, m)
    if i == n + j:
        return Fraction(1, b[m - 1]) if odd else Fraction(-1, b[m - 1])
    return Fraction(0)
