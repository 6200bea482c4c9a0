import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from idealchoice.counting import derive_tables, I_values, k_of, k_sequence
from idealchoice.families import (
    Family,
    FamilyError,
    PartialSignFunction,
    conflict_free_coords,
    dagger_holds,
    is_bounding,
    is_full,
    max_conflict_free,
    search_full_non_dagger,
    to_hypergraph,
)
from idealchoice.hypergraph import isolated_vertices, max_partition
from idealchoice.trees import (
    RootedTree,
    TreeError,
    branch_hypergraph,
    build_T,
    build_bounding_family,
    maximal_chains,
    meet,
    random_labeling,
    sigma,
    triple_claim_check,
)

from oracles import conflict_free, dagger_bruteforce, full


def fam(k, dicts):
    return Family(k, [PartialSignFunction.from_dict(d) for d in dicts])


LEFT = {"k": 3, "functions": [{"1": "p"}, {"1": "p", "2": "p", "3": "p"},
                              {"2": "n", "3": "n"}]}


def as_dicts(F):
    return [{int(c): s for c, s in f.to_dict().items()} for f in F.functions]


@st.composite
def families_st(draw, max_k=5, max_f=7):
    k = draw(st.integers(1, max_k))
    fs = []
    for _ in range(draw(st.integers(0, max_f))):
        vals = draw(st.lists(st.sampled_from([None, "p", "n"]), min_size=k, max_size=k))
        d = {str(i + 1): v for i, v in enumerate(vals) if v}
        if d:
            fs.append(d)
    return fam(k, fs)


# -- families ---------------------------------------------------------------

def test_left_figure():
    F = Family.from_json(LEFT)
    assert not is_full(F)
    ok, w = dagger_holds(F, 3)
    assert ok and len(w.D) >= 3
    assert conflict_free_coords(F, w.G) == w.D
    assert [sorted(c + 1 for c in range(3) if e >> c & 1)
            for e in to_hypergraph(F).edges] == [[1], [1, 2, 3], [2, 3]]
    # the total all-p function alone already works
    assert conflict_free_coords(F, {1}) == {1, 2, 3}


def test_full_examples():
    allp = {str(i): "p" for i in range(1, 5)}
    alln = {str(i): "n" for i in range(1, 5)}
    assert is_full(fam(4, [allp, alln]))
    assert is_full(build_bounding_family(2))


def test_conflict_free_examples():
    allp = {str(i): "p" for i in range(1, 4)}
    alln = {str(i): "n" for i in range(1, 4)}
    F = fam(3, [allp, alln, {"1": "p"}, {"2": "n", "3": "n"}])
    assert conflict_free_coords(F, {0}) == {1, 2, 3}
    assert conflict_free_coords(F, {0, 1}) == set()
    assert conflict_free_coords(F, {2, 3}) == {1, 2, 3}
    with pytest.raises(FamilyError):
        conflict_free_coords(F, {9})


def test_dagger_examples():
    F = fam(4, [{str(i): "p" for i in range(1, 5)}])
    ok, w = dagger_holds(F, 4)
    assert ok and w.G == {0} and w.D == {1, 2, 3, 4}
    assert not dagger_holds(build_bounding_family(2), 3)[0]


def test_bounding_examples():
    assert not is_bounding(Family.from_json(LEFT), 1)
    assert not is_bounding(fam(1, [{"1": "p"}, {"1": "n"}]), 1)
    assert is_bounding(fam(1, [{"1": "p"}, {"1": "n"}]), 2)


def test_family_json_and_errors():
    F = Family.from_json(LEFT)
    assert Family.from_json(F.to_json()).functions == F.functions
    with pytest.raises(FamilyError):
        PartialSignFunction.from_dict({"1": "x"})
    with pytest.raises(FamilyError):
        PartialSignFunction.from_dict({"0": "p"})
    with pytest.raises(FamilyError):
        fam(2, [{"3": "p"}])
    with pytest.raises(FamilyError):
        Family.from_json({"functions": []})
    assert fam(1, [{"1": "p"}, {"1": "p"}]).duplicates == [1]


def test_dagger_cap():
    F = fam(5, [{"1": "p"}] * 26)
    with pytest.raises(FamilyError):
        max_conflict_free(F)


@settings(max_examples=300, deadline=None)
@given(families_st())
def test_dagger_matches_bruteforce(F):
    fs = as_dicts(F)
    best = max_conflict_free(F)[0]
    for n in range(0, F.k + 2):
        ok, w = dagger_holds(F, n)
        assert ok == dagger_bruteforce(fs, n)
        if ok:
            assert len(w.D) >= n and w.D == conflict_free(fs, w.G)
        # monotone in n
        assert ok == (best >= n)
    assert is_full(F) == full(fs, F.k)


@settings(max_examples=200, deadline=None)
@given(families_st(max_k=8, max_f=8))
def test_partition_gives_dagger(F):
    # a partition of size n+1 in the domain hypergraph yields dagger_{n+1}
    if not is_full(F):
        return
    h = to_hypergraph(F)
    assert not isolated_vertices(h)
    size = max_partition(h)[0]
    assert dagger_holds(F, size)[0]


def test_search_examples():
    r = search_full_non_dagger(3, 3)
    assert r.family is not None and is_full(r.family)
    assert not dagger_bruteforce(as_dicts(r.family), 3)
    r = search_full_non_dagger(5, 4, budget=120)
    assert r.family is not None and is_bounding(r.family, 4)
    r = search_full_non_dagger(2, 2)
    assert r.family is None and r.exhausted and r.proves_none


def test_search_seeded_is_reproducible():
    a = search_full_non_dagger(4, 4, seed=5)
    b = search_full_non_dagger(4, 4, seed=5)
    assert a.family.functions == b.family.functions


def test_search_consistent_with_tables():
    # a bounding family on k coordinates for dagger_n means I(n) > k
    I = I_values(derive_tables(3, {1: 1, 2: 3, 3: 5}))
    for n in (2, 3):
        lo, hi = I[n]
        r = search_full_non_dagger(hi - 1, n, budget=120)
        assert r.family is not None
        r = search_full_non_dagger(hi, n, budget=300)
        assert r.family is None and r.exhausted


# -- trees ------------------------------------------------------------------

def test_tree_sizes():
    ks = k_sequence(20)
    for n in range(1, 21):
        t = build_T(n)
        assert t.size == ks[n - 1]
        assert len(maximal_chains(t)) == n
        for v in range(t.size):
            assert len(t.children[v]) in (0, 1, 2)
            if not t.is_maximal(v):
                assert t.is_splitting(sigma(t, v))


def test_tree_examples():
    assert build_T(1).size == 1
    t2 = build_T(2)
    assert t2.children == ((1, 2), (), ())
    assert sigma(t2, 0) == 0
    assert meet(t2, 1, 2) == 0
    t4 = build_T(4)
    assert t4.size == 8
    assert t4.children == ((1,), (2, 5), (3, 4), (), (), (6, 7), (), ())
    assert sigma(t4, 0) == 1
    assert meet(t4, 3, 6) == 1
    assert meet(t4, 3, 4) == 2
    t3 = build_T(3)
    assert sigma(t3, 0) == 0
    assert [len(c) for c in maximal_chains(t2)] == [2, 2]
    assert len(maximal_chains(build_T(6))) == 6


def test_tree_errors():
    t = build_T(4)
    with pytest.raises(TreeError):
        sigma(t, 3)
    with pytest.raises(TreeError):
        meet(t, 0, 3)
    with pytest.raises(TreeError):
        RootedTree.from_parents([None, None])
    with pytest.raises(TreeError):
        build_T(0)


def test_triple_examples():
    t2 = build_T(2)
    assert triple_claim_check(2, {0, 1, 2}) == (0, 1, 2)
    assert triple_claim_check(2, {0, 1}) is None
    t5 = build_T(5)
    for D in itertools.combinations(range(t5.size), 6):
        a, b, c = triple_claim_check(5, D, t5)
        assert {a, b, c} <= set(D)
        assert not t5.comparable(b, c)
        assert sigma(t5, a) == meet(t5, b, c)


def test_triple_claim_random_large_sets():
    rng = random.Random(11)
    for n in range(2, 11):
        t = build_T(n)
        for _ in range(30):
            D = rng.sample(range(t.size), n + 1)
            assert triple_claim_check(n, D, t) is not None


def test_bounding_family_examples():
    F = build_bounding_family(1)
    assert F.k == 1 and [f.to_dict() for f in F.functions] == [{"1": "p"}, {"1": "n"}]
    F = build_bounding_family(2)
    assert F.k == 3 and len(F) == 4 and is_bounding(F, 3)
    F = build_bounding_family(5)
    assert F.k == 10 and is_bounding(F, 6)
    assert not dagger_bruteforce(as_dicts(F), 6)


def test_bounding_family_hypergraph_is_branches():
    for n in range(1, 9):
        F = build_bounding_family(n)
        assert set(to_hypergraph(F).edges) == set(branch_hypergraph(n).edges)


def test_bounding_family_random_labelings():
    rng = random.Random(2024)
    for n in range(1, 7):
        t = build_T(n)
        for _ in range(20):
            F = build_bounding_family(n, random_labeling(t, rng), t)
            assert is_bounding(F, n + 1)


def test_bad_labeling_rejected():
    t = build_T(2)
    with pytest.raises(TreeError):
        build_bounding_family(2, {0: {1: "p", 2: "p"}}, t)


def test_branch_hypergraph_partitions():
    for n in range(1, 13):
        h = branch_hypergraph(n)
        assert h.vertex_count == k_of(n)
        assert not isolated_vertices(h)
        assert max_partition(h)[0] <= n
