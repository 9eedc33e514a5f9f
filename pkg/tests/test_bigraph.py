from itertools import combinations

import pytest
from hypothesis import given

from conftest import block_case, four_agents_two_seats, no_block, walkthrough
from dichomatch import oracle
from dichomatch.bigraph import (
    Lex,
    RankedGraph,
    build_graph,
    can_match_all,
    lex_compare,
    lexi_optimal_set,
    max_matching,
    rank_maximal_matching,
    ranked_graph,
    signature,
)
from dichomatch.instance import Instance, Matching, MatchingError, validate_matching
from strategies import instances


def test_graph_edges():
    G = build_graph(four_agents_two_seats())
    assert G.edges == {("d1", "1"), ("d1", "3"), ("d1", "4"), ("d2", "1"), ("d2", "2"), ("d2", "4")}
    assert build_graph(block_case(3)).num_edges() == 8


def test_graph_drops_isolated_vertices():
    inst = Instance("12", ["d1", "d2"], {"1": ["d1"]}, {"d1": "12", "d2": "21"})
    G = build_graph(inst)
    assert G.left == ("d1",) and G.right == ("1",)
    empty = build_graph(Instance("1", ["d1"], {}, {"d1": "1"}))
    assert not empty.edges and len(max_matching(empty)) == 0


def test_max_matching_examples():
    assert len(max_matching(build_graph(block_case(4)))) == 3
    assert len(max_matching(build_graph(no_block()))) == 6


def test_can_match_all():
    G = build_graph(walkthrough())
    assert can_match_all(G, {"d1", "d2", "d3"})
    assert not can_match_all(G, {"d1", "d2", "d3", "d4"})
    assert can_match_all(G, set())
    assert not can_match_all(G, {"dx"})


def test_signatures():
    inst = four_agents_two_seats()
    M = Matching.from_institutions({"d1": "4", "d2": "1"})
    assert signature(M, ranked_graph(inst)) == (1, 1)
    assert signature(Matching(frozenset()), ranked_graph(inst)) == (0, 0)
    final = Matching.from_institutions({"d1": "2", "d2": "3", "d3": "1"})
    assert signature(final, ranked_graph(walkthrough())) == (1, 1, 1, 0)
    with pytest.raises(MatchingError):
        signature(Matching.from_institutions({"d1": "2"}), ranked_graph(inst))


def test_lex_compare():
    assert lex_compare((1, 0), (0, 1)) is Lex.STRICTLY_BETTER
    assert lex_compare((1, 1), (1, 1)) is Lex.EQUAL
    assert lex_compare((0, 1, 1), (1, 0, 0)) is Lex.STRICTLY_WORSE
    with pytest.raises(ValueError):
        lex_compare((1,), (1, 0))


def test_lexi_optimal_examples():
    inst = walkthrough()
    assert lexi_optimal_set(build_graph(inst), inst.baseline) == {"d1", "d2", "d3"}
    p4 = block_case(4)
    assert lexi_optimal_set(build_graph(p4), ["d1", "d2", "d3", "d4"]) == {"d1", "d2", "d3"}
    assert lexi_optimal_set(build_graph(Instance("1", ["d1"], {}, {"d1": "1"})), ["d1"]) == frozenset()


def test_rank_maximal_examples():
    inst = walkthrough()
    M = rank_maximal_matching(ranked_graph(inst))
    assert M.matched_institutions() == {"d1", "d2", "d3"}
    single = Instance("1", ["d1"], {"1": ["d1"]}, {"d1": "1"})
    assert rank_maximal_matching(ranked_graph(single)).pairs == {("1", "d1")}
    p1 = block_case(1)
    M = rank_maximal_matching(ranked_graph(p1))
    assert len(M) == oracle.max_size(p1) == 3
    assert signature(M, ranked_graph(p1)) == oracle.best_signature(p1)


def test_ranked_graph_needs_full_baseline():
    G = build_graph(walkthrough())
    with pytest.raises(ValueError):
        RankedGraph(G, ("d1", "d2"))


@given(instances(max_n=4, max_m=4))
def test_max_matching_matches_enumeration(inst):
    M = max_matching(build_graph(inst))
    assert validate_matching(inst, M).individually_rational
    assert len(M) == oracle.max_size(inst)


@given(instances(max_n=4, max_m=5))
def test_can_match_all_is_halls_condition(inst):
    G = build_graph(inst)
    for r in range(inst.m + 1):
        for W in combinations(inst.institutions, r):
            assert can_match_all(G, W) == oracle.hall_coverable(inst, W)


@given(instances(max_n=4, max_m=4))
def test_rank_maximal_against_enumeration(inst):
    RG = ranked_graph(inst)
    M = rank_maximal_matching(RG)
    W = lexi_optimal_set(RG.graph, inst.baseline)
    assert M.matched_institutions() == W == oracle.lexi_best_coverable(inst)
    assert len(M) == len(max_matching(RG.graph))
    best = signature(M, RG)
    assert best == oracle.best_signature(inst)
    for other in oracle.all_matchings(inst):
        assert lex_compare(best, signature(other, RG)) is not Lex.STRICTLY_WORSE


def test_max_matching_is_deterministic():
    inst = no_block()
    assert max_matching(build_graph(inst)) == max_matching(build_graph(inst))
