"""Brute-force references used to cross-check the polynomial routines.

Everything here enumerates matchings or subsets outright; keep inputs tiny.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

from .instance import Instance, Matching


def all_matchings(inst: Instance) -> list[Matching]:
    """Every individually rational matching, the empty one included."""
    out = []
    pairs: list = []

    def rec(k, used):
        if k == inst.m:
            out.append(Matching(frozenset(pairs)))
            return
        d = inst.institutions[k]
        rec(k + 1, used)
        for a in inst.agents:
            if d in inst.accept[a] and a not in used:
                pairs.append((a, d))
                rec(k + 1, used | {a})
                pairs.pop()

    rec(0, frozenset())
    return out


def max_size(inst: Instance) -> int:
    return max(len(M) for M in all_matchings(inst))


def brute_signature(inst: Instance, M: Matching) -> tuple:
    pos = {d: k for k, d in enumerate(inst.baseline)}
    x = [0] * inst.m
    for _, d in M.pairs:
        x[pos[d]] += 1
    return tuple(x)


def best_signature(inst: Instance) -> tuple:
    """Lexicographically largest signature over all IR matchings."""
    return max(brute_signature(inst, M) for M in all_matchings(inst))


def rank_maximal_sets(inst: Instance) -> set:
    best = best_signature(inst)
    return {M.matched_institutions() for M in all_matchings(inst) if brute_signature(inst, M) == best}


def neighborhood(inst: Instance, S: Iterable[str]) -> set:
    S = set(S)
    return {a for a in inst.agents if inst.accept[a] & S}


def hall_coverable(inst: Instance, W: Iterable[str]) -> bool:
    """Hall's condition: every non-empty subset has at least as many acceptors."""
    W = sorted(W)
    for r in range(1, len(W) + 1):
        for S in combinations(W, r):
            if len(neighborhood(inst, S)) < r:
                return False
    return True


def lexi_best_coverable(inst: Instance) -> frozenset:
    """Baseline-lexicographically best coverable institution set, by scanning all subsets."""
    order = list(inst.baseline)
    best = None
    best_key = None
    for mask in range(1 << len(order)):
        S = [order[j] for j in range(len(order)) if mask >> j & 1]
        if not hall_coverable(inst, S):
            continue
        key = tuple(1 if mask >> j & 1 else 0 for j in range(len(order)))
        if best_key is None or key > best_key:
            best, best_key = frozenset(S), key
    return best
