"""Equal/under/over-acceptable institution sets and safe blocks.

A safe block is a minimal set of k institutions whose acceptance lists
together contain exactly k agents.  Enumeration is exponential in the number
of institutions, so it is guarded by ``MAX_BLOCK_INSTITUTIONS``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .bigraph import BiGraph, _Engine
from .instance import Matching

MAX_BLOCK_INSTITUTIONS = 20


class BlockEnumerationError(ValueError):
    pass


class Acceptability(enum.Enum):
    EQUAL = "equal"
    UNDER = "under"
    OVER = "over"


@dataclass(frozen=True)
class SetClass:
    kind: Acceptability
    size: int
    num_agents: int


@dataclass(frozen=True)
class SafeBlock:
    institutions: tuple
    agents: tuple

    @property
    def k(self) -> int:
        return len(self.institutions)


def _agents_of(G: BiGraph, S: Iterable[str]) -> set:
    out = set()
    for d in S:
        out.update(G.adj[d])
    return out


def _check_set(G: BiGraph, S) -> set:
    S = set(S)
    if not S:
        raise ValueError("institution set must be non-empty")
    nulls = S - set(G.left)
    if nulls:
        raise ValueError(f"null-institution(s) {sorted(nulls)} cannot be classified")
    return S


def classify(G: BiGraph, S: Iterable[str]) -> SetClass:
    S = _check_set(G, S)
    k, na = len(S), len(_agents_of(G, S))
    if na == k:
        kind = Acceptability.EQUAL
    elif na < k:
        kind = Acceptability.UNDER
    else:
        kind = Acceptability.OVER
    return SetClass(kind, k, na)


def is_safe_block(G: BiGraph, S: Iterable[str]) -> bool:
    S = _check_set(G, S)
    if classify(G, S).kind is not Acceptability.EQUAL:
        return False
    items = sorted(S)
    for r in range(1, len(items)):
        for sub in combinations(items, r):
            if len(_agents_of(G, sub)) == r:
                return False
    return True


def _block_masks(nbr: Sequence[int], cap: int = MAX_BLOCK_INSTITUTIONS, stop_at_first: bool = False) -> list[int]:
    """Safe blocks of institutions ``0..len(nbr)-1`` as index bitmasks.

    ``nbr[k]`` is the agent bitmask of institution ``k`` (non-zero).  Results
    come by size, then lexicographically by index.  With ``stop_at_first`` the
    search ends as soon as a block containing index 0 is found, which is all a
    caller choosing the lowest-index block member needs.
    """
    m = len(nbr)
    if m > cap:
        raise BlockEnumerationError(f"{m} institutions exceed the enumeration cap of {cap}")
    found: list[int] = []
    for k in range(1, m + 1):
        for combo in combinations(range(m), k):
            mask = 0
            agents = 0
            for j in combo:
                mask |= 1 << j
                agents |= nbr[j]
            if agents.bit_count() != k:
                continue
            if any(b & mask == b for b in found):
                continue
            found.append(mask)
            if stop_at_first and mask & 1:
                return found
    return found


def find_safe_blocks(
    G: BiGraph, baseline: Sequence[str] | None = None, cap: int = MAX_BLOCK_INSTITUTIONS
) -> list[SafeBlock]:
    """All safe blocks of ``G``, ordered by size and then by baseline position."""
    order = [d for d in (baseline if baseline is not None else G.left) if d in G.adj]
    aidx = {a: k for k, a in enumerate(G.right)}
    nbr = []
    for d in order:
        mask = 0
        for a in G.adj[d]:
            mask |= 1 << aidx[a]
        nbr.append(mask)
    blocks = []
    for bm in _block_masks(nbr, cap):
        insts = tuple(order[j] for j in range(len(order)) if bm >> j & 1)
        agents = _agents_of(G, insts)
        blocks.append(SafeBlock(insts, tuple(a for a in G.right if a in agents)))
    return blocks


def block_cover_matching(G: BiGraph, B: SafeBlock, forced: tuple | None = None) -> Matching:
    """Perfect matching of a safe block's institutions onto its agents.

    ``forced`` is an optional ``(institution, agent)`` pair the matching must
    contain.  Failure means ``B`` was not a safe block of ``G``.
    """
    sub = G.restrict(B.institutions)
    eng = _Engine.from_graph(sub)
    if forced is not None:
        d, a = forced
        if d not in eng.dix or a not in sub.adj[d]:
            raise ValueError(f"forced pair {forced} is not an edge of the block")
        di, ai = eng.dix[d], eng.aidx[a]
        eng._link(di, ai)
        eng.dead_d[di] = True
        eng.dead_a[ai] = True
        todo = [k for k in range(len(eng.left)) if k != di]
    else:
        todo = range(len(eng.left))
    for k in todo:
        if not eng.augment(k):
            raise RuntimeError(f"safe block {B.institutions} admits no cover; graph invariant broken")
    return eng.matching()


# ---------------------------------------------------------------------------
# Executable lemma checks.  Each returns a counterexample, or None.


def _agent_masks(G: BiGraph) -> list[int]:
    aidx = {a: k for k, a in enumerate(G.right)}
    out = []
    for d in G.left:
        mask = 0
        for a in G.adj[d]:
            mask |= 1 << aidx[a]
        out.append(mask)
    return out


def under_acceptable_without_block(G: BiGraph, cap: int = MAX_BLOCK_INSTITUTIONS):
    """An under-acceptable institution set containing no safe block."""
    nbr = _agent_masks(G)
    blocks = _block_masks(nbr, cap)
    m = len(nbr)
    for S in range(1, 1 << m):
        agents = 0
        for j in range(m):
            if S >> j & 1:
                agents |= nbr[j]
        if agents.bit_count() < S.bit_count() and not any(b & S == b for b in blocks):
            return tuple(G.left[j] for j in range(m) if S >> j & 1)
    return None


def uncoverable_block(G: BiGraph, cap: int = MAX_BLOCK_INSTITUTIONS):
    """A safe block, optionally with a forced pair, that has no perfect matching."""
    for B in find_safe_blocks(G, cap=cap):
        try:
            block_cover_matching(G, B)
            for d in B.institutions:
                for a in G.adj[d]:
                    block_cover_matching(G, B, (d, a))
        except RuntimeError:
            return B
    return None


def first_pick_not_extendable(G: BiGraph, cap: int = MAX_BLOCK_INSTITUTIONS):
    """Without safe blocks, an edge whose removal costs more than one matched pair."""
    if _block_masks(_agent_masks(G), cap):
        return None
    eng = _Engine.from_graph(G)
    full = eng.hopcroft_karp()
    for d in G.left:
        for a in G.adj[d]:
            rest = _Engine.from_graph(G.remove([d], [a]))
            if rest.hopcroft_karp() != full - 1:
                return (d, a)
    return None
