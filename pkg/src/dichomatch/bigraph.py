"""Bipartite acceptability graphs and the matching engine behind the mechanisms.

Institutions form the left side, agents the right.  Adjacency lists keep the
instance's agent order so every search below is deterministic.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .instance import Instance, Matching, MatchingError


@dataclass(frozen=True)
class BiGraph:
    """Acceptability graph; vertices without edges are left out."""

    left: tuple  # institutions
    right: tuple  # agents
    adj: Mapping[str, tuple]  # institution -> agents

    @property
    def edges(self) -> frozenset:
        return frozenset((d, a) for d in self.left for a in self.adj[d])

    def neighbors(self, d: str) -> tuple:
        return self.adj.get(d, ())

    def has_edge(self, d: str, a: str) -> bool:
        return a in self.adj.get(d, ())

    def num_edges(self) -> int:
        return sum(len(v) for v in self.adj.values())

    def restrict(self, institutions: Iterable[str]) -> "BiGraph":
        keep = set(institutions)
        return _make_graph([d for d in self.left if d in keep], self.right, self.adj)

    def remove(self, institutions: Iterable[str] = (), agents: Iterable[str] = ()) -> "BiGraph":
        drop_d, drop_a = set(institutions), set(agents)
        adj = {d: tuple(a for a in self.adj[d] if a not in drop_a) for d in self.left if d not in drop_d}
        return _make_graph(list(adj), self.right, adj)


def _make_graph(left, right_order, adj) -> BiGraph:
    adj = {d: tuple(adj[d]) for d in left if adj.get(d)}
    used = {a for v in adj.values() for a in v}
    return BiGraph(tuple(adj), tuple(a for a in right_order if a in used), adj)


def build_graph(inst: Instance) -> BiGraph:
    adj = {d: tuple(a for a in inst.agents if d in inst.accept[a]) for d in inst.institutions}
    return _make_graph(inst.institutions, inst.agents, adj)


@dataclass(frozen=True)
class RankedGraph:
    """A graph whose edges at institution ``baseline[k]`` carry rank ``k + 1``."""

    graph: BiGraph
    baseline: tuple

    def __post_init__(self):
        object.__setattr__(self, "baseline", tuple(self.baseline))
        if len(set(self.baseline)) != len(self.baseline) or not set(self.graph.left) <= set(self.baseline):
            raise ValueError("baseline must rank every institution of the graph exactly once")

    @property
    def rank(self) -> dict:
        return {d: k + 1 for k, d in enumerate(self.baseline)}


def ranked_graph(inst: Instance) -> RankedGraph:
    return RankedGraph(build_graph(inst), inst.baseline)


# ---------------------------------------------------------------------------
# Augmenting-path engine


class _Engine:
    """Mutable matching state over an integer-indexed copy of a graph."""

    def __init__(self, left: Sequence[str], right: Sequence[str], adj: Mapping[str, Sequence[str]]):
        self.left = list(left)
        self.right = list(right)
        aidx = {a: k for k, a in enumerate(self.right)}
        self.dix = {d: k for k, d in enumerate(self.left)}
        self.aidx = aidx
        self.adj = [[aidx[a] for a in adj.get(d, ())] for d in self.left]
        self.mate_d = [-1] * len(self.left)
        self.mate_a = [-1] * len(self.right)
        self.dead_d = [False] * len(self.left)
        self.dead_a = [False] * len(self.right)
        self._seen = [0] * len(self.right)
        self._stamp = 0

    @classmethod
    def from_graph(cls, G: BiGraph) -> "_Engine":
        return cls(G.left, G.right, G.adj)

    def augment(self, root: int) -> bool:
        """Find an alternating path from free institution ``root`` to a free agent and flip it."""
        adj, mate_a, dead_a = self.adj, self.mate_a, self.dead_a
        # Cheap first pass: a directly reachable free agent.
        for a in adj[root]:
            if mate_a[a] < 0 and not dead_a[a]:
                self._link(root, a)
                return True
        self._stamp += 1
        stamp, seen = self._stamp, self._seen
        # Iterative DFS; stack holds (institution, next neighbour position).
        stack = [[root, 0]]
        via = []  # agent chosen at each stack level
        while stack:
            top = stack[-1]
            d, pos = top
            nbrs = adj[d]
            advanced = False
            while pos < len(nbrs):
                a = nbrs[pos]
                pos += 1
                if seen[a] == stamp or dead_a[a]:
                    continue
                seen[a] = stamp
                nxt = mate_a[a]
                if nxt < 0:
                    top[1] = pos
                    via.append(a)
                    for (dd, _), aa in zip(stack, via):
                        self._link(dd, aa)
                    return True
                if self.dead_d[nxt]:
                    continue
                top[1] = pos
                via.append(a)
                stack.append([nxt, 0])
                advanced = True
                break
            if not advanced:
                top[1] = pos
                stack.pop()
                if via:
                    via.pop()
        return False

    def _link(self, d: int, a: int) -> None:
        self.mate_d[d] = a
        self.mate_a[a] = d

    def unmatch(self, d: int) -> int:
        a = self.mate_d[d]
        if a >= 0:
            self.mate_d[d] = -1
            self.mate_a[a] = -1
        return a

    def snapshot(self):
        return self.mate_d[:], self.mate_a[:]

    def restore(self, snap) -> None:
        self.mate_d, self.mate_a = snap[0][:], snap[1][:]

    def hopcroft_karp(self) -> int:
        """Grow the current matching to maximum size with layered phases."""
        adj, mate_d, mate_a = self.adj, self.mate_d, self.mate_a
        nl = len(self.left)
        INF = float("inf")
        live = [d for d in range(nl) if not self.dead_d[d]]
        while True:
            dist = [INF] * nl
            q = deque()
            for d in live:
                if mate_d[d] < 0:
                    dist[d] = 0
                    q.append(d)
            found = INF
            while q:
                d = q.popleft()
                if dist[d] >= found:
                    continue
                for a in adj[d]:
                    if self.dead_a[a]:
                        continue
                    nd = mate_a[a]
                    if nd < 0:
                        found = min(found, dist[d] + 1)
                    elif dist[nd] == INF:
                        dist[nd] = dist[d] + 1
                        q.append(nd)
            if found == INF:
                break
            ptr = [0] * nl
            grew = False
            for root in live:
                if mate_d[root] >= 0:
                    continue
                # Layered DFS restricted to dist-increasing edges.
                stack = [root]
                path = []
                while stack:
                    d = stack[-1]
                    nbrs = adj[d]
                    moved = False
                    while ptr[d] < len(nbrs):
                        a = nbrs[ptr[d]]
                        ptr[d] += 1
                        if self.dead_a[a]:
                            continue
                        nd = mate_a[a]
                        if nd < 0:
                            if dist[d] + 1 == found:
                                path.append(a)
                                for dd, aa in zip(stack, path):
                                    mate_d[dd] = aa
                                    mate_a[aa] = dd
                                stack = []
                                grew = True
                                moved = True
                                break
                        elif dist[nd] == dist[d] + 1:
                            path.append(a)
                            stack.append(nd)
                            moved = True
                            break
                    if not moved:
                        dist[d] = INF
                        stack.pop()
                        if path:
                            path.pop()
            if not grew:
                break
        return sum(1 for d in range(nl) if mate_d[d] >= 0)

    def matching(self) -> Matching:
        return Matching(
            frozenset((self.right[a], self.left[d]) for d, a in enumerate(self.mate_d) if a >= 0)
        )


def max_matching(G: BiGraph) -> Matching:
    """A maximum-cardinality matching (Hopcroft-Karp)."""
    eng = _Engine.from_graph(G)
    eng.hopcroft_karp()
    return eng.matching()


def can_match_all(G: BiGraph, W: Iterable[str]) -> bool:
    """True iff one matching covers every institution in ``W``."""
    W = set(W)
    if not W:
        return True
    if not W <= set(G.left):
        return False
    sub = G.restrict(W)
    eng = _Engine.from_graph(sub)
    return eng.hopcroft_karp() == len(W)


class Lex(enum.Enum):
    STRICTLY_BETTER = 1
    EQUAL = 0
    STRICTLY_WORSE = -1


def signature(M: Matching, RG: RankedGraph) -> tuple:
    """Per-rank counts of matched edges."""
    rank = RG.rank
    counts = [0] * len(RG.baseline)
    for a, d in M.pairs:
        if not RG.graph.has_edge(d, a):
            raise MatchingError(f"pair ({a}, {d}) is not an edge of the graph")
        counts[rank[d] - 1] += 1
    return tuple(counts)


def lex_compare(a: Sequence[int], b: Sequence[int]) -> Lex:
    if len(a) != len(b):
        raise ValueError("signatures differ in length")
    for x, y in zip(a, b):
        if x != y:
            return Lex.STRICTLY_BETTER if x > y else Lex.STRICTLY_WORSE
    return Lex.EQUAL


def _lexi_engine(G: BiGraph, baseline: Sequence[str]) -> tuple[_Engine, list[str]]:
    order = [d for d in baseline if d in G.adj]
    eng = _Engine(order, G.right, G.adj)
    W = [d for k, d in enumerate(order) if eng.augment(k)]
    return eng, W


def lexi_optimal_set(G: BiGraph, baseline: Sequence[str]) -> frozenset:
    """Greedy in baseline order: keep ``d`` whenever ``W + {d}`` stays coverable.

    Each test is a single augmenting-path search from ``d`` against a matching
    that already covers ``W``; ``W + {d}`` is coverable exactly when such a path
    exists.
    """
    return frozenset(_lexi_engine(G, baseline)[1])


def rank_maximal_matching(RG: RankedGraph) -> Matching:
    """A matching covering the lexi-optimal institution set, hence rank-maximal."""
    eng, _ = _lexi_engine(RG.graph, RG.baseline)
    return eng.matching()
