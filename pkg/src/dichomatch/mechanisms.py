"""SAFE, Rank-Maximal, deferred acceptance, sequential matching, and fairness repair."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .bigraph import _Engine, build_graph, max_matching
from .blocks import MAX_BLOCK_INSTITUTIONS, _block_masks
from .instance import Instance, Matching, validate_matching


@dataclass(frozen=True)
class TraceStep:
    remaining: tuple  # ((institution, residual acceptance list), ...) in baseline order
    blocks: tuple  # safe blocks present at this step (SAFE only)
    institution: str
    agent: str


@dataclass(frozen=True)
class MechanismTrace:
    steps: tuple = ()
    lexi_set: tuple | None = None  # Rank-Maximal only

    @property
    def realized_order(self) -> tuple:
        """Institutions in the order they were assigned."""
        return tuple(s.institution for s in self.steps)

    def format(self) -> str:
        lines = []
        if self.lexi_set is not None:
            lines.append("W = {" + ", ".join(self.lexi_set) + "}")
        for k, s in enumerate(self.steps, 1):
            lines.append(f"Step {k}:")
            for d, lst in s.remaining:
                mark = " ".join(f"[{a}]" if d == s.institution and a == s.agent else a for a in lst)
                lines.append(f"  {d}: {mark}".rstrip())
            if s.blocks:
                lines.append("  safe blocks: " + " ".join("{" + ",".join(b) + "}" for b in s.blocks))
            lines.append(f"  -> {s.institution} <- {s.agent}")
        return "\n".join(lines) + ("\n" if lines else "")


# A tie-break fixes a strict order over each agent's acceptable institutions.
TieBreak = Mapping[str, Sequence[str]]


def _check_permutation(pi: Sequence[str], inst: Instance) -> tuple:
    pi = tuple(pi)
    if len(pi) != inst.m or set(pi) != set(inst.institutions):
        raise ValueError("pi must be a permutation of the institutions")
    return pi


def pi_sequential(inst: Instance, pi: Sequence[str]) -> Matching:
    """Each institution in ``pi`` order takes its best still-unassigned acceptor."""
    pi = _check_permutation(pi, inst)
    lists = inst.acceptance_lists()
    taken = set()
    pairs = []
    for d in pi:
        for a in lists[d]:
            if a not in taken:
                taken.add(a)
                pairs.append((a, d))
                break
    return Matching(frozenset(pairs))


def _residual(order, lists, gone_d, gone_a):
    return tuple(
        (d, tuple(a for a in lists[d] if a not in gone_a)) for d in order if d not in gone_d
    )


def safe_mechanism(inst: Instance, cap: int = MAX_BLOCK_INSTITUTIONS) -> tuple[Matching, MechanismTrace]:
    """Sequential allocation steered by safe blocks.

    While edges remain: if the residual graph has a safe block, the
    highest-baseline institution belonging to any safe block moves next;
    otherwise the highest-baseline institution still holding an acceptor does.
    It takes its top remaining acceptor and both leave the graph.
    """
    lists = inst.acceptance_lists()
    order = inst.baseline
    aidx = {a: k for k, a in enumerate(inst.agents)}
    full = {d: sum(1 << aidx[a] for a in lists[d]) for d in order}
    gone_d: set = set()
    gone_a: set = set()
    free_mask = (1 << inst.n) - 1
    pairs = []
    steps = []
    while True:
        active = [d for d in order if d not in gone_d and full[d] & free_mask]
        if not active:
            break
        nbr = [full[d] & free_mask for d in active]
        masks = _block_masks(nbr, cap)
        if masks:
            union = 0
            for b in masks:
                union |= b
            pick = (union & -union).bit_length() - 1
        else:
            pick = 0
        d = active[pick]
        a = next(x for x in lists[d] if x not in gone_a)
        blocks = tuple(tuple(active[j] for j in range(len(active)) if b >> j & 1) for b in masks)
        steps.append(TraceStep(_residual(active, lists, gone_d, gone_a), blocks, d, a))
        pairs.append((a, d))
        gone_d.add(d)
        gone_a.add(a)
        free_mask &= ~(1 << aidx[a])
    return Matching(frozenset(pairs)), MechanismTrace(tuple(steps))


def rankmax_mechanism(inst: Instance) -> tuple[Matching, MechanismTrace]:
    """Rank-Maximal: fix the lexi-optimal set ``W``, then fill it in baseline order.

    Each institution of ``W`` takes its best acceptor whose removal still lets
    every unfilled institution of ``W`` be covered.  Both phases run on one
    augmenting-path engine, so every feasibility test is a single path search.
    """
    G = build_graph(inst)
    lists = inst.acceptance_lists()
    order = [d for d in inst.baseline if d in G.adj]
    eng = _Engine(order, G.right, G.adj)
    W = [d for k, d in enumerate(order) if eng.augment(k)]
    in_w = set(W)
    for k, d in enumerate(order):
        if d not in in_w:
            eng.dead_d[k] = True
    pairs = []
    steps = []
    gone_d: set = set()
    gone_a: set = set()
    for c in W:
        ci = eng.dix[c]
        remaining = _residual(W, lists, gone_d, gone_a)
        chosen = None
        for a in lists[c]:
            ai = eng.aidx[a]
            if eng.dead_a[ai]:
                continue
            snap = eng.snapshot()
            eng.unmatch(ci)
            eng.dead_d[ci] = True
            other = eng.mate_a[ai]
            ok = True
            if other >= 0:
                eng.unmatch(other)
                eng.dead_a[ai] = True
                ok = eng.augment(other)
            if ok:
                eng._link(ci, ai)
                eng.dead_a[ai] = True
                chosen = a
                break
            eng.restore(snap)
            eng.dead_d[ci] = False
            eng.dead_a[ai] = False
        if chosen is None:
            raise RuntimeError(f"no feasible agent for {c}; lexi-optimal set invariant broken")
        pairs.append((chosen, c))
        steps.append(TraceStep(remaining, (), c, chosen))
        gone_d.add(c)
        gone_a.add(chosen)
    return Matching(frozenset(pairs)), MechanismTrace(tuple(steps), tuple(W))


def default_tiebreak(inst: Instance) -> dict:
    """Each agent ranks its acceptable institutions in baseline order."""
    return {a: [d for d in inst.baseline if d in inst.accept[a]] for a in inst.agents}


def da_mechanism(inst: Instance, tb: TieBreak) -> Matching:
    """Agent-proposing deferred acceptance with strict agent orders from ``tb``."""
    orders = {}
    for a in inst.agents:
        lst = tuple(tb.get(a, ()))
        if len(lst) != len(inst.accept[a]) or set(lst) != inst.accept[a]:
            raise ValueError(f"tie-break for agent {a} is not a permutation of its acceptable set")
        orders[a] = lst
    nxt = {a: 0 for a in inst.agents}
    held: dict = {}
    free = [a for a in reversed(inst.agents)]
    while free:
        a = free.pop()
        if nxt[a] >= len(orders[a]):
            continue
        d = orders[a][nxt[a]]
        nxt[a] += 1
        cur = held.get(d)
        if cur is None:
            held[d] = a
            continue
        rank = inst.rank_of(d)
        if rank[a] < rank[cur]:
            held[d] = a
            free.append(cur)
        else:
            free.append(a)
    return Matching.from_institutions(held)


def da_with_orders(orders: dict) -> Callable[[Instance], Matching]:
    """DA as a mechanism of the instance alone.

    ``orders`` gives each agent a strict order over any institutions; on a
    given instance it is restricted to the agent's reported acceptable set,
    with unlisted institutions appended in baseline order.  This keeps the
    tie-break fixed while an audit varies acceptance reports.
    """
    orders = {a: tuple(v) for a, v in orders.items()}

    def run(inst: Instance) -> Matching:
        tb = {}
        for a in inst.agents:
            acc = inst.accept[a]
            head = [d for d in orders.get(a, ()) if d in acc]
            tb[a] = head + [d for d in inst.baseline if d in acc and d not in head]
        return da_mechanism(inst, tb)

    run.__name__ = "da"
    return run


class PreconditionError(ValueError):
    pass


def fairify(inst: Instance, M: Matching, with_steps: bool = False):
    """Repair a maximum IR matching into a fair one of the same size.

    Repeatedly lets an unmatched agent displace a lower-priority holder at an
    institution she accepts.  Every replacement strictly raises the holder's
    priority at that institution, so the loop stops after at most n*m steps.
    """
    rep = validate_matching(inst, M)
    if not rep.individually_rational:
        raise PreconditionError(f"matching is not individually rational: {rep.violations}")
    if len(M) != len(max_matching(build_graph(inst))):
        raise PreconditionError("matching is not of maximum size")
    held = M.by_institution()
    steps = 0
    while True:
        matched = set(held.values())
        swap = None
        for a in inst.agents:
            if a in matched:
                continue
            for d in inst.baseline:
                if d not in inst.accept[a]:
                    continue
                cur = held.get(d)
                if cur is None or inst.rank_of(d)[a] < inst.rank_of(d)[cur]:
                    swap = (a, d)
                    break
            if swap:
                break
        if swap is None:
            break
        a, d = swap
        held[d] = a
        steps += 1
    out = Matching.from_institutions(held)
    return (out, steps) if with_steps else out


def _safe(inst):
    return safe_mechanism(inst)[0]


def _rankmax(inst):
    return rankmax_mechanism(inst)[0]


def _da(inst):
    return da_mechanism(inst, default_tiebreak(inst))


def _seq(inst):
    return pi_sequential(inst, inst.baseline)


MECHANISMS: dict[str, Callable[[Instance], Matching]] = {
    "safe": _safe,
    "rankmax": _rankmax,
    "da": _da,
    "seq": _seq,
}


def get_mechanism(name: str) -> Callable[[Instance], Matching]:
    try:
        return MECHANISMS[name]
    except KeyError:
        raise ValueError(f"unknown mechanism {name!r}; choose from {sorted(MECHANISMS)}") from None
