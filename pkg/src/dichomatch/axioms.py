"""Axiom checks on matchings and manipulation audits on mechanisms.

Every check returns an :class:`AuditReport`.  A violated report carries a
witness that :func:`recheck` can confirm independently.

Institutions rank outcomes by priority, with "unmatched" strictly worst.
Agents are dichotomous: any acceptable institution beats being unmatched.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from typing import Callable

from .bigraph import build_graph, max_matching
from .instance import Instance, Matching, MatchingError, validate_matching
from .mechanisms import get_mechanism

Mechanism = Callable[[Instance], Matching]

HOLDS = "holds"
VIOLATED = "violated"

D_EFFICIENCY_CAP = 8  # max n and m for IR-matching enumeration
AGENT_SP_CAP = 12  # max m, i.e. 2**m misreports per agent
INSTITUTION_SP_EXHAUSTIVE_N = 6
INSTITUTION_SP_SAMPLES = 500


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class AuditReport:
    instance: str  # digest
    mechanism: str
    axiom: str
    verdict: str
    witness: dict | None = field(default=None, compare=False)

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def to_json(self) -> str:
        return json.dumps(
            {
                "instance": self.instance,
                "mechanism": self.mechanism,
                "axiom": self.axiom,
                "verdict": self.verdict,
                "witness": self.witness,
            },
            sort_keys=False,
        )


def _digest(inst: Instance) -> str:
    d = inst._cache.get("digest")
    if d is None:
        d = inst._cache["digest"] = inst.digest()
    return d


def _report(inst, mech, axiom, witness=None) -> AuditReport:
    return AuditReport(_digest(inst), mech, axiom, VIOLATED if witness else HOLDS, witness)


def _feasible(inst: Instance, M: Matching):
    last = inst._cache.get("validated")
    if last is not None and last[0] is M:
        return last[1]
    try:
        rep = validate_matching(inst, M)
    except MatchingError as exc:
        raise MatchingError(f"infeasible matching: {exc}") from None
    inst._cache["validated"] = (M, rep)
    return rep


def _max_size(inst: Instance) -> int:
    size = inst._cache.get("maxsize")
    if size is None:
        size = inst._cache["maxsize"] = len(max_matching(build_graph(inst)))
    return size


# ---------------------------------------------------------------------------
# Matching-level axioms


def check_ir(inst: Instance, M: Matching, mechanism: str = "") -> AuditReport:
    rep = _feasible(inst, M)
    w = {"pairs": [list(p) for p in rep.violations]} if rep.violations else None
    return _report(inst, mechanism, "ir", w)


def check_fair(inst: Instance, M: Matching, mechanism: str = "", strict: bool = True) -> AuditReport:
    """No unmatched agent outranks the holder of an institution she accepts.

    With ``strict`` (default) an unmatched agent facing an unmatched
    acceptable institution also counts as a violation.
    """
    rep = _feasible(inst, M)
    if not rep.individually_rational:
        raise MatchingError("fairness is defined for individually rational matchings")
    held = M.by_institution()
    matched = M.matched_agents()
    for a in inst.agents:
        if a in matched:
            continue
        for d in inst.institutions:
            if d not in inst.accept[a]:
                continue
            cur = held.get(d)
            if cur is None:
                if strict:
                    return _report(inst, mechanism, "fair", {"agent": a, "institution": d, "holder": None})
            elif inst.rank_of(d)[a] < inst.rank_of(d)[cur]:
                return _report(inst, mechanism, "fair", {"agent": a, "institution": d, "holder": cur})
    return _report(inst, mechanism, "fair")


def check_maximum(inst: Instance, M: Matching, mechanism: str = "") -> AuditReport:
    _feasible(inst, M)
    best = _max_size(inst)
    w = {"size": len(M), "maximum": best} if len(M) != best else None
    return _report(inst, mechanism, "maximum", w)


def check_n_efficiency(inst: Instance, M: Matching, mechanism: str = "") -> AuditReport:
    """Pareto-efficiency for agents: individually rational and maximum size."""
    rep = _feasible(inst, M)
    w = None
    if not rep.individually_rational:
        w = {"non_ir_pairs": [list(p) for p in rep.violations]}
    elif len(M) != _max_size(inst):
        w = {"size": len(M), "maximum": _max_size(inst)}
    return _report(inst, mechanism, "n_efficiency", w)


@lru_cache(maxsize=4096)
def _ir_matchings(adj: tuple, n_agents: int) -> tuple:
    """All matchings of a graph given as per-institution agent-index tuples.

    Each matching is a tuple of agent indices per institution (-1 = unmatched).
    """
    out = []
    cur = [-1] * len(adj)

    def rec(k, used):
        if k == len(adj):
            out.append(tuple(cur))
            return
        cur[k] = -1
        rec(k + 1, used)
        for a in adj[k]:
            if not used >> a & 1:
                cur[k] = a
                rec(k + 1, used | 1 << a)
        cur[k] = -1

    rec(0, 0)
    return tuple(out)


def _outcome_ranks(inst: Instance, assign: tuple) -> list:
    n = inst.n
    return [n if a < 0 else inst.rank_of(d)[inst.agents[a]] for d, a in zip(inst.institutions, assign)]


def check_d_efficiency(
    inst: Instance, M: Matching, mechanism: str = "", cap: int = D_EFFICIENCY_CAP
) -> AuditReport:
    """Pareto-efficiency for institutions, against every IR matching."""
    if inst.n > cap or inst.m > cap:
        raise CapExceeded(f"D-efficiency enumeration capped at n, m <= {cap}")
    _feasible(inst, M)
    aidx = {a: k for k, a in enumerate(inst.agents)}
    adj = tuple(tuple(aidx[a] for a in inst.agents if d in inst.accept[a]) for d in inst.institutions)
    held = M.by_institution()
    mine = _outcome_ranks(inst, tuple(aidx[held[d]] if d in held else -1 for d in inst.institutions))
    # Precompute each institution's rank of each agent index.
    rk = [[inst.rank_of(d)[a] for a in inst.agents] for d in inst.institutions]
    n = inst.n
    for other in _ir_matchings(adj, n):
        better = False
        for k, a in enumerate(other):
            r = n if a < 0 else rk[k][a]
            if r > mine[k]:
                break
            if r < mine[k]:
                better = True
        else:
            if better:
                dom = {inst.institutions[k]: inst.agents[a] for k, a in enumerate(other) if a >= 0}
                return _report(inst, mechanism, "d_efficiency", {"dominating": dom})
    return _report(inst, mechanism, "d_efficiency")


def check_both_efficiency(inst: Instance, M: Matching, mechanism: str = "", cap: int = D_EFFICIENCY_CAP) -> AuditReport:
    n_rep = check_n_efficiency(inst, M, mechanism)
    d_rep = check_d_efficiency(inst, M, mechanism, cap)
    w = None
    if not (n_rep.holds and d_rep.holds):
        w = {"n_efficiency": n_rep.witness, "d_efficiency": d_rep.witness}
    return _report(inst, mechanism, "both_efficiency", w)


def check_non_wasteful(inst: Instance, M: Matching, mechanism: str = "") -> AuditReport:
    _feasible(inst, M)
    held = M.by_institution()
    matched = M.matched_agents()
    for a in inst.agents:
        if a in matched:
            continue
        for d in inst.institutions:
            if d in inst.accept[a] and d not in held:
                return _report(inst, mechanism, "non_wasteful", {"agent": a, "institution": d})
    return _report(inst, mechanism, "non_wasteful")


# ---------------------------------------------------------------------------
# Mechanism-level audits


def _resolve(mechanism) -> tuple[Mechanism, str]:
    if isinstance(mechanism, str):
        return get_mechanism(mechanism), mechanism
    return mechanism, getattr(mechanism, "__name__", "mechanism")


def _subsets(items: tuple):
    for mask in range(1 << len(items)):
        yield frozenset(items[j] for j in range(len(items)) if mask >> j & 1)


def audit_agent_sp(
    inst: Instance, mechanism, name: str | None = None, cap: int = AGENT_SP_CAP, weak: bool = False
) -> AuditReport:
    """Search every acceptability misreport of every unmatched agent.

    Under dichotomous preferences only an unmatched agent can gain, and only
    by ending up at an institution she truly accepts.  The weak and strong
    notions therefore coincide for individually rational mechanisms, and
    ``weak`` only changes the axiom name on the report.
    """
    if inst.m > cap:
        raise CapExceeded(f"agent misreport search capped at m <= {cap}")
    axiom = "weak_agent_sp" if weak else "agent_sp"
    mech, default = _resolve(mechanism)
    name = name or default
    truth = mech(inst)
    matched = truth.matched_agents()
    for a in inst.agents:
        if a in matched:
            continue
        for lie in _subsets(inst.institutions):
            if lie == inst.accept[a]:
                continue
            got = mech(inst.with_accept(a, lie)).institution_of(a)
            if got is not None and got in inst.accept[a]:
                return _report(inst, name, axiom, {"agent": a, "report": sorted(lie), "gets": got})
    return _report(inst, name, axiom)


def audit_institution_sp(
    inst: Instance,
    mechanism,
    name: str | None = None,
    exhaustive_n: int = INSTITUTION_SP_EXHAUSTIVE_N,
    samples: int = INSTITUTION_SP_SAMPLES,
    seed: int = 0,
) -> AuditReport:
    """Search priority misreports of every institution.

    All n! orders are tried when ``n <= exhaustive_n``; otherwise ``samples``
    seeded random orders per institution.
    """
    mech, default = _resolve(mechanism)
    name = name or default
    truth = mech(inst).by_institution()
    rng = random.Random(seed) if inst.n > exhaustive_n else None
    for d in inst.institutions:
        rank = inst.rank_of(d)
        cur = truth.get(d)
        cur_r = inst.n if cur is None else rank[cur]
        if cur_r == 0:
            continue
        if inst.n <= exhaustive_n:
            lies = permutations(inst.agents)
        else:
            lies = (tuple(rng.sample(inst.agents, inst.n)) for _ in range(samples))
        for lie in lies:
            if lie == inst.prefs[d]:
                continue
            got = mech(inst.with_prefs(d, lie)).agent_of(d)
            if got is not None and rank[got] < cur_r:
                return _report(
                    inst, name, "institution_sp", {"institution": d, "report": list(lie), "gets": got, "truthful": cur}
                )
    return _report(inst, name, "institution_sp")


def audit_non_bossy(inst: Instance, mechanism, name: str | None = None, cap: int = AGENT_SP_CAP) -> AuditReport:
    """An unmatched agent who stays unmatched must not change the matching."""
    if inst.m > cap:
        raise CapExceeded(f"agent misreport search capped at m <= {cap}")
    mech, default = _resolve(mechanism)
    name = name or default
    truth = mech(inst)
    matched = truth.matched_agents()
    for a in inst.agents:
        if a in matched:
            continue
        for lie in _subsets(inst.institutions):
            if lie == inst.accept[a]:
                continue
            out = mech(inst.with_accept(a, lie))
            if out.institution_of(a) is None and out != truth:
                return _report(
                    inst,
                    name,
                    "non_bossy",
                    {
                        "agent": a,
                        "report": sorted(lie),
                        "truthful": sorted([d, x] for x, d in truth.pairs),
                        "misreport": sorted([d, x] for x, d in out.pairs),
                    },
                )
    return _report(inst, name, "non_bossy")


MATCHING_AXIOMS = {
    "ir": check_ir,
    "maximum": check_maximum,
    "fair": check_fair,
    "fair_weak": lambda inst, M, mech="": _renamed(check_fair(inst, M, mech, strict=False), "fair_weak"),
    "non_wasteful": check_non_wasteful,
    "n_efficiency": check_n_efficiency,
    "d_efficiency": check_d_efficiency,
    "both_efficiency": check_both_efficiency,
}

MECHANISM_AXIOMS = {
    "agent_sp": audit_agent_sp,
    "institution_sp": audit_institution_sp,
    "non_bossy": audit_non_bossy,
}

AXIOMS = tuple(MATCHING_AXIOMS) + tuple(MECHANISM_AXIOMS)


def _renamed(rep: AuditReport, axiom: str) -> AuditReport:
    return AuditReport(rep.instance, rep.mechanism, axiom, rep.verdict, rep.witness)


def audit(inst: Instance, mechanism, axiom: str, name: str | None = None) -> AuditReport:
    """Run one named axiom against one mechanism on one instance."""
    mech, default = _resolve(mechanism)
    name = name or default
    if axiom in MATCHING_AXIOMS:
        return MATCHING_AXIOMS[axiom](inst, mech(inst), name)
    if axiom in MECHANISM_AXIOMS:
        return MECHANISM_AXIOMS[axiom](inst, mech, name)
    raise ValueError(f"unknown axiom {axiom!r}; choose from {list(AXIOMS)}")


def recheck(inst: Instance, mechanism, report: AuditReport) -> bool:
    """Confirm a violated report's witness from scratch; True if it reproduces."""
    if report.holds:
        return False
    mech, _ = _resolve(mechanism)
    w = report.witness
    ax = report.axiom
    if ax in ("agent_sp", "weak_agent_sp"):
        got = mech(inst.with_accept(w["agent"], w["report"])).institution_of(w["agent"])
        return mech(inst).institution_of(w["agent"]) is None and got is not None and got in inst.accept[w["agent"]]
    if ax == "institution_sp":
        d = w["institution"]
        rank = inst.rank_of(d)
        got = mech(inst.with_prefs(d, w["report"])).agent_of(d)
        cur = mech(inst).agent_of(d)
        return got is not None and (cur is None or rank[got] < rank[cur])
    if ax == "non_bossy":
        a = w["agent"]
        truth, out = mech(inst), mech(inst.with_accept(a, w["report"]))
        return truth.institution_of(a) is None and out.institution_of(a) is None and truth != out
    M = mech(inst)
    if ax in ("fair", "fair_weak"):
        a, d, holder = w["agent"], w["institution"], w["holder"]
        if a in M.matched_agents() or d not in inst.accept[a] or M.agent_of(d) != holder:
            return False
        return holder is None or inst.rank_of(d)[a] < inst.rank_of(d)[holder]
    if ax == "d_efficiency":
        dom = Matching.from_institutions(w["dominating"])
        if not validate_matching(inst, dom).individually_rational:
            return False
        held = M.by_institution()
        r_old = [inst.n if d not in held else inst.rank_of(d)[held[d]] for d in inst.institutions]
        new = dom.by_institution()
        r_new = [inst.n if d not in new else inst.rank_of(d)[new[d]] for d in inst.institutions]
        return all(x <= y for x, y in zip(r_new, r_old)) and r_new != r_old
    if ax == "non_wasteful":
        a, d = w["agent"], w["institution"]
        return a not in M.matched_agents() and d not in M.matched_institutions() and d in inst.accept[a]
    return not MATCHING_AXIOMS[ax](inst, M).holds
