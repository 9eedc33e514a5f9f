"""Problem instances, matchings, and the plain-text instance format.

An instance has agents with dichotomous (accept / reject) preferences over
institutions, and institutions with strict priorities over all agents.  Ids
are opaque string tokens; numeric agent names are kept as strings.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

SLOT_SEP = "#"


class InstanceError(ValueError):
    """Malformed instance data, optionally tied to a line of the source file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MatchingError(ValueError):
    pass


def _check_token(tok: str, line: int | None = None) -> None:
    if not isinstance(tok, str) or not tok or ":" in tok or any(c.isspace() for c in tok):
        raise InstanceError(f"invalid id {tok!r}", line)


class Instance:
    """An immutable matching problem.

    Parameters
    ----------
    agents, institutions : sequences of ids, in file order.
    accept : mapping agent -> iterable of acceptable institutions.
    prefs : mapping institution -> agents, most preferred first.  Each must be
        a permutation of ``agents``.
    baseline : institution order used for tie-breaking, highest rank first.
        Defaults to ``institutions``.
    """

    __slots__ = ("agents", "institutions", "accept", "prefs", "baseline", "_key", "_hash", "_cache")

    def __init__(
        self,
        agents: Sequence[str],
        institutions: Sequence[str],
        accept: Mapping[str, Iterable[str]],
        prefs: Mapping[str, Sequence[str]],
        baseline: Sequence[str] | None = None,
    ):
        agents = tuple(agents)
        institutions = tuple(institutions)
        baseline = tuple(institutions if baseline is None else baseline)
        for tok in agents + institutions:
            _check_token(tok)
        if len(set(agents)) != len(agents):
            raise InstanceError("duplicate agent id")
        if len(set(institutions)) != len(institutions):
            raise InstanceError("duplicate institution id")
        dset = set(institutions)
        if set(accept) - set(agents):
            raise InstanceError(f"unknown agent in accept: {sorted(set(accept) - set(agents))}")
        acc = {}
        for a in agents:
            s = frozenset(accept.get(a, ()))
            if not s <= dset:
                raise InstanceError(f"agent {a} accepts unknown institution(s) {sorted(s - dset)}")
            acc[a] = s
        if set(prefs) != dset:
            raise InstanceError("prefs must list every institution exactly once")
        pr = {}
        aset = set(agents)
        for d in institutions:
            order = tuple(prefs[d])
            if len(order) != len(agents) or set(order) != aset:
                raise InstanceError(f"prefs not a permutation of agents for {d}")
            pr[d] = order
        if len(baseline) != len(institutions) or set(baseline) != dset:
            raise InstanceError("baseline not a permutation of institutions")
        self._init(agents, institutions, acc, pr, baseline)

    def _init(self, agents, institutions, accept, prefs, baseline) -> None:
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "institutions", institutions)
        object.__setattr__(self, "accept", accept)
        object.__setattr__(self, "prefs", prefs)
        object.__setattr__(self, "baseline", baseline)
        object.__setattr__(self, "_key", None)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_cache", {})

    @classmethod
    def _unchecked(cls, agents, institutions, accept, prefs, baseline) -> "Instance":
        obj = cls.__new__(cls)
        obj._init(agents, institutions, accept, prefs, baseline)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Instance is immutable")

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.institutions)

    def key(self) -> tuple:
        if self._key is None:
            object.__setattr__(
                self,
                "_key",
                (
                    self.agents,
                    self.institutions,
                    tuple(self.accept[a] for a in self.agents),
                    tuple(self.prefs[d] for d in self.institutions),
                    self.baseline,
                ),
            )
        return self._key

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Instance):
            return NotImplemented
        return (self._key or self.key()) == (other._key or other.key())

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self._key or self.key())
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"Instance(n={self.n}, m={self.m}, edges={self.num_edges()})"

    def __reduce__(self):
        return (
            Instance._unchecked,
            (self.agents, self.institutions, self.accept, self.prefs, self.baseline),
        )

    def num_edges(self) -> int:
        return sum(len(s) for s in self.accept.values())

    # Derived views, computed lazily and cached on the instance.

    def acceptance_lists(self) -> dict[str, tuple[str, ...]]:
        """Institution -> ordered acceptors (its priority restricted to agents accepting it)."""
        lists = self._cache.get("acc")
        if lists is None:
            acc = self.accept
            lists = {d: tuple(a for a in self.prefs[d] if d in acc[a]) for d in self.institutions}
            self._cache["acc"] = lists
        return lists

    def rank_of(self, d: str) -> dict[str, int]:
        """Priority position of every agent at ``d`` (0 = top)."""
        ranks = self._cache.setdefault("rank", {})
        r = ranks.get(d)
        if r is None:
            r = {a: k for k, a in enumerate(self.prefs[d])}
            ranks[d] = r
        return r

    def with_accept(self, agent: str, acceptable: Iterable[str]) -> "Instance":
        """Copy of the instance with ``agent``'s acceptable set replaced."""
        s = frozenset(acceptable)
        if agent not in self.accept:
            raise InstanceError(f"unknown agent {agent}")
        if not s <= set(self.institutions):
            raise InstanceError(f"unknown institution(s) {sorted(s - set(self.institutions))}")
        acc = dict(self.accept)
        acc[agent] = s
        out = Instance._unchecked(self.agents, self.institutions, acc, self.prefs, self.baseline)
        k = self.key()
        j = self.agents.index(agent)
        object.__setattr__(out, "_key", (k[0], k[1], k[2][:j] + (s,) + k[2][j + 1 :], k[3], k[4]))
        return out

    def with_prefs(self, institution: str, order: Sequence[str]) -> "Instance":
        """Copy of the instance with one institution's priority order replaced."""
        order = tuple(order)
        if institution not in self.prefs:
            raise InstanceError(f"unknown institution {institution}")
        if len(order) != self.n or set(order) != set(self.agents):
            raise InstanceError(f"prefs not a permutation of agents for {institution}")
        pr = dict(self.prefs)
        pr[institution] = order
        out = Instance._unchecked(self.agents, self.institutions, self.accept, pr, self.baseline)
        k = self.key()
        j = self.institutions.index(institution)
        object.__setattr__(out, "_key", (k[0], k[1], k[2], k[3][:j] + (order,) + k[3][j + 1 :], k[4]))
        return out

    def with_baseline(self, baseline: Sequence[str]) -> "Instance":
        baseline = tuple(baseline)
        if sorted(baseline) != sorted(self.institutions):
            raise InstanceError("baseline not a permutation of institutions")
        return Instance._unchecked(self.agents, self.institutions, self.accept, self.prefs, baseline)

    def digest(self) -> str:
        return hashlib.sha256(serialize_instance(self).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class Matching:
    """A set of (agent, institution) pairs; each side appears at most once."""

    pairs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        pairs = frozenset(self.pairs)
        object.__setattr__(self, "pairs", pairs)
        agents = [a for a, _ in pairs]
        insts = [d for _, d in pairs]
        if len(set(agents)) != len(agents):
            raise MatchingError("agent matched twice")
        if len(set(insts)) != len(insts):
            raise MatchingError("institution matched twice")

    @classmethod
    def from_institutions(cls, mapping: Mapping[str, str]) -> "Matching":
        """Build from ``{institution: agent}``."""
        return cls(frozenset((a, d) for d, a in mapping.items()))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __contains__(self, pair):
        return pair in self.pairs

    def by_agent(self) -> dict[str, str]:
        return {a: d for a, d in self.pairs}

    def by_institution(self) -> dict[str, str]:
        return {d: a for a, d in self.pairs}

    def institution_of(self, agent: str) -> str | None:
        for a, d in self.pairs:
            if a == agent:
                return d
        return None

    def agent_of(self, institution: str) -> str | None:
        for a, d in self.pairs:
            if d == institution:
                return a
        return None

    def matched_institutions(self) -> frozenset:
        return frozenset(d for _, d in self.pairs)

    def matched_agents(self) -> frozenset:
        return frozenset(a for a, _ in self.pairs)

    def __repr__(self):
        body = ", ".join(f"({d},{a})" for a, d in sorted(self.pairs, key=lambda p: p[1]))
        return f"Matching({{{body}}})"


@dataclass(frozen=True)
class AcceptanceList:
    institution: str
    agents: tuple


def acceptance_list(inst: Instance, d: str) -> AcceptanceList:
    if d not in inst.prefs:
        raise InstanceError(f"unknown institution {d}")
    return AcceptanceList(d, inst.acceptance_lists()[d])


@dataclass(frozen=True)
class MatchingReport:
    feasible: bool
    individually_rational: bool
    violations: tuple = ()


def validate_matching(inst: Instance, M) -> MatchingReport:
    """Check ids, one-to-one feasibility and individual rationality.

    ``M`` may be a :class:`Matching` or any iterable of (agent, institution)
    pairs; duplicates raise :class:`MatchingError`.
    """
    pairs = list(M.pairs if isinstance(M, Matching) else M)
    for a, d in pairs:
        if a not in inst.accept:
            raise MatchingError(f"unknown agent {a}")
        if d not in inst.prefs:
            raise MatchingError(f"unknown institution {d}")
    if len({a for a, _ in pairs}) != len(pairs):
        raise MatchingError("agent matched twice")
    if len({d for _, d in pairs}) != len(pairs):
        raise MatchingError("institution matched twice")
    bad = tuple(sorted((a, d) for a, d in pairs if d not in inst.accept[a]))
    return MatchingReport(True, not bad, bad)


def from_acceptance_lists(
    lists: Mapping[str, Sequence[str]],
    agents: Sequence[str] | None = None,
    baseline: Sequence[str] | None = None,
) -> Instance:
    """Build an instance from institution acceptance lists.

    Each list is read as the top of that institution's priority order; the
    remaining agents follow in ``agents`` order.  Agents default to those
    appearing in the lists, sorted.
    """
    if agents is None:
        agents = sorted({a for lst in lists.values() for a in lst}, key=lambda a: (len(a), a))
    agents = tuple(agents)
    accept: dict = {a: [] for a in agents}
    prefs = {}
    for d, lst in lists.items():
        if len(set(lst)) != len(lst):
            raise InstanceError(f"duplicate agent on the acceptance list of {d}")
        for a in lst:
            if a not in accept:
                raise InstanceError(f"unknown agent {a} on the acceptance list of {d}")
            accept[a].append(d)
        prefs[d] = tuple(lst) + tuple(a for a in agents if a not in lst)
    return Instance(agents, tuple(lists), accept, prefs, baseline)


def expand_capacities(inst: Instance, capacities: Mapping[str, int]) -> Instance:
    """Replace each institution ``d`` of capacity ``k > 1`` by unit slots ``d#1..d#k``.

    Slots inherit the priority order of ``d``, are accepted by everyone who
    accepts ``d``, and sit contiguously at ``d``'s baseline position.
    """
    caps = {}
    for d in inst.institutions:
        k = capacities.get(d, 1)
        if not isinstance(k, int) or k < 1:
            raise InstanceError(f"capacity of {d} must be a positive integer, got {k!r}")
        caps[d] = k
    unknown = set(capacities) - set(inst.institutions)
    if unknown:
        raise InstanceError(f"unknown institution(s) {sorted(unknown)}")

    def slots(d):
        if caps[d] == 1:
            return [d]
        return [f"{d}{SLOT_SEP}{j}" for j in range(1, caps[d] + 1)]

    institutions = [s for d in inst.institutions for s in slots(d)]
    baseline = [s for d in inst.baseline for s in slots(d)]
    accept = {a: [s for d in inst.institutions if d in inst.accept[a] for s in slots(d)] for a in inst.agents}
    prefs = {s: inst.prefs[d] for d in inst.institutions for s in slots(d)}
    return Instance(inst.agents, institutions, accept, prefs, baseline)


# ---------------------------------------------------------------------------
# Text format


def parse_instance(text: str) -> Instance:
    """Parse the line-oriented instance format.

    ::

        NM <n> <m>
        AGENT <id> : <acceptable institutions...>     (n lines)
        PREF <institution> : <all n agents, best first> (m lines)
        BASELINE : <all m institutions, highest first>

    Blank lines and lines starting with ``#`` are ignored.
    """
    lines = [(k, ln.strip()) for k, ln in enumerate(text.splitlines(), 1)]
    lines = [(k, ln) for k, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise InstanceError("missing NM section", 1)

    def split(k, ln, tag, with_id):
        head, sep, tail = ln.partition(":")
        if not sep:
            raise InstanceError(f"expected ':' in {tag} line", k)
        hw = head.split()
        if not hw or hw[0] != tag or len(hw) != (2 if with_id else 1):
            raise InstanceError(f"malformed {tag} line", k)
        toks = tail.split()
        for t in toks:
            _check_token(t, k)
        if with_id:
            _check_token(hw[1], k)
            return hw[1], toks
        return None, toks

    k0, first = lines[0]
    words = first.split()
    if len(words) != 3 or words[0] != "NM":
        raise InstanceError("missing NM section", k0)
    try:
        n, m = int(words[1]), int(words[2])
    except ValueError:
        raise InstanceError("NM expects two integers", k0) from None
    if n < 0 or m < 0:
        raise InstanceError("NM counts must be non-negative", k0)

    pos = 1
    agents: list[str] = []
    accept: dict[str, list[str]] = {}
    for _ in range(n):
        if pos >= len(lines) or not lines[pos][1].startswith("AGENT"):
            raise InstanceError("missing AGENT section", lines[pos][0] if pos < len(lines) else None)
        k, ln = lines[pos]
        a, toks = split(k, ln, "AGENT", True)
        if a in accept:
            raise InstanceError(f"duplicate agent id {a}", k)
        if len(set(toks)) != len(toks):
            raise InstanceError(f"duplicate institution in acceptable set of {a}", k)
        agents.append(a)
        accept[a] = toks
        pos += 1
    agent_set = set(agents)

    institutions: list[str] = []
    prefs: dict[str, list[str]] = {}
    pref_lines = {}
    for _ in range(m):
        if pos >= len(lines) or not lines[pos][1].startswith("PREF"):
            raise InstanceError("missing PREF section", lines[pos][0] if pos < len(lines) else None)
        k, ln = lines[pos]
        d, toks = split(k, ln, "PREF", True)
        if d in prefs:
            raise InstanceError(f"duplicate institution id {d}", k)
        unknown = [t for t in toks if t not in agent_set]
        if unknown:
            raise InstanceError(f"unknown agent id {unknown[0]} in PREF {d}", k)
        if len(toks) != n or set(toks) != agent_set:
            raise InstanceError(f"prefs not a permutation of agents for {d}", k)
        institutions.append(d)
        prefs[d] = toks
        pref_lines[d] = k
        pos += 1
    inst_set = set(institutions)

    for a in agents:
        bad = [d for d in accept[a] if d not in inst_set]
        if bad:
            line = next(k for k, ln in lines if ln.startswith("AGENT") and ln.split()[1] == a)
            raise InstanceError(f"unknown institution id {bad[0]} for agent {a}", line)

    if pos >= len(lines) or not lines[pos][1].startswith("BASELINE"):
        raise InstanceError("missing BASELINE section", lines[pos][0] if pos < len(lines) else None)
    k, ln = lines[pos]
    _, baseline = split(k, ln, "BASELINE", False)
    unknown = [t for t in baseline if t not in inst_set]
    if unknown:
        raise InstanceError(f"unknown institution id {unknown[0]} in BASELINE", k)
    if len(baseline) != m or set(baseline) != inst_set:
        raise InstanceError("baseline not a permutation of institutions", k)
    pos += 1
    if pos < len(lines):
        raise InstanceError("unexpected trailing content", lines[pos][0])
    return Instance(agents, institutions, accept, prefs, baseline)


def serialize_instance(inst: Instance) -> str:
    out = [f"NM {inst.n} {inst.m}"]
    for a in inst.agents:
        acc = [d for d in inst.institutions if d in inst.accept[a]]
        out.append(" ".join(["AGENT", a, ":", *acc]).rstrip())
    for d in inst.institutions:
        out.append(" ".join(["PREF", d, ":", *inst.prefs[d]]).rstrip())
    out.append(" ".join(["BASELINE", ":", *inst.baseline]).rstrip())
    return "\n".join(out) + "\n"


def format_matching(inst: Instance, M: Matching) -> str:
    """Render ``MATCH`` lines in baseline order plus the unmatched agents/institutions."""
    by_d = M.by_institution()
    out = [f"MATCH {d} {by_d[d]}" for d in inst.baseline if d in by_d]
    matched = M.matched_agents()
    out.append(" ".join(["UNMATCHED_AGENTS", *(a for a in inst.agents if a not in matched)]))
    out.append(" ".join(["UNMATCHED_INSTITUTIONS", *(d for d in inst.baseline if d not in by_d)]))
    return "\n".join(out) + "\n"


def parse_matching(text: str) -> Matching:
    pairs = []
    for k, ln in enumerate(text.splitlines(), 1):
        w = ln.split()
        if not w or w[0].startswith("#") or w[0].startswith("UNMATCHED"):
            continue
        if w[0] != "MATCH" or len(w) != 3:
            raise MatchingError(f"line {k}: expected 'MATCH <institution> <agent>'")
        pairs.append((w[2], w[1]))
    return Matching(frozenset(pairs))
