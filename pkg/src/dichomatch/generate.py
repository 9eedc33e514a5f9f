"""Random and exhaustive instance generation."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations, product
from math import factorial
from typing import Iterator

from .instance import Instance

MAX_ACCEPT_BITS = 12  # n*m for exhaustive acceptability profiles
MAX_PRIORITY_PROFILES = 46_656
MAX_UNIVERSE = 5_000_000


def agent_ids(n: int) -> list[str]:
    return [str(i) for i in range(1, n + 1)]


def institution_ids(m: int) -> list[str]:
    return [f"d{j}" for j in range(1, m + 1)]


@dataclass(frozen=True)
class GenConfig:
    n: int
    m: int
    p: float = 0.5
    seed: int = 0
    baseline: str = "identity"  # or "random"

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError("n and m must be non-negative")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"edge probability must lie in [0, 1], got {self.p}")
        if self.baseline not in ("identity", "random"):
            raise ValueError("baseline policy must be 'identity' or 'random'")


def generate(cfg: GenConfig) -> Instance:
    """Independent edges with probability ``p``; uniform random priorities."""
    rng = random.Random(cfg.seed)
    agents, insts = agent_ids(cfg.n), institution_ids(cfg.m)
    accept = {a: [d for d in insts if rng.random() < cfg.p] for a in agents}
    prefs = {d: rng.sample(agents, cfg.n) for d in insts}
    baseline = rng.sample(insts, cfg.m) if cfg.baseline == "random" else insts
    return Instance(agents, insts, accept, prefs, baseline)


def random_instances(n: int, m: int, count: int, seed: int = 0, p: float = 0.5, baseline: str = "random") -> Iterator[Instance]:
    """``count`` reproducible instances; instance k uses a seed derived from ``(seed, k)``."""
    master = random.Random(seed)
    for _ in range(count):
        yield generate(GenConfig(n, m, p, master.getrandbits(64), baseline))


def universe_size(n: int, m: int, priority_mode="all") -> int:
    pri = factorial(n) ** m if priority_mode == "all" else priority_mode[1]
    return 2 ** (n * m) * pri * factorial(m)


def enumerate_universe(n: int, m: int, priority_mode="all") -> Iterator[Instance]:
    """Every acceptability profile x priority profile x baseline.

    ``priority_mode`` is ``"all"`` or ``("sampled", k, seed)``.  Instances come
    grouped by baseline, then priority profile, then acceptability profile
    (agent-major bitmask order).
    """
    if n * m > MAX_ACCEPT_BITS:
        raise ValueError(f"universe too large: n*m = {n * m} > {MAX_ACCEPT_BITS}")
    agents, insts = tuple(agent_ids(n)), tuple(institution_ids(m))
    if priority_mode == "all":
        if factorial(n) ** m > MAX_PRIORITY_PROFILES:
            raise ValueError("universe too large: too many priority profiles; sample them instead")
        profiles = list(product(list(permutations(agents)), repeat=m))
    else:
        tag, k, seed = priority_mode
        if tag != "sampled":
            raise ValueError(f"unknown priority mode {priority_mode!r}")
        rng = random.Random(seed)
        profiles = [tuple(tuple(rng.sample(agents, n)) for _ in insts) for _ in range(k)]
    if universe_size(n, m, "all" if priority_mode == "all" else ("sampled", len(profiles))) > MAX_UNIVERSE:
        raise ValueError("universe too large")
    subsets = [frozenset(insts[j] for j in range(m) if mask >> j & 1) for mask in range(1 << m)]
    acc_profiles = list(product(subsets, repeat=n))
    for baseline in permutations(insts):
        for prof in profiles:
            prefs = dict(zip(insts, prof))
            for accs in acc_profiles:
                yield Instance._unchecked(agents, insts, dict(zip(agents, accs)), prefs, baseline)
