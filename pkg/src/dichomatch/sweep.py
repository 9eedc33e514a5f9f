"""Run axiom audits across a stream of instances and aggregate the verdicts."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import islice
from typing import Iterable, Sequence

from .axioms import audit
from .instance import Instance, serialize_instance
from .mechanisms import get_mechanism

EQUIVALENCE = "equivalence"
MEMO_LIMIT = 300_000


class _Memo:
    """Caches one mechanism's outcomes; misreport audits revisit many instances."""

    def __init__(self, name: str):
        self.fn = get_mechanism(name)
        self.__name__ = name
        self.cache: dict = {}

    def __call__(self, inst: Instance):
        out = self.cache.get(inst)
        if out is None:
            if len(self.cache) >= MEMO_LIMIT:
                self.cache.clear()
            out = self.cache[inst] = self.fn(inst)
        return out


@dataclass
class SweepResult:
    universe: str = ""
    instances: int = 0
    counts: dict = field(default_factory=dict)  # "mechanism/axiom" -> violations
    witnesses: dict = field(default_factory=dict)  # "mechanism/axiom" -> first violation
    errors: dict = field(default_factory=dict)  # "mechanism/axiom" -> error count
    first_errors: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def violations(self) -> int:
        return sum(self.counts.values())

    def count(self, mechanism: str, axiom: str) -> int:
        return self.counts.get(f"{mechanism}/{axiom}", 0)

    def merge(self, other: "SweepResult", offset: int) -> None:
        self.instances += other.instances
        for k, v in other.counts.items():
            self.counts[k] = self.counts.get(k, 0) + v
        for k, v in other.errors.items():
            self.errors[k] = self.errors.get(k, 0) + v
        for k, w in other.witnesses.items():
            if k not in self.witnesses:
                self.witnesses[k] = dict(w, index=w["index"] + offset)
        for k, e in other.first_errors.items():
            self.first_errors.setdefault(k, e)

    def to_dict(self) -> dict:
        return {
            "universe": self.universe,
            "instances": self.instances,
            "counts": self.counts,
            "witnesses": self.witnesses,
            "errors": self.errors,
            "first_errors": self.first_errors,
            "seconds": round(self.seconds, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def format_text(self) -> str:
        lines = [f"universe: {self.universe}", f"instances: {self.instances}"]
        for k in sorted(self.counts):
            lines.append(f"{k}: {self.counts[k]} violation(s)")
        for k in sorted(self.errors):
            lines.append(f"{k}: {self.errors[k]} error(s); first: {self.first_errors.get(k)}")
        for k in sorted(self.witnesses):
            w = self.witnesses[k]
            lines.append(f"first {k} witness at #{w['index']} ({w['instance']}): {json.dumps(w['witness'])}")
        lines.append(f"seconds: {self.seconds:.2f}")
        return "\n".join(lines) + "\n"


def _run_chunk(instances: Sequence[Instance], mechanisms: Sequence[str], axioms: Sequence[str], equivalence: bool) -> SweepResult:
    memos = {name: _Memo(name) for name in mechanisms}
    res = SweepResult()
    keys = [f"{mech}/{ax}" for mech in mechanisms for ax in axioms]
    for k in keys:
        res.counts[k] = 0
    check_eq = equivalence and "safe" in memos and "rankmax" in memos
    if check_eq:
        res.counts[f"safe=rankmax/{EQUIVALENCE}"] = 0
    last_baseline = None
    for idx, inst in enumerate(instances):
        res.instances += 1
        if inst.baseline != last_baseline:
            # Misreports never change the baseline, so older outcomes are dead weight.
            for memo in memos.values():
                memo.cache.clear()
            last_baseline = inst.baseline
        for mech in mechanisms:
            for ax in axioms:
                key = f"{mech}/{ax}"
                try:
                    rep = audit(inst, memos[mech], ax, name=mech)
                except Exception as exc:  # recorded per instance; the sweep goes on
                    res.errors[key] = res.errors.get(key, 0) + 1
                    res.first_errors.setdefault(key, f"#{idx}: {type(exc).__name__}: {exc}")
                    continue
                if not rep.holds:
                    res.counts[key] += 1
                    if key not in res.witnesses:
                        res.witnesses[key] = {
                            "index": idx,
                            "instance": rep.instance,
                            "witness": rep.witness,
                            "text": serialize_instance(inst),
                        }
        if check_eq:
            a, b = memos["safe"](inst), memos["rankmax"](inst)
            if a != b:
                key = f"safe=rankmax/{EQUIVALENCE}"
                res.counts[key] += 1
                if key not in res.witnesses:
                    res.witnesses[key] = {
                        "index": idx,
                        "instance": inst.digest(),
                        "witness": {
                            "safe": sorted([d, x] for x, d in a.pairs),
                            "rankmax": sorted([d, x] for x, d in b.pairs),
                        },
                        "text": serialize_instance(inst),
                    }
    return res


def sweep(
    universe: Iterable[Instance],
    mechanisms: Sequence[str] = ("safe", "rankmax"),
    axioms: Sequence[str] = (),
    description: str = "",
    jobs: int = 1,
    equivalence: bool = True,
    chunk_size: int = 20_000,
) -> SweepResult:
    """Audit every (instance, mechanism, axiom) triple.

    With ``safe`` and ``rankmax`` both present, their outputs are also compared
    as the ``safe=rankmax/equivalence`` pseudo-axiom.  Counts and first
    witnesses do not depend on ``jobs``.
    """
    for name in mechanisms:
        get_mechanism(name)
    start = time.perf_counter()
    total = SweepResult(universe=description)
    it = iter(universe)
    if jobs <= 1:
        part = _run_chunk(it, mechanisms, axioms, equivalence)
        total.merge(part, 0)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = []
            offset = 0
            while True:
                chunk = list(islice(it, chunk_size))
                if not chunk:
                    break
                futures.append((offset, pool.submit(_run_chunk, chunk, mechanisms, axioms, equivalence)))
                offset += len(chunk)
            for off, fut in futures:
                total.merge(fut.result(), off)
    total.seconds = time.perf_counter() - start
    return total
