"""Input coercion for the estimator layer."""

from __future__ import annotations

import os
from typing import Any

from .instance import Instance, Matching, MatchingError, parse_instance, validate_matching


def check_instance(X: Any) -> Instance:
    """Accept an :class:`Instance`, instance text, or a path to an instance file."""
    if isinstance(X, Instance):
        return X
    if isinstance(X, os.PathLike) or (isinstance(X, str) and "\n" not in X and os.path.isfile(X)):
        with open(X, encoding="utf-8") as fh:
            return parse_instance(fh.read())
    if isinstance(X, str):
        return parse_instance(X)
    raise TypeError(f"expected an Instance, instance text, or file path; got {type(X).__name__}")


def check_matching(inst: Instance, M: Any, require_ir: bool = True) -> Matching:
    """Coerce ``M`` (Matching, ``{institution: agent}``, or pairs) and validate it against ``inst``."""
    if isinstance(M, Matching):
        out = M
    elif isinstance(M, dict):
        out = Matching.from_institutions(M)
    else:
        out = Matching(frozenset(tuple(p) for p in M))
    rep = validate_matching(inst, out)
    if require_ir and not rep.individually_rational:
        raise MatchingError(f"matching is not individually rational: {rep.violations}")
    return out


def check_baseline(inst: Instance, baseline) -> Instance:
    return inst if baseline is None else inst.with_baseline(baseline)
