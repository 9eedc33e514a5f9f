"""scikit-learn style wrappers around the mechanisms.

A matcher's ``fit`` runs the mechanism on one instance and stores the result;
``predict`` runs it on any instance without touching fitted state.  All
constructor arguments are plain parameters, so ``get_params``/``set_params``
and ``sklearn.base.clone`` work as usual.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .blocks import MAX_BLOCK_INSTITUTIONS
from .instance import Matching
from .mechanisms import da_mechanism, default_tiebreak, fairify, pi_sequential, rankmax_mechanism, safe_mechanism
from .validation import check_baseline, check_instance, check_matching


class _Matcher(BaseEstimator):
    def _run(self, inst):
        raise NotImplementedError

    def fit(self, X, y=None):
        inst = check_baseline(check_instance(X), getattr(self, "baseline", None))
        out = self._run(inst)
        if isinstance(out, tuple):
            self.matching_, self.trace_ = out
        else:
            self.matching_, self.trace_ = out, None
        self.instance_ = inst
        return self

    def predict(self, X) -> Matching:
        inst = check_baseline(check_instance(X), getattr(self, "baseline", None))
        out = self._run(inst)
        return out[0] if isinstance(out, tuple) else out

    def fit_predict(self, X, y=None) -> Matching:
        return self.fit(X).matching_


class SafeMatcher(_Matcher):
    """SAFE mechanism; ``baseline`` overrides the instance's own baseline."""

    def __init__(self, baseline=None, block_cap=MAX_BLOCK_INSTITUTIONS):
        self.baseline = baseline
        self.block_cap = block_cap

    def _run(self, inst):
        return safe_mechanism(inst, cap=self.block_cap)


class RankMaximalMatcher(_Matcher):
    def __init__(self, baseline=None):
        self.baseline = baseline

    def _run(self, inst):
        return rankmax_mechanism(inst)


class DeferredAcceptanceMatcher(_Matcher):
    """Agent-proposing DA.

    ``tiebreak`` maps agent -> strict order of its acceptable set; agents left
    out rank their acceptable institutions in baseline order.
    """

    def __init__(self, tiebreak=None):
        self.tiebreak = tiebreak

    def _run(self, inst):
        tb = default_tiebreak(inst)
        tb.update(self.tiebreak or {})
        return da_mechanism(inst, tb)


class SequentialMatcher(_Matcher):
    """Fixed-order sequential matching; ``pi`` defaults to the instance baseline."""

    def __init__(self, pi=None):
        self.pi = pi

    def _run(self, inst):
        return pi_sequential(inst, self.pi if self.pi is not None else inst.baseline)


class FairnessRepair(TransformerMixin, BaseEstimator):
    """Turn a maximum IR matching of the fitted instance into a fair one."""

    def fit(self, X, y=None):
        self.instance_ = check_instance(X)
        return self

    def transform(self, M) -> Matching:
        check_is_fitted(self, "instance_")
        out, self.steps_ = fairify(self.instance_, check_matching(self.instance_, M), with_steps=True)
        return out
