import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from conftest import bossy_da, four_agents_two_seats, walkthrough
from dichomatch.estimators import (
    DeferredAcceptanceMatcher,
    FairnessRepair,
    RankMaximalMatcher,
    SafeMatcher,
    SequentialMatcher,
)
from dichomatch.instance import Matching, MatchingError, serialize_instance


def M(**kw):
    return Matching.from_institutions(kw)


def test_safe_matcher_fit_predict():
    est = SafeMatcher().fit(walkthrough())
    assert est.matching_ == M(d1="2", d2="3", d3="1")
    assert est.trace_.realized_order == ("d3", "d1", "d2")
    assert est.predict(walkthrough()) == est.matching_


def test_params_and_clone():
    est = SafeMatcher(baseline=["d4", "d3", "d2", "d1"], block_cap=6)
    assert est.get_params() == {"baseline": ["d4", "d3", "d2", "d1"], "block_cap": 6}
    twin = clone(est)
    assert twin.get_params() == est.get_params() and not hasattr(twin, "matching_")
    assert est.set_params(block_cap=7).block_cap == 7


def test_baseline_override_changes_outcome():
    inst = walkthrough()
    a = RankMaximalMatcher().fit_predict(inst)
    b = RankMaximalMatcher(baseline=["d4", "d3", "d2", "d1"]).fit_predict(inst)
    assert a != b and ("2", "d4") in b.pairs


def test_accepts_text_and_paths(tmp_path):
    text = serialize_instance(walkthrough())
    p = tmp_path / "w.txt"
    p.write_text(text)
    assert RankMaximalMatcher().fit_predict(text) == RankMaximalMatcher().fit_predict(str(p))
    with pytest.raises(TypeError):
        SafeMatcher().fit(42)


def test_da_matcher_tiebreak():
    inst, tb = bossy_da()
    assert DeferredAcceptanceMatcher(tiebreak=tb).fit_predict(inst) == M(d1="1", d2="2", d3="4")
    assert DeferredAcceptanceMatcher(tiebreak={"1": ["d1", "d2"]}).fit_predict(inst).agent_of("d1") == "1"


def test_sequential_matcher():
    inst = walkthrough()
    assert SequentialMatcher().fit_predict(inst) == M(d1="1", d2="2")
    assert SequentialMatcher(pi=["d3", "d1", "d2", "d4"]).fit(inst).trace_ is None


def test_fairness_repair():
    inst = four_agents_two_seats()
    rep = FairnessRepair().fit(inst)
    assert rep.transform({"d1": "1", "d2": "2"}) == M(d1="4", d2="1")
    assert rep.steps_ >= 1
    with pytest.raises(MatchingError):
        rep.transform([("2", "d1")])
    with pytest.raises(NotFittedError):
        FairnessRepair().transform({})
