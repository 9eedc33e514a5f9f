import json

import pytest
from hypothesis import given

from conftest import DA_MANIPULABLE, DA_MANIPULABLE_ORDERS, bossy_da, four_agents_two_seats, walkthrough
from dichomatch import oracle
from dichomatch.axioms import (
    AXIOMS,
    CapExceeded,
    audit,
    audit_agent_sp,
    audit_institution_sp,
    audit_non_bossy,
    check_both_efficiency,
    check_d_efficiency,
    check_fair,
    check_ir,
    check_maximum,
    check_n_efficiency,
    check_non_wasteful,
    recheck,
)
from dichomatch.instance import Instance, Matching, MatchingError, parse_instance
from dichomatch.mechanisms import da_with_orders, safe_mechanism
from strategies import instances


def M(**kw):
    return Matching.from_institutions(kw)


EMPTY = Instance("", [], {}, {})
NONE = Matching(frozenset())


def test_ir():
    inst = four_agents_two_seats()
    assert check_ir(inst, M(d1="4", d2="1")).holds
    rep = check_ir(inst, M(d1="2"))
    assert not rep.holds and rep.witness == {"pairs": [["2", "d1"]]}


def test_fairness():
    inst = four_agents_two_seats()
    assert check_fair(inst, M(d1="1", d2="4")).holds
    rep = check_fair(inst, M(d1="1", d2="2"))
    assert rep.witness == {"agent": "4", "institution": "d1", "holder": "1"}
    with pytest.raises(MatchingError):
        check_fair(inst, M(d1="2"))


def test_strict_and_weak_fairness_differ_on_empty_seats():
    inst = four_agents_two_seats()
    assert not check_fair(inst, M(d1="4")).holds
    assert check_fair(inst, M(d1="4"), strict=False).holds
    assert audit(inst, lambda i: M(d1="4"), "fair_weak").holds


def test_maximum():
    inst = four_agents_two_seats()
    assert check_maximum(inst, M(d1="4", d2="1")).holds
    assert check_maximum(walkthrough(), M(d1="2", d2="3", d3="1")).holds
    rep = check_maximum(inst, M(d2="2"))
    assert rep.witness == {"size": 1, "maximum": 2}


def test_efficiency():
    inst = four_agents_two_seats()
    good, fair_only = M(d1="4", d2="1"), M(d1="1", d2="4")
    assert check_d_efficiency(inst, good).holds
    rep = check_d_efficiency(inst, fair_only)
    assert not rep.holds and rep.witness["dominating"] == {"d1": "4", "d2": "1"}
    assert check_n_efficiency(inst, fair_only).holds
    assert not check_both_efficiency(inst, fair_only).holds
    assert check_both_efficiency(walkthrough(), safe_mechanism(walkthrough())[0]).holds
    assert check_both_efficiency(EMPTY, NONE).holds
    assert not check_n_efficiency(inst, M(d1="2")).holds


def test_d_efficiency_cap():
    inst = Instance([str(k) for k in range(9)], ["d1"], {}, {"d1": [str(k) for k in range(9)]})
    with pytest.raises(CapExceeded):
        check_d_efficiency(inst, NONE)


def test_non_wasteful():
    inst = four_agents_two_seats()
    rep = check_non_wasteful(inst, M(d1="4"))
    assert rep.witness == {"agent": "1", "institution": "d2"}
    assert check_non_wasteful(inst, M(d1="4", d2="1")).holds
    assert check_non_wasteful(EMPTY, NONE).holds


def test_report_json():
    rep = check_maximum(four_agents_two_seats(), M(d2="2"), "custom")
    data = json.loads(rep.to_json())
    assert data["mechanism"] == "custom" and data["axiom"] == "maximum"
    assert data["verdict"] == "violated" and data["instance"] == four_agents_two_seats().digest()


def test_da_non_bossy_witness():
    inst, tb = bossy_da()
    mech = da_with_orders(tb)
    rep = audit_non_bossy(inst, mech)
    assert not rep.holds and rep.witness["agent"] == "3"
    assert recheck(inst, mech, rep)
    lie = inst.with_accept("3", ["d3"])
    assert mech(lie) != mech(inst) and mech(lie).institution_of("3") is None
    for name in ("safe", "rankmax"):
        assert audit_non_bossy(inst, name).holds


def test_da_institution_manipulation_witness():
    inst = parse_instance(DA_MANIPULABLE)
    mech = da_with_orders(DA_MANIPULABLE_ORDERS)
    rep = audit_institution_sp(inst, mech)
    assert rep.witness == {"institution": "d2", "report": ["1", "2", "3"], "gets": "1", "truthful": "3"}
    assert recheck(inst, mech, rep)
    for name in ("safe", "rankmax"):
        assert audit_institution_sp(inst, name).holds


def test_single_institution_cannot_manipulate():
    inst = Instance("123", ["d1"], {"1": ["d1"], "3": ["d1"]}, {"d1": "312"})
    for name in ("safe", "rankmax", "da", "seq"):
        assert audit_institution_sp(inst, name).holds


def test_sampled_institution_audit_is_seeded():
    agents = [str(k) for k in range(7)]
    inst = Instance(agents, ["d1", "d2"], {a: ["d1", "d2"] for a in agents}, {"d1": agents, "d2": agents[::-1]})
    a = audit_institution_sp(inst, "rankmax", samples=20, seed=3)
    b = audit_institution_sp(inst, "rankmax", samples=20, seed=3)
    assert a == b and a.holds


def test_agent_sp_weak_flag_only_renames():
    inst = walkthrough()
    assert audit_agent_sp(inst, "safe").axiom == "agent_sp"
    assert audit_agent_sp(inst, "safe", weak=True).axiom == "weak_agent_sp"


def test_misreport_cap():
    D = [f"d{k}" for k in range(13)]
    inst = Instance("1", D, {}, {d: "1" for d in D})
    with pytest.raises(CapExceeded):
        audit_agent_sp(inst, "safe")
    with pytest.raises(CapExceeded):
        audit_non_bossy(inst, "safe")


def test_sequential_agent_audit_finds_nothing():
    # Fixed-order sequential matching cannot be gamed by agents: an unmatched
    # agent was passed over everywhere it is acceptable, and any report
    # either leaves the picks unchanged or hands it to an unwanted seat.
    from dichomatch.generate import enumerate_universe

    for inst in enumerate_universe(2, 3):
        assert audit_agent_sp(inst, "seq").holds


def test_audit_unknown_axiom():
    with pytest.raises(ValueError):
        audit(walkthrough(), "safe", "nope")


@given(instances(max_n=4, max_m=4))
def test_mechanism_axioms_hold_for_safe_and_rankmax(inst):
    for name in ("safe", "rankmax"):
        for ax in AXIOMS:
            assert audit(inst, name, ax).holds, (name, ax)


@given(instances(max_n=4, max_m=4))
def test_witnesses_recheck(inst):
    for name in ("da", "seq"):
        for ax in AXIOMS:
            rep = audit(inst, name, ax)
            if not rep.holds:
                assert recheck(inst, name, rep), (name, ax, rep.witness)


@given(instances(max_n=4, max_m=4))
def test_d_efficiency_implies_fairness(inst):
    for out in oracle.all_matchings(inst):
        if check_d_efficiency(inst, out).holds:
            assert check_fair(inst, out).holds
