import pytest
from hypothesis import HealthCheck, settings

from dichomatch.instance import Instance, from_acceptance_lists

settings.register_profile("default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def four_agents_two_seats() -> Instance:
    return Instance(
        agents="1234",
        institutions=["d1", "d2"],
        accept={"1": ["d1", "d2"], "2": ["d2"], "3": ["d1"], "4": ["d1", "d2"]},
        prefs={"d1": "2413", "d2": "1342"},
    )


def walkthrough() -> Instance:
    return from_acceptance_lists(
        {"d1": "123", "d2": "123", "d3": "1", "d4": "2"}, baseline=["d1", "d2", "d3", "d4"]
    )


BLOCK_CASES = {
    1: {"d1": "13", "d2": "32", "d3": "1"},
    2: {"d1": "21", "d2": "12", "d3": "123"},
    3: {"d1": "213", "d2": "12", "d3": "123"},
    4: {"d1": "12", "d2": "213", "d3": "312", "d4": "31"},
}


def block_case(k: int) -> Instance:
    return from_acceptance_lists(BLOCK_CASES[k])


def no_block() -> Instance:
    lists = {
        "d1": ["1", "2", "3"],
        "d2": ["3", "2", "4"],
        "d3": ["1", "3"],
        "d4": ["1", "3", "4", "5"],
        "d5": ["6", "7", "4"],
        "d6": ["6", "8"],
    }
    return from_acceptance_lists(lists, agents=[str(k) for k in range(1, 9)])


def bossy_da() -> tuple[Instance, dict]:
    inst = from_acceptance_lists({"d1": "132", "d2": "21", "d3": "43"}, agents="1234")
    tb = {"1": ["d2", "d1"], "2": ["d1", "d2"], "3": ["d1", "d3"], "4": ["d3"]}
    return inst, tb


# Brute-force search result, frozen: with these fixed agent orders, d2 gains
# by reporting 1 2 3 instead of 1 3 2.
DA_MANIPULABLE = """\
NM 3 2
AGENT 1 : d1 d2
AGENT 2 : d2
AGENT 3 : d1 d2
PREF d1 : 3 2 1
PREF d2 : 1 3 2
BASELINE : d2 d1
"""
DA_MANIPULABLE_ORDERS = {"1": ["d1", "d2"], "2": ["d2", "d1"], "3": ["d2", "d1"]}

# SAFE and Rank-Maximal disagree here.
DIVERGENT = """\
NM 3 4
AGENT 1 : d2 d3 d4
AGENT 2 :
AGENT 3 : d2 d4
PREF d1 : 1 3 2
PREF d2 : 3 2 1
PREF d3 : 2 3 1
PREF d4 : 1 3 2
BASELINE : d1 d4 d3 d2
"""


@pytest.fixture
def intro():
    return four_agents_two_seats()


@pytest.fixture
def walk():
    return walkthrough()
