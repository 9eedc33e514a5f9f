import json

import pytest

from conftest import DIVERGENT
from dichomatch.generate import GenConfig, enumerate_universe, generate, random_instances, universe_size
from dichomatch.instance import parse_instance
from dichomatch.sweep import sweep


def test_generate_is_reproducible():
    a = generate(GenConfig(5, 4, 0.3, seed=11))
    assert a == generate(GenConfig(5, 4, 0.3, seed=11))
    assert a.baseline == ("d1", "d2", "d3", "d4")
    assert generate(GenConfig(5, 4, 1.0, seed=1)).num_edges() == 20
    assert generate(GenConfig(5, 4, 0.0, seed=1)).num_edges() == 0


def test_gen_config_validation():
    with pytest.raises(ValueError):
        GenConfig(2, 2, p=1.5)
    with pytest.raises(ValueError):
        GenConfig(-1, 2)
    with pytest.raises(ValueError):
        GenConfig(2, 2, baseline="sorted")


def test_random_instances_stream():
    first = list(random_instances(3, 3, 5, seed=4))
    assert first == list(random_instances(3, 3, 5, seed=4))
    assert len(set(first)) == 5


def test_universe_counts():
    assert universe_size(3, 3) == 663_552
    insts = list(enumerate_universe(2, 2))
    assert len(insts) == universe_size(2, 2) == 2**4 * 2**2 * 2
    assert len(set(insts)) == len(insts)
    assert len(list(enumerate_universe(1, 2, ("sampled", 1, 0)))) == 2**2 * 1 * 2


def test_universe_guards():
    with pytest.raises(ValueError):
        next(enumerate_universe(4, 4))
    with pytest.raises(ValueError):
        next(enumerate_universe(2, 2, ("bogus", 1, 0)))


def test_small_sweep_counts():
    res = sweep(enumerate_universe(2, 2), ["safe", "rankmax", "da"], ["maximum", "fair", "non_bossy"], "n2m2")
    assert res.instances == 128
    assert res.count("safe", "maximum") == 0 and res.count("rankmax", "fair") == 0
    assert res.count("da", "maximum") > 0 and res.count("da", "fair") == 0
    assert res.count("safe=rankmax", "equivalence") == 0
    data = json.loads(res.to_json())
    assert data["instances"] == 128 and "da/maximum" in data["witnesses"]
    text = res.format_text()
    assert "da/maximum" in text and text.startswith("universe: n2m2")


def test_sweep_reports_equivalence_witness():
    inst = parse_instance(DIVERGENT)
    res = sweep([inst], ["safe", "rankmax"], [], "one")
    assert res.count("safe=rankmax", "equivalence") == 1
    w = res.witnesses["safe=rankmax/equivalence"]
    assert parse_instance(w["text"]) == inst


def test_parallel_sweep_agrees_with_serial():
    universe = list(enumerate_universe(2, 2))
    axioms = ["maximum", "agent_sp", "institution_sp"]
    a = sweep(universe, ["safe", "da"], axioms, jobs=1)
    b = sweep(universe, ["safe", "da"], axioms, jobs=2, chunk_size=40)
    assert a.counts == b.counts and a.witnesses == b.witnesses


def test_sweep_records_errors_and_continues():
    universe = list(random_instances(9, 2, 3, seed=0))
    res = sweep(universe, ["safe"], ["d_efficiency", "ir"])
    assert res.errors["safe/d_efficiency"] == 3
    assert res.count("safe", "ir") == 0 and res.instances == 3


def test_sweep_rejects_unknown_mechanism():
    with pytest.raises(ValueError):
        sweep([], ["nope"], [])
