import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from desattack.automata import (EXPOSED, Automaton, PlantModel, build_observer, compose,
                                format_estimate, natural_projection, parse_estimate,
                                unobservable_reach)
from desattack.errors import MalformedInput
from desattack.oracle import consistent_states, plant_language
from helpers import est, language, plants


# -- natural projection ------------------------------------------------------

def test_projection_examples():
    assert natural_projection(["a", "b", "c"], {"a", "c"}) == ("a", "c")
    assert natural_projection([], {"a"}) == ()
    assert natural_projection(["b", "b"], {"a", "c"}) == ()


@given(st.lists(st.sampled_from("abcdg")), st.sets(st.sampled_from("abcdg")))
def test_projection_idempotent_and_shrinking(word, sub):
    once = natural_projection(word, sub)
    assert natural_projection(once, sub) == once
    assert len(once) <= len(word)


# -- plant model ---------------------------------------------------------------

def test_plant_rejects_bad_models():
    ok = dict(states=("0", "1"), initial="0", observable={"a"}, unobservable={"b"},
              transitions={("0", "a"): "1"})
    PlantModel(**ok)
    with pytest.raises(MalformedInput):
        PlantModel(**{**ok, "initial": "9"})
    with pytest.raises(MalformedInput):
        PlantModel(**{**ok, "unobservable": {"a"}})
    with pytest.raises(MalformedInput):
        PlantModel(**ok, insertable={"b"})
    with pytest.raises(MalformedInput):
        PlantModel(**ok, erasable={"z"})
    with pytest.raises(MalformedInput):
        PlantModel(**{**ok, "transitions": {("0", "a"): "7"}})
    with pytest.raises(MalformedInput):
        PlantModel(**{**ok, "transitions": {("0", "z"): "1"}})
    with pytest.raises(MalformedInput):
        PlantModel(**{**ok, "observable": {"a+"}})
    with pytest.raises(MalformedInput):
        PlantModel.from_triples(["0"], "0", ["a"], [], [("0", "a", "0"), ("0", "a", "0")])


def test_insertable_and_erasable_may_overlap():
    p = PlantModel.from_triples(["0"], "0", ["a"], [], [("0", "a", "0")], ["a"], ["a"])
    assert p.compromised == {"a"}


def test_plant_run(plant):
    assert plant.run(["a", "b", "c"]) == "3"
    assert plant.run(["a", "c"]) is None
    assert plant.reachable_states() == set(plant.states)


# -- estimates -------------------------------------------------------------------

def test_estimate_format_round_trip():
    assert format_estimate(est(7, 8)) == "{7,8}"
    assert format_estimate(est(10, 9)) == "{9,10}"
    assert parse_estimate("{7,8}") == est(7, 8)
    assert parse_estimate("∅") is EXPOSED
    assert EXPOSED != frozenset()
    with pytest.raises(MalformedInput):
        parse_estimate("{}")


# -- unobservable reach ------------------------------------------------------------

def test_unobservable_reach_fixture(plant):
    assert unobservable_reach(plant, {"0"}) == est(0)
    assert unobservable_reach(plant, {"1"}) == est(1, 2)
    assert unobservable_reach(plant, set()) == frozenset()
    with pytest.raises(MalformedInput):
        unobservable_reach(plant, {"42"})


def test_unobservable_reach_terminates_on_cycles():
    p = PlantModel.from_triples(["0", "1", "2"], "0", ["a"], ["b", "u"],
                                [("0", "b", "1"), ("1", "b", "0"), ("1", "u", "2"),
                                 ("2", "u", "2")])
    assert unobservable_reach(p, {"0"}) == est(0, 1, 2)


# -- observer --------------------------------------------------------------------

OBSERVER_EDGES = {
    ("0", "a", "1,2"), ("1,2", "c", "3"), ("1,2", "a", "5"), ("3", "a", "4"),
    ("4", "g", "4"), ("5", "c", "6"), ("6", "a", "7,8"), ("7,8", "d", "8"), ("8", "d", "8"),
}


def _e(text):
    return frozenset(text.split(","))


def test_observer_fixture(plant):
    obs = build_observer(plant)
    assert obs.initial == est(0)
    assert {format_estimate(b) for b in obs.states} == {
        "{0}", "{1,2}", "{3}", "{4}", "{5}", "{6}", "{7,8}", "{8}"}
    assert set(obs.delta.items()) == {((_e(s), e), _e(d)) for s, e, d in OBSERVER_EDGES}
    assert obs.run("aa") == est(5)


def test_observer_without_unobservable_events_mirrors_plant():
    p = PlantModel.from_triples(["0", "1", "2"], "0", ["a", "c"], [],
                                [("0", "a", "1"), ("1", "c", "2"), ("2", "a", "0")])
    obs = build_observer(p)
    assert obs.states == {est(0), est(1), est(2)}
    assert {(next(iter(s)), e, next(iter(d))) for (s, e), d in obs.delta.items()} == {
        (s, e, d) for (s, e), d in p.transitions.items()}


@settings(max_examples=60, deadline=None)
@given(plants())
def test_observer_sound_and_complete(p):
    obs = build_observer(p)
    words, _ = plant_language(p)
    for sigma in words:
        s = natural_projection(sigma, p.observable)
        b = obs.run(s)
        assert b is not None and p.run(sigma) in b
    for s in language(obs, 4):
        # completeness and exactness against plant paths
        assert obs.run(s) == consistent_states(p, s)


@settings(max_examples=40, deadline=None)
@given(plants())
def test_observer_states_are_reachable_and_nonempty(p):
    obs = build_observer(p)
    assert obs.accessible().states == obs.states
    assert all(b for b in obs.states)


# -- composition ------------------------------------------------------------------

def test_self_composition_is_isomorphic(plant):
    obs = build_observer(plant)
    prod = compose(obs, obs)
    assert len(prod.states) == len(obs.states)
    assert len(prod.delta) == len(obs.delta)
    assert all(q1 == q2 for q1, q2 in prod.states)


def test_composition_private_events():
    a1 = Automaton({0, 1}, {"x", "s"}, {(0, "x"): 1, (1, "s"): 0}, 0)
    a2 = Automaton({0, 1}, {"y", "s"}, {(0, "y"): 1, (1, "s"): 0}, 0)
    prod = compose(a1, a2)
    assert prod.run(["x", "y", "s"]) == (0, 0)
    assert prod.run(["x", "s"]) is None


@st.composite
def dfas(draw):
    n = draw(st.integers(1, 4))
    delta = {}
    for q, e in itertools.product(range(n), "xy"):
        if draw(st.booleans()):
            delta[(q, e)] = draw(st.integers(0, n - 1))
    return Automaton(range(n), {"x", "y"}, delta, 0)


@settings(max_examples=80, deadline=None)
@given(dfas(), dfas())
def test_composition_language_is_intersection(a1, a2):
    prod = compose(a1, a2)
    for k in range(9):
        for w in itertools.product("xy", repeat=k):
            assert prod.accepts(w) == (a1.accepts(w) and a2.accepts(w))


def test_automaton_rejects_dangling_edges():
    with pytest.raises(MalformedInput):
        Automaton({0}, {"x"}, {(0, "x"): 1}, 0)
    with pytest.raises(MalformedInput):
        Automaton({0}, {"x"}, {(0, "z"): 0}, 0)
    with pytest.raises(MalformedInput):
        Automaton({0}, {"x"}, {}, 5)
