"""Acceptance criteria, one test per criterion.

A PASS/FAIL line per criterion is printed at the end of the pytest run (see
conftest.py).  Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import os
import random
import subprocess
import sys
import time

import pytest

from desattack.alphabet import (attacked_observation, erase, insert,
                                max_consecutive_insertions, parse_attack_word, plain,
                                reduction_projection)
from desattack.automata import EXPOSED, build_observer, format_estimate
from desattack.errors import InvalidChoice, ProtocolError
from desattack.formats import load_plant, load_relation
from desattack.harm import AttackSession, check_harmful, plant_walk
from desattack.observers import build_attacker_observer, build_operator_observer
from desattack.oracle import (EnumerationBudget, attack_languages, consistent_states,
                              maintainable, observations, random_corpus)
from desattack.structure import build_attack_structure, build_bounded_attack_structure
from desattack.supremal import g, g2, insertion_escapes, supremal_fixed_point, trim_supremal
from conftest import PLANT_FILE, RELATION_FILE, ROOT
from helpers import est, language, pair

BUDGET = EnumerationBudget(6, 8)
CORPUS_SEED, CORPUS_SIZE = 2024, 20
BOUNDS = (0, 1, 2)


@pytest.fixture(scope="module")
def corpus():
    plants = random_corpus(CORPUS_SEED, CORPUS_SIZE)
    assert len(plants) >= 20
    return plants


@pytest.mark.criterion(1)
def test_c1_fixture_observer():
    start = time.perf_counter()
    obs = build_observer(load_plant(PLANT_FILE))
    elapsed = time.perf_counter() - start
    names = {format_estimate(b) for b in obs.states}
    edges = {(format_estimate(s), e, format_estimate(d)) for (s, e), d in obs.delta.items()}
    assert names == {"{0}", "{1,2}", "{3}", "{4}", "{5}", "{6}", "{7,8}", "{8}"}
    assert edges == {
        ("{0}", "a", "{1,2}"), ("{1,2}", "c", "{3}"), ("{1,2}", "a", "{5}"),
        ("{3}", "a", "{4}"), ("{4}", "g", "{4}"), ("{5}", "c", "{6}"),
        ("{6}", "a", "{7,8}"), ("{7,8}", "d", "{8}"), ("{8}", "d", "{8}"),
    }
    assert elapsed < 1.0


@pytest.mark.criterion(2)
def test_c2_dual_observer_facts(plant):
    obs = build_observer(plant)
    att = build_attacker_observer(obs, plant.insertable, plant.erasable)
    opr = build_operator_observer(obs, plant.insertable, plant.erasable)
    # attacker observer
    for ev in (plain("c"), erase("c")):
        assert att.step(est(1, 2), ev) == est(3)
        assert att.step(est(5), ev) == est(6)
    for ev in (plain("g"), erase("g")):
        assert att.step(est(4), ev) == est(4)
    for b in att.states:
        assert att.step(b, insert("c")) == b and att.step(b, insert("d")) == b
    # operator observer
    for ev in (plain("c"), insert("c")):
        assert opr.step(est(1, 2), ev) == est(3)
        assert opr.step(est(5), ev) == est(6)
    for ev in (plain("d"), insert("d")):
        assert opr.step(est(7, 8), ev) == est(8)
        assert opr.step(est(8), ev) == est(8)
    for b in opr.states - {EXPOSED}:
        assert opr.step(b, erase("c")) == b and opr.step(b, erase("g")) == b
        assert len(opr.out(b)) == len(opr.alphabet)
    assert EXPOSED in opr.states and opr.out(EXPOSED) == {}


@pytest.mark.criterion(3)
def test_c3_supremal_facts(a_inf, sub):
    assert pair("({6}|{4})") in a_inf.stealthy
    assert pair("({6}|{4})") not in g(a_inf, a_inf.stealthy)
    assert pair("({6}|{4})") not in sub.states
    assert pair("({6}|{5})") in sub.preempting
    assert (insert("c"),) in insertion_escapes(sub, pair("({6}|{5})"))
    assert pair("({5}|{6})") in sub.non_preempting


@pytest.mark.criterion(4)
def test_c4_harmful_witness():
    start = time.perf_counter()
    plant = load_plant(PLANT_FILE)
    verdict = check_harmful(trim_supremal(build_attack_structure(plant)),
                            load_relation(RELATION_FILE, plant))
    elapsed = time.perf_counter() - start
    assert verdict.harmful
    w = verdict.witnesses[0]
    assert w.state == pair("({5}|{6})")
    assert w.attack_word == parse_attack_word("a a c+")
    assert w.s == ("a", "a") and w.s_prime == ("a", "a", "c")
    assert elapsed < 1.0


@pytest.mark.criterion(5)
def test_c5_oracle_equivalences(corpus):
    start = time.perf_counter()
    k = BUDGET.max_attack_word_len
    for p in corpus:
        obs = build_observer(p)
        att = build_attacker_observer(obs, p.insertable, p.erasable)
        opr = build_operator_observer(obs, p.insertable, p.erasable)
        a_inf = build_attack_structure(p)
        l_f, w_s, w_e = attack_languages(p, budget=BUDGET)
        stealthy_obs = observations(p, k)
        # attacker observer language and estimates
        l_att = language(att, k)
        assert l_att == l_f
        for w in l_att:
            assert att.run(w) == consistent_states(p, attacked_observation(w))
        # operator observer language and estimates
        l_opr = language(opr, k)
        assert l_opr == w_s | w_e
        for w in l_opr:
            if w in w_s:
                assert opr.run(w) == consistent_states(p, reduction_projection(w))
            else:
                assert opr.run(w) is EXPOSED
        # unbounded structure
        l_a = language(a_inf.automaton, k)
        assert l_a == l_f & (w_s | w_e)
        for w in l_a:
            r = a_inf.automaton.run(w)
            assert r.attacker == consistent_states(p, attacked_observation(w))
            if reduction_projection(w) in stealthy_obs:
                assert r.operator == consistent_states(p, reduction_projection(w))
            else:
                assert r.exposing
        # bounded structures
        for n in BOUNDS:
            a_n = build_bounded_attack_structure(a_inf, n)
            l_fn, w_s_n, w_e_n = attack_languages(p, n=n, budget=BUDGET)
            l_an = language(a_n.automaton, k)
            assert l_an == {w for w in l_a if max_consecutive_insertions(w) <= n}
            assert l_an == l_fn & (w_s_n | w_e_n)
        # supremal substructure against the safety game
        for n in (None, 1):
            s = trim_supremal(build_attack_structure(p, n))
            assert language(s.automaton, k) == maintainable(p, n, BUDGET)
    assert time.perf_counter() - start < 60.0


@pytest.mark.criterion(6)
def test_c6_fixpoint_properties(corpus):
    import itertools

    start = time.perf_counter()
    for p in corpus:
        for n in (None,) + BOUNDS:
            a = build_attack_structure(p, n)
            r_sf = supremal_fixed_point(a)
            assert g(a, r_sf) == r_sf
            assert a.no_attack_region() <= r_sf
            for r in a.stealthy - r_sf:
                assert g(a, r_sf | {r}) != r_sf | {r}
            if len(a.stealthy) <= 12:
                members = sorted(a.stealthy, key=str)
                for size in range(len(members) + 1):
                    for region in itertools.combinations(members, size):
                        region = frozenset(region)
                        if g(a, region) == region:
                            assert region <= r_sf
            s = trim_supremal(a)
            assert s.preempting == g2(a, s.states)
    assert time.perf_counter() - start < 60.0


def _sessions(plant, count=100, max_events=12):
    """Run seeded first-option sessions; return the number of violations."""
    sub = trim_supremal(build_attack_structure(plant))
    violations = 0
    for seed in range(count):
        rng = random.Random(seed)
        try:
            sess = AttackSession.start(sub, insertion_escapes(sub, sub.initial, limit=1)[0])
            for e in plant_walk(plant, rng, max_events):
                move, w_plus = sess.first_option(e)
                sess.step(e, move, w_plus)
                if sess.current.operator is EXPOSED:
                    violations += 1
                    break
        except (InvalidChoice, ProtocolError, ValueError):
            violations += 1
            continue
        if not consistent_states(plant, reduction_projection(sess.transcript)):
            violations += 1
        elif not sub.automaton.accepts(sess.transcript):
            violations += 1
    return violations


@pytest.mark.criterion(7)
def test_c7_session_safety(plant, corpus):
    total = sum(_sessions(p) for p in [plant] + corpus)
    assert total == 0


@pytest.mark.criterion(8)
def test_c8_bounded_coherence(corpus, plant, relation):
    k = BUDGET.max_attack_word_len
    for p in corpus:
        l_inf = language(trim_supremal(build_attack_structure(p)).automaton, k)
        for n in BOUNDS:
            l_n = language(trim_supremal(build_attack_structure(p, n)).automaton, k)
            assert l_n <= l_inf
    verdict = check_harmful(trim_supremal(build_attack_structure(plant, 1)), relation)
    assert verdict.harmful
    assert verdict.witnesses[0].attack_word == parse_attack_word("a a c+")
    assert verdict.witnesses[0].state == pair("({5}|{6}|1)")


CLI_RUNS = [
    ["observer", "{plant}", "--json", "-", "--dot", "-"],
    ["attack-structure", "{plant}", "--unbounded", "--json", "-", "--dot", "-"],
    ["attack-structure", "{plant}", "--bound", "1", "--json", "-", "--dot", "-"],
    ["supremal", "{plant}", "--json", "-", "--dot", "-"],
    ["check-harmful", "{plant}", "{relation}", "--json", "-", "--dot", "-"],
    ["check-harmful", "{plant}", "{relation}", "--sweep-bound", "0..2", "--json", "-"],
    ["play", "{plant}", "{relation}", "--seed", "7"],
    ["play", "{plant}", "{relation}", "--seed", "7", "--strategy", "random", "--bound", "2"],
]


@pytest.mark.criterion(9)
def test_c9_cli_determinism():
    for template in CLI_RUNS:
        argv = [a.format(plant=PLANT_FILE, relation=RELATION_FILE) for a in template]
        outputs = []
        for hash_seed in ("1", "2"):
            env = {**os.environ, "PYTHONHASHSEED": hash_seed}
            proc = subprocess.run([sys.executable, "-m", "desattack.cli", *argv],
                                  capture_output=True, env=env, cwd=ROOT, timeout=60)
            assert proc.returncode in (0, 1), proc.stderr
            outputs.append((proc.returncode, proc.stdout, proc.stderr))
        assert outputs[0] == outputs[1], template


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
