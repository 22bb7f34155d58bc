"""Attacker and operator observers over the attack alphabet.

Both start from a copy of the plant observer.  The attacker knows which
readings are genuine, so erasures move it like the real event and insertions
leave it in place.  The operator cannot tell insertions from real events and
does not see erasures; any reading it cannot explain sends it to ``EXPOSED``.
"""

from __future__ import annotations

from .alphabet import attack_alphabet, erase, insert, plain
from .automata import EXPOSED, Automaton
from .errors import MalformedInput


def _check_compromised(obs: Automaton, e_ins, e_era):
    extra = (set(e_ins) | set(e_era)) - set(obs.alphabet)
    if extra:
        raise MalformedInput(f"compromised events not observable: {sorted(extra)}")


def build_attacker_observer(obs: Automaton, e_ins=(), e_era=()) -> Automaton:
    _check_compromised(obs, e_ins, e_era)
    delta = {(b, plain(e)): b2 for (b, e), b2 in obs.delta.items()}
    for e in e_era:
        for b in obs.states:
            target = obs.step(b, e)
            if target is not None:
                delta[(b, erase(e))] = target
    for e in e_ins:
        for b in obs.states:
            delta[(b, insert(e))] = b
    return Automaton(obs.states, attack_alphabet(obs.alphabet, e_ins, e_era),
                     delta, obs.initial)


def build_operator_observer(obs: Automaton, e_ins=(), e_era=()) -> Automaton:
    _check_compromised(obs, e_ins, e_era)
    alphabet = attack_alphabet(obs.alphabet, e_ins, e_era)
    delta = {(b, plain(e)): b2 for (b, e), b2 in obs.delta.items()}
    for e in e_ins:
        for b in obs.states:
            target = obs.step(b, e)
            if target is not None:
                delta[(b, insert(e))] = target
    for e in e_era:
        for b in obs.states:
            delta[(b, erase(e))] = b
    for a in alphabet:
        for b in obs.states:
            delta.setdefault((b, a), EXPOSED)
    return Automaton(obs.states | {EXPOSED}, alphabet, delta, obs.initial).accessible()
