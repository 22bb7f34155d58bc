"""Misleading relations, the harmfulness decision and the attack-session engine."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .alphabet import (AttackEvent, Kind, attacked_observation, erase, format_word,
                       plain, reduction_projection)
from .automata import EXPOSED, format_estimate, state_key
from .errors import DomainError, InvalidChoice, ProtocolError
from .supremal import SupremalSubstructure, insertion_escapes, is_insertion_escape

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExplicitRelation:
    pairs: frozenset  # of (frozenset, frozenset)

    def holds(self, b, b_bar) -> bool:
        return (frozenset(b), frozenset(b_bar)) in self.pairs


@dataclass(frozen=True)
class CriticalRelation:
    """True estimate touches a critical state while the deceived one avoids them all."""

    critical: frozenset

    def holds(self, b, b_bar) -> bool:
        return bool(b & self.critical) and not (b_bar & self.critical)


MisleadingRelation = ExplicitRelation | CriticalRelation


def relation_holds(rel: MisleadingRelation, b, b_bar) -> bool:
    if b is EXPOSED or b_bar is EXPOSED:
        raise DomainError("misleading relations are never queried on the exposed estimate")
    return rel.holds(b, b_bar)


@dataclass(frozen=True)
class Witness:
    state: object
    attack_word: tuple
    s: tuple
    s_prime: tuple

    def as_dict(self) -> dict:
        return {
            "state": str(self.state),
            "attacker_estimate": format_estimate(self.state.attacker),
            "operator_estimate": format_estimate(self.state.operator),
            "attack_word": [str(a) for a in self.attack_word],
            "s": list(self.s),
            "s_prime": list(self.s_prime),
        }


@dataclass(frozen=True)
class HarmVerdict:
    harmful: bool
    witnesses: list
    # non-preempting states in the relation that no session can reach
    unreachable: list = field(default_factory=list)


def session_reachable(sub: SupremalSubstructure) -> dict:
    """Shortest attack words reaching each state by runs a session can perform.

    Plant events are only taken from non-preempting states, mirroring the
    rule that the attacker never waits in a preempting state.  Ties are broken
    on event labels, so the words are deterministic.
    """
    start = sub.initial
    words = {start: ()}
    queue = deque([start])
    while queue:
        r = queue.popleft()
        for ev in sub.automaton.enabled(r):
            if ev.kind is not Kind.INSERT and r not in sub.non_preempting:
                continue
            nxt = sub.step(r, ev)
            if nxt not in words:
                words[nxt] = words[r] + (ev,)
                queue.append(nxt)
    return words


def check_harmful(sub: SupremalSubstructure, rel: MisleadingRelation,
                  max_witnesses: int | None = 20) -> HarmVerdict:
    candidates = [r for r in sub.non_preempting if relation_holds(rel, r.attacker, r.operator)]
    reach = session_reachable(sub)
    witnesses = []
    unreachable = []
    for r in candidates:
        if r not in reach:
            unreachable.append(r)
            continue
        w = reach[r]
        witnesses.append(Witness(r, w, attacked_observation(w), reduction_projection(w)))
    witnesses.sort(key=lambda wt: (len(wt.attack_word), [str(a) for a in wt.attack_word],
                                   state_key(wt.state)))
    unreachable.sort(key=state_key)
    if unreachable:
        log.warning("non-preempting states in the relation with no session run: %s",
                    ", ".join(map(str, unreachable)))
    if max_witnesses is not None:
        witnesses = witnesses[:max_witnesses]
    return HarmVerdict(bool(witnesses), witnesses, unreachable)


@dataclass
class AttackSession:
    """One run of the attacker against the plant, driven event by event.

    ``f_trace`` maps every observation seen so far to the attack word the
    attacker has produced for it.
    """

    substructure: SupremalSubstructure
    current: object
    transcript: tuple = ()
    s_so_far: tuple = ()
    f_trace: dict = field(default_factory=dict)

    @classmethod
    def start(cls, sub: SupremalSubstructure, w_plus: Iterable[AttackEvent] = ()) -> AttackSession:
        w_plus = tuple(w_plus)
        if not is_insertion_escape(sub, sub.initial, w_plus):
            raise InvalidChoice(f"{format_word(w_plus)} does not lead to a non-preempting state")
        current = sub.automaton.run(w_plus, start=sub.initial)
        return cls(sub, current, w_plus, (), {(): w_plus})

    def producible(self, e: str) -> bool:
        host = self.substructure.host
        if e not in host.plant.observable:
            return False
        return host.observer.step(self.current.attacker, e) is not None

    def options(self, e: str) -> dict:
        """Admissible first moves for plant event ``e``, each with its escape words."""
        if not self.producible(e):
            raise ProtocolError(f"plant cannot produce {e!r} from {self.current}")
        sub = self.substructure
        result = {}
        moves = [plain(e)]
        if e in sub.host.plant.erasable:
            moves.append(erase(e))
        for move in moves:
            nxt = sub.step(self.current, move)
            if nxt is not None:
                result[move] = insertion_escapes(sub, nxt)
        return result

    def step(self, e: str, move: AttackEvent, w_plus: Iterable[AttackEvent] = ()) -> AttackSession:
        if not self.producible(e):
            raise ProtocolError(f"plant cannot produce {e!r} from {self.current}")
        sub = self.substructure
        w_plus = tuple(w_plus)
        if move.event != e or move.kind is Kind.INSERT:
            raise InvalidChoice(f"{move} is not a response to plant event {e}")
        nxt = sub.step(self.current, move)
        if nxt is None:
            raise InvalidChoice(f"{move} leaves the substructure from {self.current}")
        if not is_insertion_escape(sub, nxt, w_plus):
            raise InvalidChoice(f"{format_word(w_plus)} does not lead to a non-preempting state")
        chunk = (move,) + w_plus
        self.current = sub.automaton.run(w_plus, start=nxt)
        self.transcript += chunk
        self.s_so_far += (e,)
        self.f_trace[self.s_so_far] = self.transcript
        return self

    def first_option(self, e: str) -> tuple[AttackEvent, tuple]:
        opts = self.options(e)
        move = min(opts, key=str)
        return move, opts[move][0]


def session_start(sub: SupremalSubstructure, w_plus=()) -> AttackSession:
    return AttackSession.start(sub, w_plus)


def session_options(sess: AttackSession, e: str) -> dict:
    return sess.options(e)


def session_step(sess: AttackSession, e: str, choice: tuple) -> AttackSession:
    move, w_plus = choice
    return sess.step(e, move, w_plus)


def split_attack_word(word) -> tuple[tuple, list]:
    """Split into the initial insertion block and one (move, insertions) per plant event."""
    word = tuple(word)
    i = 0
    while i < len(word) and word[i].kind is Kind.INSERT:
        i += 1
    head, steps = word[:i], []
    while i < len(word):
        move = word[i]
        j = i + 1
        while j < len(word) and word[j].kind is Kind.INSERT:
            j += 1
        steps.append((move, word[i + 1:j]))
        i = j
    return head, steps


def replay(sub: SupremalSubstructure, word) -> AttackSession:
    """Drive a fresh session through ``word``; raises if it is not a session run."""
    head, steps = split_attack_word(word)
    sess = AttackSession.start(sub, head)
    for move, w_plus in steps:
        sess.step(move.event, move, w_plus)
    return sess


def plant_walk(plant, rng, max_events: int = 12, max_steps: int | None = None):
    """Observable events of a random run of the plant, stopping at dead ends."""
    max_steps = max_steps if max_steps is not None else 10 * max_events + len(plant.states)
    x = plant.initial
    emitted = 0
    for _ in range(max_steps):
        if emitted >= max_events:
            return
        enabled = plant.enabled(x)
        if not enabled:
            return
        e = rng.choice(enabled)
        x = plant.step(x, e)
        if e in plant.observable:
            emitted += 1
            yield e
