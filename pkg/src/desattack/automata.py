"""Partial deterministic automata, plant models and the observer construction.

Transition functions are partial: a missing ``(state, event)`` key means the
event is not defined there.  No trap states are ever introduced here.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import MalformedInput

State = Hashable
Event = Hashable


def natural_key(name: str) -> tuple:
    """Sort key ordering numeric ids numerically and everything else lexically."""
    return (0, int(name), "") if name.isdigit() else (1, 0, name)


class _Exposed:
    """Operator estimate reached once the corrupted observation is impossible."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EXPOSED"

    def __str__(self):
        return "∅"

    def __reduce__(self):
        return (_Exposed, ())


EXPOSED = _Exposed()


def format_estimate(estimate) -> str:
    if estimate is EXPOSED:
        return "∅"
    return "{" + ",".join(sorted(estimate, key=natural_key)) + "}"


def parse_estimate(text: str):
    text = text.strip()
    if text == "∅":
        return EXPOSED
    if not (text.startswith("{") and text.endswith("}")):
        raise MalformedInput(f"not an estimate: {text!r}")
    members = [m.strip() for m in text[1:-1].split(",") if m.strip()]
    if not members:
        raise MalformedInput("estimates are never empty")
    return frozenset(members)


def state_key(state) -> tuple:
    """Deterministic sort key for any state used in this package."""
    if isinstance(state, frozenset):
        return (0, tuple(sorted(natural_key(str(m)) for m in state)))
    if state is EXPOSED:
        return (1,)
    if hasattr(state, "sort_key"):
        return (2, state.sort_key())
    if isinstance(state, tuple):
        return (3, tuple(state_key(s) for s in state))
    return (4, natural_key(str(state)))


def state_label(state) -> str:
    if isinstance(state, frozenset) or state is EXPOSED:
        return format_estimate(state)
    if isinstance(state, tuple) and not hasattr(state, "sort_key"):
        return "(" + "|".join(state_label(s) for s in state) + ")"
    return str(state)


def event_label(event) -> str:
    return str(event)


@dataclass(frozen=True)
class PlantModel:
    """Partially observed DFA with the compromised-event annotations."""

    states: tuple[str, ...]
    initial: str
    observable: frozenset[str]
    unobservable: frozenset[str]
    transitions: Mapping[tuple[str, str], str]
    insertable: frozenset[str] = frozenset()
    erasable: frozenset[str] = frozenset()

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "states", tuple(sorted(set(self.states), key=natural_key)))
        for name in ("observable", "unobservable", "insertable", "erasable"):
            set_(self, name, frozenset(getattr(self, name)))
        set_(self, "transitions", MappingProxyType(dict(self.transitions)))
        self._validate()

    def _validate(self):
        states = set(self.states)
        if self.initial not in states:
            raise MalformedInput(f"initial state {self.initial!r} is not declared")
        for name in self.observable | self.unobservable:
            if not isinstance(name, str) or not name or name[-1] in "+-":
                raise MalformedInput(f"bad event name {name!r}")
        both = self.observable & self.unobservable
        if both:
            raise MalformedInput(f"events both observable and unobservable: {sorted(both)}")
        for kind, events in (("insertable", self.insertable), ("erasable", self.erasable)):
            extra = events - self.observable
            if extra:
                raise MalformedInput(f"{kind} events must be observable: {sorted(extra)}")
        for (src, event), dst in self.transitions.items():
            if src not in states or dst not in states:
                raise MalformedInput(f"transition {src} -{event}-> {dst} uses an undeclared state")
            if event not in self.events:
                raise MalformedInput(f"transition {src} -{event}-> {dst} uses an undeclared event")

    @classmethod
    def from_triples(cls, states, initial, observable, unobservable,
                     triples: Iterable[Sequence[str]], insertable=(), erasable=()):
        delta: dict[tuple[str, str], str] = {}
        for src, event, dst in triples:
            if (src, event) in delta:
                raise MalformedInput(f"duplicate transition for ({src}, {event})")
            delta[(src, event)] = dst
        return cls(tuple(states), initial, frozenset(observable), frozenset(unobservable),
                   delta, frozenset(insertable), frozenset(erasable))

    @property
    def events(self) -> frozenset[str]:
        return self.observable | self.unobservable

    @property
    def compromised(self) -> frozenset[str]:
        return self.insertable | self.erasable

    def step(self, state: str, event: str) -> str | None:
        return self.transitions.get((state, event))

    def enabled(self, state: str) -> list[str]:
        return sorted(e for (s, e) in self.transitions if s == state)

    def run(self, word: Iterable[str]) -> str | None:
        state = self.initial
        for event in word:
            state = self.step(state, event)
            if state is None:
                return None
        return state

    def reachable_states(self) -> set[str]:
        seen = {self.initial}
        stack = [self.initial]
        while stack:
            x = stack.pop()
            for (src, _), dst in self.transitions.items():
                if src == x and dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
        return seen

    def with_compromised(self, insertable=None, erasable=None) -> PlantModel:
        return PlantModel(self.states, self.initial, self.observable, self.unobservable,
                          self.transitions,
                          self.insertable if insertable is None else frozenset(insertable),
                          self.erasable if erasable is None else frozenset(erasable))


@dataclass(frozen=True, eq=False)
class Automaton:
    """Deterministic automaton with a partial transition map, all states accepting.

    Used for observers, the two attack-alphabet observers, the bounded
    attack automaton and the attack structures built from them.
    """

    states: frozenset
    alphabet: frozenset
    delta: Mapping[tuple[Any, Any], Any]
    initial: Any
    _out: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "delta", MappingProxyType(dict(self.delta)))
        if self.initial not in self.states:
            raise MalformedInput("initial state is not a state of the automaton")
        out: dict = {q: {} for q in self.states}
        for (src, event), dst in self.delta.items():
            if src not in self.states or dst not in self.states:
                raise MalformedInput(f"edge {src!r} -{event}-> {dst!r} leaves the state set")
            if event not in self.alphabet:
                raise MalformedInput(f"edge label {event!r} is not in the alphabet")
            out[src][event] = dst
        object.__setattr__(self, "_out", out)

    def step(self, state, event):
        return self._out.get(state, {}).get(event)

    def run(self, word: Iterable, start=None):
        """Return the state reached by ``word`` or ``None`` if it is not generated."""
        state = self.initial if start is None else start
        for event in word:
            state = self._out[state].get(event)
            if state is None:
                return None
        return state

    def accepts(self, word: Iterable) -> bool:
        return self.run(word) is not None

    def out(self, state) -> Mapping:
        return self._out[state]

    def enabled(self, state) -> list:
        return sorted(self._out[state], key=event_label)

    def edges(self) -> Iterator[tuple]:
        for (src, event), dst in sorted(
                self.delta.items(),
                key=lambda kv: (state_key(kv[0][0]), event_label(kv[0][1]))):
            yield src, event, dst

    def sorted_states(self) -> list:
        return sorted(self.states, key=state_key)

    def words(self, max_len: int) -> Iterator[tuple]:
        """All generated words up to ``max_len``, depth first in label order."""
        stack = [((), self.initial)]
        while stack:
            word, q = stack.pop()
            yield word
            if len(word) < max_len:
                for event in reversed(self.enabled(q)):
                    stack.append((word + (event,), self._out[q][event]))

    def relabel(self, fn: Callable) -> Automaton:
        mapping = {q: fn(q) for q in self.states}
        if len(set(mapping.values())) != len(mapping):
            raise MalformedInput("relabelling must be injective")
        return Automaton({mapping[q] for q in self.states}, self.alphabet,
                         {(mapping[s], e): mapping[d] for (s, e), d in self.delta.items()},
                         mapping[self.initial])

    def restrict(self, keep: Iterable) -> Automaton:
        """Drop states outside ``keep`` (and their arcs), then trim to the reachable part."""
        keep = set(keep)
        if self.initial not in keep:
            raise MalformedInput("cannot restrict away the initial state")
        delta = {(s, e): d for (s, e), d in self.delta.items() if s in keep and d in keep}
        return Automaton(keep, self.alphabet, delta, self.initial).accessible()

    def accessible(self) -> Automaton:
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            q = queue.popleft()
            for dst in self._out[q].values():
                if dst not in seen:
                    seen.add(dst)
                    queue.append(dst)
        delta = {(s, e): d for (s, e), d in self.delta.items() if s in seen}
        return Automaton(seen, self.alphabet, delta, self.initial)


def natural_projection(word: Iterable, sub_alphabet) -> tuple:
    return tuple(e for e in word if e in sub_alphabet)


def unobservable_reach(plant: PlantModel, seed: Iterable[str]) -> frozenset[str]:
    """Smallest superset of ``seed`` closed under unobservable transitions."""
    seed = set(seed)
    unknown = seed - set(plant.states)
    if unknown:
        raise MalformedInput(f"states not in plant: {sorted(unknown)}")
    reach = set(seed)
    stack = list(seed)
    while stack:
        x = stack.pop()
        for e in plant.unobservable:
            y = plant.step(x, e)
            if y is not None and y not in reach:
                reach.add(y)
                stack.append(y)
    return frozenset(reach)


def build_observer(plant: PlantModel) -> Automaton:
    """Subset construction over the observable events, reachable part only.

    An observable event whose successor set is empty is left undefined.
    """
    b0 = unobservable_reach(plant, [plant.initial])
    observable = sorted(plant.observable)
    delta = {}
    seen = {b0}
    queue = deque([b0])
    while queue:
        b = queue.popleft()
        for e in observable:
            targets = {plant.step(x, e) for x in b} - {None}
            if not targets:
                continue
            nb = unobservable_reach(plant, targets)
            delta[(b, e)] = nb
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return Automaton(seen, plant.observable, delta, b0)


def compose(a1: Automaton, a2: Automaton) -> Automaton:
    """Concurrent (synchronous) composition; states are pairs, reachable part only."""
    shared = a1.alphabet & a2.alphabet
    alphabet = a1.alphabet | a2.alphabet
    start = (a1.initial, a2.initial)
    delta = {}
    seen = {start}
    queue = deque([start])
    while queue:
        q1, q2 = pair = queue.popleft()
        for e in sorted(alphabet, key=event_label):
            if e in shared:
                n1, n2 = a1.step(q1, e), a2.step(q2, e)
                if n1 is None or n2 is None:
                    continue
            elif e in a1.alphabet:
                n1, n2 = a1.step(q1, e), q2
                if n1 is None:
                    continue
            else:
                n1, n2 = q1, a2.step(q2, e)
                if n2 is None:
                    continue
            nxt = (n1, n2)
            delta[(pair, e)] = nxt
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return Automaton(seen, alphabet, delta, start)
