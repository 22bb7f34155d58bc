"""Attack structures: products of the attacker and operator observers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .alphabet import build_bounded_attack_automaton
from .automata import (EXPOSED, Automaton, PlantModel, build_observer, compose,
                       format_estimate, parse_estimate, state_key)
from .errors import DomainError, MalformedInput
from .observers import build_attacker_observer, build_operator_observer


class StatePair(NamedTuple):
    """(attacker estimate, operator estimate[, consecutive-insertion counter])."""

    attacker: frozenset
    operator: object
    counter: int | None = None

    @property
    def exposing(self) -> bool:
        return self.operator is EXPOSED

    def sort_key(self):
        return (state_key(self.attacker), state_key(self.operator),
                -1 if self.counter is None else self.counter)

    def __str__(self):
        parts = [format_estimate(self.attacker), format_estimate(self.operator)]
        if self.counter is not None:
            parts.append(str(self.counter))
        return "(" + "|".join(parts) + ")"

    def __repr__(self):
        return f"StatePair{self}"


def parse_state_pair(text: str) -> StatePair:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise MalformedInput(f"not a state pair: {text!r}")
    parts = text[1:-1].split("|")
    if len(parts) not in (2, 3):
        raise MalformedInput(f"not a state pair: {text!r}")
    counter = int(parts[2]) if len(parts) == 3 else None
    return StatePair(parse_estimate(parts[0]), parse_estimate(parts[1]), counter)


@dataclass(frozen=True, eq=False)
class AttackStructure:
    automaton: Automaton
    plant: PlantModel
    observer: Automaton
    bound: int | None = None
    stealthy: frozenset = field(init=False)
    exposing: frozenset = field(init=False)

    def __post_init__(self):
        exposing = frozenset(r for r in self.automaton.states if r.exposing)
        object.__setattr__(self, "exposing", exposing)
        object.__setattr__(self, "stealthy", self.automaton.states - exposing)

    @property
    def initial(self) -> StatePair:
        return self.automaton.initial

    @property
    def states(self) -> frozenset:
        return self.automaton.states

    def step(self, r, a):
        return self.automaton.step(r, a)

    @property
    def unbounded(self) -> bool:
        return self.bound is None

    def no_attack_region(self) -> frozenset:
        """States where attacker and operator agree."""
        return frozenset(r for r in self.states if r.attacker == r.operator)


def build_unbounded_attack_structure(plant: PlantModel) -> AttackStructure:
    obs = build_observer(plant)
    att = build_attacker_observer(obs, plant.insertable, plant.erasable)
    opr = build_operator_observer(obs, plant.insertable, plant.erasable)
    product = compose(att, opr).relabel(lambda q: StatePair(q[0], q[1]))
    return AttackStructure(product, plant, obs)


def build_bounded_attack_structure(a_inf: AttackStructure, n: int) -> AttackStructure:
    if not a_inf.unbounded:
        raise DomainError("expected an unbounded attack structure")
    if n < 0:
        raise DomainError("bound must be non-negative")
    g_n = build_bounded_attack_automaton(a_inf.automaton.alphabet, n)
    product = compose(a_inf.automaton, g_n).relabel(
        lambda q: StatePair(q[0].attacker, q[0].operator, q[1]))
    return AttackStructure(product, a_inf.plant, a_inf.observer, bound=n)


def build_attack_structure(plant: PlantModel, bound: int | None = None) -> AttackStructure:
    a_inf = build_unbounded_attack_structure(plant)
    return a_inf if bound is None else build_bounded_attack_structure(a_inf, bound)


def classify_states(a: AttackStructure) -> tuple[frozenset, frozenset]:
    """Return ``(stealthy, exposing)``."""
    return a.stealthy, a.exposing
