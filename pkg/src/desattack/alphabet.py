"""Attack alphabet, attack-word projections and the n-bounded attack automaton."""

from __future__ import annotations

import enum
from typing import Iterable, NamedTuple, Sequence

from .automata import Automaton, event_label
from .errors import MalformedInput


class Kind(enum.Enum):
    PLAIN = ""
    INSERT = "+"
    ERASE = "-"


class AttackEvent(NamedTuple):
    kind: Kind
    event: str

    def __str__(self):
        return self.event + self.kind.value

    def __repr__(self):
        return f"AttackEvent({self})"

    @property
    def is_insert(self) -> bool:
        return self.kind is Kind.INSERT


def plain(e: str) -> AttackEvent:
    return AttackEvent(Kind.PLAIN, e)


def insert(e: str) -> AttackEvent:
    return AttackEvent(Kind.INSERT, e)


def erase(e: str) -> AttackEvent:
    return AttackEvent(Kind.ERASE, e)


AttackWord = tuple  # tuple[AttackEvent, ...]


def parse_attack_event(text: str) -> AttackEvent:
    """``e`` -> PLAIN, ``e+`` -> INSERT, ``e-`` -> ERASE."""
    text = text.strip()
    if not text or text in "+-":
        raise MalformedInput(f"empty attack event {text!r}")
    if text[-1] == "+":
        return insert(text[:-1])
    if text[-1] == "-":
        return erase(text[:-1])
    return plain(text)


def parse_attack_word(tokens: Iterable[str] | str) -> AttackWord:
    if isinstance(tokens, str):
        tokens = tokens.replace(",", " ").split()
    return tuple(parse_attack_event(t) for t in tokens)


def format_word(word: Sequence) -> str:
    return " ".join(event_label(e) for e in word) if word else "ε"


def attack_alphabet(observable, insertable=(), erasable=()) -> frozenset[AttackEvent]:
    observable = frozenset(observable)
    extra = (frozenset(insertable) | frozenset(erasable)) - observable
    if extra:
        raise MalformedInput(f"compromised events must be observable: {sorted(extra)}")
    return frozenset(
        [plain(e) for e in observable]
        + [insert(e) for e in insertable]
        + [erase(e) for e in erasable])


def reduction_projection(word: Iterable[AttackEvent]) -> tuple[str, ...]:
    """What the operator sees: erasures vanish, insertions look genuine."""
    return tuple(a.event for a in word if a.kind is not Kind.ERASE)


def attacked_observation(word: Iterable[AttackEvent]) -> tuple[str, ...]:
    """What the plant really emitted: insertions vanish, erasures still happened."""
    return tuple(a.event for a in word if a.kind is not Kind.INSERT)


def max_consecutive_insertions(word: Iterable[AttackEvent]) -> int:
    best = run = 0
    for a in word:
        run = run + 1 if a.kind is Kind.INSERT else 0
        best = max(best, run)
    return best


def build_bounded_attack_automaton(alphabet: Iterable[AttackEvent], n: int) -> Automaton:
    """Counter automaton allowing at most ``n`` consecutive insertions."""
    if n < 0:
        raise MalformedInput("bound must be non-negative")
    alphabet = frozenset(alphabet)
    delta = {}
    for i in range(n + 1):
        for a in alphabet:
            if a.kind is Kind.INSERT:
                if i < n:
                    delta[(i, a)] = i + 1
            else:
                delta[(i, a)] = 0
    return Automaton(range(n + 1), alphabet, delta, 0)
