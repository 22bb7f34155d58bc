"""Strongly stealthy region, supremal stealthy substructure and preempting states.

A region is a frozenset of stealthy states of an attack structure.  ``g1``
keeps states where every plant event leaving the region can be erased back
into it; ``g2`` adds states that can reach ``g1`` by insertions alone while
staying in the region.  Iterating ``g`` from the stealthy states converges to
the largest region the attacker can keep the operator inside.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .alphabet import Kind, erase, plain
from .automata import Automaton
from .errors import DomainError
from .structure import AttackStructure


def _check_region(a: AttackStructure, region) -> frozenset:
    region = frozenset(region)
    if not region <= a.stealthy:
        raise DomainError("region must contain stealthy states only")
    return region


def _escapes_region(a: AttackStructure, r, region) -> bool:
    """True if some producible plant event forces ``r`` out of ``region``."""
    erasable = a.plant.erasable
    for e in a.plant.observable:
        target = a.step(r, plain(e))
        if target is None or target in region:
            continue
        if e not in erasable:
            return True
        hidden = a.step(r, erase(e))
        if hidden is None or hidden not in region:
            return True
    return False


def g1(a: AttackStructure, region) -> frozenset:
    region = _check_region(a, region)
    return frozenset(r for r in region if not _escapes_region(a, r, region))


def _insert_predecessors(a: AttackStructure) -> dict:
    preds: dict = {}
    for (src, ev), dst in a.automaton.delta.items():
        if ev.kind is Kind.INSERT:
            preds.setdefault(dst, []).append(src)
    return preds


def g2(a: AttackStructure, region, _inner=None) -> frozenset:
    region = _check_region(a, region)
    inner = g1(a, region) if _inner is None else _inner
    preds = _insert_predecessors(a)
    # backward search over insertion edges, never leaving the region
    found = set(inner)
    queue = deque(inner)
    while queue:
        r = queue.popleft()
        for p in preds.get(r, ()):
            if p in region and p not in found:
                found.add(p)
                queue.append(p)
    return frozenset(found - inner)


def g(a: AttackStructure, region) -> frozenset:
    inner = g1(a, region)
    return inner | g2(a, region, _inner=inner)


def supremal_fixed_point(a: AttackStructure) -> frozenset:
    region = a.stealthy
    for _ in range(len(a.stealthy) + 1):
        nxt = g(a, region)
        if nxt == region:
            return region
        region = nxt
    raise AssertionError("fixpoint iteration did not converge")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class SupremalSubstructure:
    automaton: Automaton
    host: AttackStructure
    fixed_point: frozenset
    preempting: frozenset
    non_preempting: frozenset

    @property
    def states(self) -> frozenset:
        return self.automaton.states

    @property
    def initial(self):
        return self.automaton.initial

    def step(self, r, a):
        return self.automaton.step(r, a)


def trim_supremal(a: AttackStructure) -> SupremalSubstructure:
    fixed = supremal_fixed_point(a)
    trimmed = a.automaton.restrict(fixed)
    preempting = preempting_states(a, trimmed.states)
    return SupremalSubstructure(trimmed, a, fixed, preempting, trimmed.states - preempting)


def preempting_states(host: AttackStructure, kept) -> frozenset:
    """States of ``kept`` where some plant event exits it even if erased.

    The exit test is made on the host structure, since the trimmed automaton
    has already lost the arcs that leave it.
    """
    kept = frozenset(kept)
    return frozenset(r for r in kept if _escapes_region(host, r, kept))


def insertion_escapes(sub: SupremalSubstructure, r, limit: int | None = None) -> list[tuple]:
    """Insertion-only words from ``r`` ending in a non-preempting state.

    Only simple paths are explored; revisiting a state cannot reach anything
    new.  Results come shortest first, then by event label.
    """
    if r not in sub.states:
        raise DomainError(f"{r} is not a state of the substructure")
    found = []
    queue = deque([((), r, frozenset([r]))])
    while queue:
        word, q, visited = queue.popleft()
        if q in sub.non_preempting:
            found.append(word)
            if limit is not None and len(found) >= limit:
                break
        for ev in sub.automaton.enabled(q):
            if ev.kind is not Kind.INSERT:
                continue
            nxt = sub.step(q, ev)
            if nxt not in visited:
                queue.append((word + (ev,), nxt, visited | {nxt}))
    return found


def is_insertion_escape(sub: SupremalSubstructure, r, word) -> bool:
    """Membership in the escape set without the simple-path restriction."""
    q = r
    for ev in word:
        if ev.kind is not Kind.INSERT:
            return False
        q = sub.step(q, ev)
        if q is None:
            return False
    return q in sub.non_preempting


def shortest_escape(sub: SupremalSubstructure, r) -> tuple:
    return insertion_escapes(sub, r, limit=1)[0]
