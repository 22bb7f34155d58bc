"""Brute-force reference semantics, used by the test-suite to check the pipeline.

Nothing here touches the observer or fixpoint code.  Estimates and attack
languages come straight from plant paths.  Keeping an attack stealthy is
solved as a turn-based safety game by an attractor computation.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from .alphabet import Kind, erase, insert, plain, reduction_projection
from .automata import PlantModel


@dataclass(frozen=True)
class EnumerationBudget:
    max_attack_word_len: int = 6
    max_plant_word_len: int = 8

    def __post_init__(self):
        if self.max_attack_word_len < 0 or self.max_plant_word_len < 0:
            raise ValueError("budgets are non-negative")


# -- plant semantics ---------------------------------------------------------

def plant_language(plant: PlantModel, budget: EnumerationBudget = EnumerationBudget()):
    """Generated words up to the plant budget, and their observable projections."""
    words = set()
    stack = [((), plant.initial)]
    while stack:
        word, x = stack.pop()
        words.add(word)
        if len(word) < budget.max_plant_word_len:
            for (src, e), dst in plant.transitions.items():
                if src == x:
                    stack.append((word + (e,), dst))
    projections = {tuple(e for e in w if e in plant.observable) for w in words}
    return words, projections


def _paths_matching(plant: PlantModel, s) -> set:
    """States (x, i): some plant path ends in x having emitted the first i events of s."""
    start = (plant.initial, 0)
    seen = {start}
    stack = [start]
    while stack:
        x, i = stack.pop()
        for (src, e), dst in plant.transitions.items():
            if src != x:
                continue
            if e in plant.unobservable:
                nxt = (dst, i)
            elif i < len(s) and e == s[i]:
                nxt = (dst, i + 1)
            else:
                continue
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def consistent_states(plant: PlantModel, s) -> frozenset:
    """States the plant may be in after emitting ``s``; empty if ``s`` is impossible."""
    s = tuple(s)
    return frozenset(x for x, i in _paths_matching(plant, s) if i == len(s))


def observations(plant: PlantModel, max_len: int) -> set:
    """Every observation of length at most ``max_len`` the plant can emit."""
    start = (plant.initial, ())
    seen = {start}
    stack = [start]
    while stack:
        x, s = stack.pop()
        for (src, e), dst in plant.transitions.items():
            if src != x:
                continue
            if e in plant.observable:
                if len(s) == max_len:
                    continue
                nxt = (dst, s + (e,))
            else:
                nxt = (dst, s)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return {s for _, s in seen}


def attack_events(plant: PlantModel, e_ins=None, e_era=None) -> list:
    e_ins = plant.insertable if e_ins is None else e_ins
    e_era = plant.erasable if e_era is None else e_era
    events = ([plain(e) for e in plant.observable] + [insert(e) for e in e_ins]
              + [erase(e) for e in e_era])
    return sorted(events, key=str)


# -- attack languages by definition -----------------------------------------

def attack_languages(plant: PlantModel, e_ins=None, e_era=None, n: int | None = None,
                     budget: EnumerationBudget = EnumerationBudget()):
    """Return ``(L_Fn, W_s, W_e)`` truncated to the attack-word budget."""
    e_ins = plant.insertable if e_ins is None else frozenset(e_ins)
    e_era = plant.erasable if e_era is None else frozenset(e_era)
    k = budget.max_attack_word_len
    obs = observations(plant, k)

    # attack functions: f(eps) in E+^{<=n}; f(se) in f(s){e, e-}E+^{<=n}
    l_fn = set()
    stack = [((), (), 0)]
    while stack:
        w, s, run = stack.pop()
        l_fn.add(w)
        if len(w) == k:
            continue
        if n is None or run < n:
            for e in e_ins:
                stack.append((w + (insert(e),), s, run + 1))
        for e in plant.observable:
            if s + (e,) not in obs:
                continue
            stack.append((w + (plain(e),), s + (e,), 0))
            if e in e_era:
                stack.append((w + (erase(e),), s + (e,), 0))

    alphabet = attack_events(plant, e_ins, e_era)
    w_s, w_e = set(), set()
    stack = [()]
    while stack:
        w = stack.pop()
        w_s.add(w)
        if len(w) == k:
            continue
        for a in alphabet:
            nw = w + (a,)
            if reduction_projection(nw) in obs:
                stack.append(nw)
            else:
                w_e.add(nw)
    return l_fn, w_s, w_e


# -- independent product and safety game ------------------------------------

def _closure(plant: PlantModel, states) -> frozenset:
    out = set(states)
    stack = list(out)
    while stack:
        x = stack.pop()
        for (src, e), dst in plant.transitions.items():
            if src == x and e in plant.unobservable and dst not in out:
                out.add(dst)
                stack.append(dst)
    return frozenset(out)


def _post(plant: PlantModel, states, e) -> frozenset:
    return _closure(plant, {plant.transitions[(x, e)] for x in states
                            if (x, e) in plant.transitions})


class GameStructure:
    """Attack structure rebuilt straight from plant semantics.

    A node is ``(true estimate, deceived estimate or None once exposed,
    insertion counter or None when unbounded)``.
    """

    def __init__(self, plant: PlantModel, n: int | None = None):
        self.plant = plant
        self.n = n
        self.alphabet = attack_events(plant)
        b0 = _closure(plant, {plant.initial})
        self.initial = (b0, b0, 0 if n is not None else None)
        self.edges: dict = {}
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            q = queue.popleft()
            self.edges[q] = {}
            for a in self.alphabet:
                nxt = self._move(q, a)
                if nxt is None:
                    continue
                self.edges[q][a] = nxt
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)

    def _move(self, q, a):
        att, opr, k = q
        if opr is None:
            return None
        plant = self.plant
        reset = None if k is None else 0
        if a.kind is Kind.INSERT:
            if k is not None and k >= self.n:
                return None
            seen = _post(plant, opr, a.event)
            return (att, seen or None, None if k is None else k + 1)
        real = _post(plant, att, a.event)
        if not real:
            return None
        if a.kind is Kind.ERASE:
            return (real, opr, reset)
        seen = _post(plant, opr, a.event)
        return (real, seen or None, reset)

    def run(self, word):
        q = self.initial
        for a in word:
            q = self.edges.get(q, {}).get(a)
            if q is None:
                return None
        return q

    def producible(self, q) -> list:
        return [e for e in sorted(self.plant.observable) if _post(self.plant, q[0], e)]

    def solve(self) -> set:
        """Positions won by the environment (it can force exposure).

        Positions: ``("ins", q, k)`` attacker has inserted ``k`` events since
        the last plant move and may insert again or stop, ``("plant", q)``
        environment picks a producible event, ``("choose", q, e)`` attacker
        passes or erases ``e``.  Insertion runs are capped at the node count
        because the plant cannot be stalled forever; a run that repeats a
        node can always be shortened.
        """
        cap = len(self.edges)
        succ: dict = {}
        env: set = set()
        bad: set = set()
        for q, out in self.edges.items():
            pl = ("plant", q)
            if q[1] is None:
                bad.add(pl)
                bad.update(("ins", q, k) for k in range(cap + 1))
                continue
            for k in range(cap + 1):
                succ[("ins", q, k)] = [pl] + (
                    [("ins", out[a], k + 1) for a in out if a.kind is Kind.INSERT]
                    if k < cap else [])
            env.add(pl)
            succ[pl] = []
            for e in self.producible(q):
                ch = ("choose", q, e)
                succ[pl].append(ch)
                succ[ch] = [("ins", out[a], 0) for a in (plain(e), erase(e)) if a in out]
        lost = set(bad)
        changed = True
        while changed:
            changed = False
            for pos, nxt in succ.items():
                if pos in lost:
                    continue
                if pos in env:
                    hit = any(p in lost for p in nxt)
                else:
                    hit = all(p in lost for p in nxt)
                if hit:
                    lost.add(pos)
                    changed = True
        self.lost = lost
        return lost

    def safe(self, q) -> bool:
        """Attacker, free to insert first, can keep the operator deceived forever."""
        return ("ins", q, 0) not in self.lost

    def may_wait(self, q) -> bool:
        """Attacker can let the plant move next from ``q`` without losing."""
        return ("plant", q) not in self.lost


def maintainable(plant: PlantModel, n: int | None = None,
                 budget: EnumerationBudget = EnumerationBudget()) -> set:
    """Attack words every prefix of which the attacker can keep stealthy."""
    game = GameStructure(plant, n)
    game.solve()
    words = set()
    if not game.safe(game.initial):
        return words
    stack = [((), game.initial)]
    while stack:
        w, q = stack.pop()
        words.add(w)
        if len(w) == budget.max_attack_word_len:
            continue
        for a, nxt in game.edges[q].items():
            if game.safe(nxt):
                stack.append((w + (a,), nxt))
    return words


def harmful_pairs(plant: PlantModel, holds, n: int | None = None,
                  budget: EnumerationBudget = EnumerationBudget()) -> set:
    """Estimate pairs in the relation a stealthy attacker can settle on within budget.

    The attacker only ever hands the turn to the plant from winning
    ``plant`` positions, so every run explored here is one the attacker can
    continue stealthily forever.
    """
    game = GameStructure(plant, n)
    game.solve()
    found = set()
    if not game.safe(game.initial):
        return found
    start = (("ins", game.initial), 0)
    seen = {start}
    stack = [start]
    while stack:
        pos, depth = stack.pop()
        tag, q = pos[0], pos[1]
        nxt = []
        if tag == "ins":
            if game.may_wait(q):
                if holds(q[0], q[1]):
                    found.add((q[0], q[1]))
                nxt.append((("plant", q), depth))
            if depth < budget.max_attack_word_len:
                for a, r in game.edges[q].items():
                    if a.kind is Kind.INSERT and game.safe(r):
                        nxt.append((("ins", r), depth + 1))
        elif tag == "plant" and depth < budget.max_attack_word_len:
            for e in game.producible(q):
                for a in (plain(e), erase(e)):
                    r = game.edges[q].get(a)
                    if r is not None and game.safe(r):
                        nxt.append((("ins", r), depth + 1))
        for item in nxt:
            if item not in seen:
                seen.add(item)
                stack.append(item)
    return found


# -- random instances ----------------------------------------------------------

def random_plant(rng: random.Random, max_states: int = 5, max_observable: int = 4,
                 density: float = 0.45) -> PlantModel:
    """Small random plant with random insertable and erasable observable events.

    The initial state always has an observable exit and at least one event is
    compromised, so few instances are trivial.
    """
    n_states = rng.randint(2, max_states)
    states = [str(i) for i in range(n_states)]
    observable = ["a", "c", "d", "g"][:rng.randint(min(2, max_observable), max_observable)]
    unobservable = ["b"] if rng.random() < 0.7 else []
    triples = []
    for x in states:
        for e in observable + unobservable:
            if rng.random() < density:
                triples.append((x, e, rng.choice(states)))
    if not any(src == "0" and e in observable for src, e, _ in triples):
        triples.append(("0", rng.choice(observable), rng.choice(states[1:])))
    e_ins = [e for e in observable if rng.random() < 0.5]
    e_era = [e for e in observable if rng.random() < 0.5]
    if not e_ins and not e_era:
        (e_ins if rng.random() < 0.5 else e_era).append(rng.choice(observable))
    return PlantModel.from_triples(states, "0", observable, unobservable, triples,
                                   e_ins, e_era)


def random_corpus(seed: int = 2024, size: int = 20, **kwargs) -> list[PlantModel]:
    rng = random.Random(seed)
    return [random_plant(rng, **kwargs) for _ in range(size)]
