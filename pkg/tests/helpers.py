from desattack.automata import parse_estimate
from desattack.structure import StatePair, parse_state_pair


def est(*members):
    return frozenset(str(m) for m in members)


def pair(text):
    return parse_state_pair(text)


def language(aut, k):
    return set(aut.words(k))


__all__ = ["est", "pair", "language", "parse_estimate", "StatePair"]


def plants(max_states=5, observable=("a", "c", "d", "g"), with_unobservable=True):
    """Hypothesis strategy for small plants with random compromised events."""
    from hypothesis import strategies as st

    from desattack.automata import PlantModel

    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_states))
        states = [str(i) for i in range(n)]
        obs = list(observable[:draw(st.integers(1, len(observable)))])
        uo = ["b"] if with_unobservable and draw(st.booleans()) else []
        delta = {}
        for x in states:
            for e in obs + uo:
                if draw(st.booleans()):
                    delta[(x, e)] = draw(st.sampled_from(states))
        ins = draw(st.sets(st.sampled_from(obs)))
        era = draw(st.sets(st.sampled_from(obs)))
        return PlantModel(tuple(states), "0", frozenset(obs), frozenset(uo), delta,
                          frozenset(ins), frozenset(era))

    return build()
