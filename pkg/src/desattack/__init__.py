"""Stealthy sensor-attack analysis for partially observed discrete event systems."""

__version__ = "0.1.0"

from .alphabet import (AttackEvent, Kind, attack_alphabet, attacked_observation, erase,
                       format_word, insert, parse_attack_event, parse_attack_word, plain,
                       reduction_projection)
from .automata import (EXPOSED, Automaton, PlantModel, build_observer, compose,
                       natural_projection, unobservable_reach)
from .errors import DomainError, InvalidChoice, MalformedInput, ProtocolError
from .harm import (AttackSession, CriticalRelation, ExplicitRelation, HarmVerdict, Witness,
                   check_harmful, relation_holds, replay)
from .observers import build_attacker_observer, build_operator_observer
from .structure import (AttackStructure, StatePair, build_attack_structure,
                        build_bounded_attack_structure, build_unbounded_attack_structure)
from .supremal import (SupremalSubstructure, g, g1, g2, insertion_escapes, preempting_states,
                       supremal_fixed_point, trim_supremal)

__all__ = [
    "AttackEvent", "AttackSession", "AttackStructure", "Automaton", "CriticalRelation",
    "DomainError", "EXPOSED", "ExplicitRelation", "HarmVerdict", "InvalidChoice", "Kind",
    "MalformedInput", "PlantModel", "ProtocolError", "StatePair", "SupremalSubstructure",
    "Witness", "attack_alphabet", "attacked_observation", "build_attack_structure",
    "build_attacker_observer", "build_bounded_attack_structure", "build_observer",
    "build_operator_observer", "build_unbounded_attack_structure", "check_harmful", "compose",
    "erase", "format_word", "g", "g1", "g2", "insert", "insertion_escapes",
    "natural_projection", "parse_attack_event", "parse_attack_word", "plain",
    "preempting_states", "reduction_projection", "relation_holds", "replay",
    "supremal_fixed_point", "trim_supremal", "unobservable_reach",
]
