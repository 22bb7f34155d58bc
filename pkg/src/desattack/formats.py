"""JSON plant/relation files, canonical dumps and Graphviz export."""

from __future__ import annotations

import json
import re
from pathlib import Path

from .alphabet import format_word
from .automata import Automaton, PlantModel, event_label, state_key, state_label
from .errors import MalformedInput
from .harm import CriticalRelation, ExplicitRelation, HarmVerdict
from .structure import AttackStructure
from .supremal import SupremalSubstructure, insertion_escapes

PLANT_KEYS = {"states", "initial", "events", "transitions"}
EVENT_KEYS = {"observable", "unobservable", "insertable", "erasable"}


class FileError(MalformedInput):
    def __init__(self, source: str, line: int | None, message: str):
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")
        self.line = line


def _line_of(text: str, *needles: str) -> int | None:
    """1-based line of the first line containing every needle (best effort)."""
    for number, line in enumerate(text.splitlines(), 1):
        if all(n in line for n in needles):
            return number
    return None


_TRIPLE = re.compile(r'\[\s*"(?:[^"\\]|\\.)*"\s*,\s*"(?:[^"\\]|\\.)*"\s*,\s*"(?:[^"\\]|\\.)*"\s*\]')


def _triple_line(text: str, index: int) -> int | None:
    """Line of the ``index``-th ``[src, event, dst]`` triple in the document."""
    for i, m in enumerate(_TRIPLE.finditer(text)):
        if i == index:
            return text.count("\n", 0, m.start()) + 1
    return None


def _read_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileError(source, exc.lineno, f"invalid JSON: {exc.msg} (column {exc.colno})")


def _names(value, what: str, fail) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) and v for v in value):
        fail(f"{what} must be a list of non-empty strings", what)
    dupes = sorted({v for v in value if value.count(v) > 1})
    if dupes:
        fail(f"duplicate names in {what}: {dupes}", dupes[0])
    return value


def parse_plant(text: str, source: str = "<plant>") -> PlantModel:
    data = _read_json(text, source)

    def fail(message, *needles):
        raise FileError(source, _line_of(text, *(f'"{n}"' for n in needles)) if needles else None,
                        message)

    if not isinstance(data, dict):
        fail("top level must be an object")
    unknown = sorted(set(data) - PLANT_KEYS)
    if unknown:
        fail(f"unknown keys: {unknown}", unknown[0])
    missing = sorted(PLANT_KEYS - set(data))
    if missing:
        fail(f"missing keys: {missing}")
    states = _names(data["states"], "states", fail)
    if not isinstance(data["initial"], str):
        fail("initial must be a string", "initial")
    events = data["events"]
    if not isinstance(events, dict):
        fail("events must be an object", "events")
    unknown = sorted(set(events) - EVENT_KEYS)
    if unknown:
        fail(f"unknown event keys: {unknown}", unknown[0])
    if "observable" not in events:
        fail("events.observable is required", "events")
    groups = {k: _names(events.get(k, []), k, fail) for k in EVENT_KEYS}

    triples = data["transitions"]
    if not isinstance(triples, list):
        fail("transitions must be a list", "transitions")
    seen: dict = {}
    for i, t in enumerate(triples):
        if not (isinstance(t, list) and len(t) == 3 and all(isinstance(x, str) for x in t)):
            raise FileError(source, None, f"transitions[{i}] must be [src, event, dst]")
        src, ev, dst = t
        line = _triple_line(text, i)
        if (src, ev) in seen:
            raise FileError(source, line, f"transitions[{i}] duplicates ({src}, {ev})")
        seen[(src, ev)] = dst
        for x in (src, dst):
            if x not in states:
                raise FileError(source, line, f"transitions[{i}] uses undeclared state {x!r}")
        if ev not in groups["observable"] and ev not in groups["unobservable"]:
            raise FileError(source, line, f"transitions[{i}] uses undeclared event {ev!r}")
    try:
        return PlantModel.from_triples(
            states, data["initial"], groups["observable"], groups["unobservable"],
            [tuple(t) for t in triples], groups["insertable"], groups["erasable"])
    except MalformedInput as exc:
        raise FileError(source, None, str(exc)) from None


def load_plant(path) -> PlantModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileError(str(path), None, exc.strerror or str(exc)) from None
    return parse_plant(text, str(path))


def parse_relation(text: str, plant: PlantModel, source: str = "<relation>"):
    data = _read_json(text, source)
    states = set(plant.states)

    def estimate(value, where):
        if (not isinstance(value, list) or not value
                or not all(isinstance(v, str) for v in value)):
            raise FileError(source, None, f"{where} must be a non-empty list of state ids")
        unknown = sorted(set(value) - states)
        if unknown:
            raise FileError(source, _line_of(text, f'"{unknown[0]}"'),
                            f"{where} mentions unknown states {unknown}")
        return frozenset(value)

    if not isinstance(data, dict) or data.get("kind") not in ("critical", "explicit"):
        raise FileError(source, None, 'relation needs "kind": "critical" or "explicit"')
    if data["kind"] == "critical":
        if set(data) != {"kind", "states"}:
            raise FileError(source, None, 'critical relations have keys "kind" and "states"')
        return CriticalRelation(estimate(data["states"], "states"))
    if set(data) != {"kind", "pairs"} or not isinstance(data["pairs"], list):
        raise FileError(source, None, 'explicit relations have keys "kind" and "pairs"')
    pairs = set()
    for i, pair in enumerate(data["pairs"]):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise FileError(source, None, f"pairs[{i}] must be [estimate, estimate]")
        pairs.add((estimate(pair[0], f"pairs[{i}][0]"), estimate(pair[1], f"pairs[{i}][1]")))
    return ExplicitRelation(frozenset(pairs))


def load_relation(path, plant: PlantModel):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileError(str(path), None, exc.strerror or str(exc)) from None
    return parse_relation(text, plant, str(path))


def plant_to_dict(plant: PlantModel) -> dict:
    return {
        "states": list(plant.states),
        "initial": plant.initial,
        "events": {
            "observable": sorted(plant.observable),
            "unobservable": sorted(plant.unobservable),
            "insertable": sorted(plant.insertable),
            "erasable": sorted(plant.erasable),
        },
        "transitions": [[s, e, d] for (s, e), d in sorted(plant.transitions.items())],
    }


# -- dumps ---------------------------------------------------------------------

def _labels(states) -> list[str]:
    return [state_label(q) for q in sorted(states, key=state_key)]


def automaton_to_dict(aut: Automaton, kind: str) -> dict:
    return {
        "kind": kind,
        "initial": state_label(aut.initial),
        "alphabet": sorted(event_label(e) for e in aut.alphabet),
        "states": _labels(aut.states),
        "transitions": [[state_label(s), event_label(e), state_label(d)]
                        for s, e, d in aut.edges()],
    }


def automaton_from_dict(data: dict) -> Automaton:
    """Rebuild a dumped automaton over its rendered labels."""
    delta = {}
    for src, ev, dst in data["transitions"]:
        if (src, ev) in delta:
            raise MalformedInput(f"duplicate edge ({src}, {ev})")
        delta[(src, ev)] = dst
    return Automaton(data["states"], data["alphabet"], delta, data["initial"])


def structure_to_dict(a: AttackStructure) -> dict:
    out = automaton_to_dict(a.automaton, "attack-structure")
    out["bound"] = a.bound
    out["stealthy"] = _labels(a.stealthy)
    out["exposing"] = _labels(a.exposing)
    return out


def supremal_to_dict(sub: SupremalSubstructure) -> dict:
    out = automaton_to_dict(sub.automaton, "supremal-substructure")
    out["bound"] = sub.host.bound
    out["preempting"] = _labels(sub.preempting)
    out["non_preempting"] = _labels(sub.non_preempting)
    out["removed"] = _labels(sub.host.states - sub.states)
    out["escapes"] = {state_label(r): [format_word(w) for w in insertion_escapes(sub, r, limit=3)]
                      for r in sorted(sub.preempting, key=state_key)}
    return out


def verdict_to_dict(verdict: HarmVerdict, bound: int | None) -> dict:
    return {
        "bound": bound,
        "harmful": verdict.harmful,
        "witnesses": [w.as_dict() for w in verdict.witnesses],
        "unreachable": [str(r) for r in verdict.unreachable],
    }


def dumps(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def automaton_text(data: dict) -> str:
    lines = [f"{data['kind']}: {len(data['states'])} states, "
             f"{len(data['transitions'])} transitions",
             f"initial: {data['initial']}",
             "states:"]
    lines += [f"  {q}" for q in data["states"]]
    lines.append("transitions:")
    lines += [f"  {s} --{e}--> {d}" for s, e, d in data["transitions"]]
    for key in ("stealthy", "exposing", "preempting", "non_preempting", "removed"):
        if key in data:
            lines.append(f"{key.replace('_', '-')}: " + (" ".join(data[key]) or "none"))
    for state, words in data.get("escapes", {}).items():
        lines.append(f"escape from {state}: " + ", ".join(words))
    return "\n".join(lines) + "\n"


# -- graphviz ------------------------------------------------------------------

def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(aut: Automaton, name: str = "automaton", styles: dict | None = None) -> str:
    """Render as a DOT digraph; ``styles`` maps states to attribute dicts."""
    styles = styles or {}
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;", "  node [shape=ellipse];",
             '  "__start" [shape=point, label=""];']
    for q in aut.sorted_states():
        attrs = {"label": state_label(q), **styles.get(q, {})}
        body = ", ".join(f"{k}={_q(str(v))}" for k, v in attrs.items())
        lines.append(f"  {_q(state_label(q))} [{body}];")
    lines.append(f'  "__start" -> {_q(state_label(aut.initial))};')
    for s, e, d in aut.edges():
        lines.append(f"  {_q(state_label(s))} -> {_q(state_label(d))} "
                     f"[label={_q(event_label(e))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


GRAY = {"style": "filled", "fillcolor": "gray"}
YELLOW = {"style": "filled", "fillcolor": "yellow"}
GREEN = {"style": "filled", "fillcolor": "green"}


def structure_dot(a: AttackStructure, fixed_point=None) -> str:
    styles = {r: GRAY for r in a.exposing}
    if fixed_point is not None:
        styles.update({r: YELLOW for r in a.stealthy - fixed_point})
    return to_dot(a.automaton, "attack_structure", styles)


def supremal_dot(sub: SupremalSubstructure, harmful=()) -> str:
    styles: dict = {}
    for r in sub.states:
        attrs = {}
        if r in sub.preempting:
            attrs["peripheries"] = 2
        if r in harmful:
            attrs.update(GREEN)
        if attrs:
            styles[r] = attrs
    return to_dot(sub.automaton, "supremal", styles)
