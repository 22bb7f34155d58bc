"""Command-line front end.

Exit codes: 0 safe / success, 1 attackable (a harmful attack exists or was
played), 2 input error.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import __version__
from .alphabet import format_word, parse_attack_event, parse_attack_word
from .automata import build_observer
from .errors import InvalidChoice, MalformedInput, ProtocolError
from .formats import (automaton_text, automaton_to_dict, dumps, load_plant, load_relation,
                      structure_dot, structure_to_dict, supremal_dot, supremal_to_dict,
                      to_dot, verdict_to_dict)
from .harm import AttackSession, check_harmful, plant_walk, relation_holds
from .structure import build_attack_structure
from .supremal import insertion_escapes, supremal_fixed_point, trim_supremal

EXIT_SAFE, EXIT_ATTACKABLE, EXIT_INPUT = 0, 1, 2


def _write(path: str | None, text: str, out):
    if path is None:
        return
    if path == "-":
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _bound(args) -> int | None:
    return None if args.unbounded or args.bound is None else args.bound


def _range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        lo_i, hi_i = int(lo), int(hi if sep else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if lo_i < 0 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"empty or negative range {text!r}")
    return range(lo_i, hi_i + 1)


def cmd_observer(args, out, err) -> int:
    plant = load_plant(args.plant)
    unreachable = sorted(set(plant.states) - plant.reachable_states(),
                         key=lambda x: plant.states.index(x))
    if unreachable:
        err.write(f"warning: unreachable plant states: {', '.join(unreachable)}\n")
    obs = build_observer(plant)
    data = automaton_to_dict(obs, "observer")
    out.write(automaton_text(data))
    _write(args.json, dumps(data), out)
    _write(args.dot, to_dot(obs, "observer"), out)
    return EXIT_SAFE


def cmd_attack_structure(args, out, err) -> int:
    a = build_attack_structure(load_plant(args.plant), _bound(args))
    data = structure_to_dict(a)
    out.write(automaton_text(data))
    _write(args.json, dumps(data), out)
    _write(args.dot, structure_dot(a, supremal_fixed_point(a)), out)
    return EXIT_SAFE


def cmd_supremal(args, out, err) -> int:
    sub = trim_supremal(build_attack_structure(load_plant(args.plant), _bound(args)))
    data = supremal_to_dict(sub)
    out.write(automaton_text(data))
    _write(args.json, dumps(data), out)
    _write(args.dot, supremal_dot(sub), out)
    return EXIT_SAFE


def _verdict_text(verdict, bound) -> str:
    label = "unbounded" if bound is None else f"n={bound}"
    lines = [f"[{label}] " + ("HARMFUL" if verdict.harmful else "safe")]
    for w in verdict.witnesses:
        lines.append(f"  reach {w.state} by {format_word(w.attack_word)}: "
                     f"s={''.join(w.s) or 'ε'} s'={''.join(w.s_prime) or 'ε'}")
    for r in verdict.unreachable:
        lines.append(f"  note: {r} is in the relation but no session run reaches it")
    return "\n".join(lines) + "\n"


def cmd_check_harmful(args, out, err) -> int:
    plant = load_plant(args.plant)
    rel = load_relation(args.relation, plant)
    bounds = list(args.sweep_bound) if args.sweep_bound else [_bound(args)]
    reports = []
    least = None
    last_sub = last_verdict = None
    for n in bounds:
        sub = trim_supremal(build_attack_structure(plant, n))
        verdict = check_harmful(sub, rel, args.max_witnesses)
        out.write(_verdict_text(verdict, n))
        reports.append(verdict_to_dict(verdict, n))
        if verdict.harmful and least is None:
            least = n
        last_sub, last_verdict = sub, verdict
    harmful = any(r["harmful"] for r in reports)
    if args.sweep_bound:
        out.write(f"least harmful bound: {least if least is not None else 'none in range'}\n")
        payload = {"sweep": reports, "least_harmful_bound": least}
    else:
        payload = reports[0]
    _write(args.json, dumps(payload), out)
    if args.dot:
        _write(args.dot, supremal_dot(last_sub, [w.state for w in last_verdict.witnesses]), out)
    return EXIT_ATTACKABLE if harmful else EXIT_SAFE


# -- play ------------------------------------------------------------------------

def _read_script(path):
    """Lines ``init w+...`` or ``event [move [insertions...]]``; ``#`` comments."""
    init = None
    steps = []
    for number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        try:
            if tokens[0] == "init":
                if steps or init is not None:
                    raise MalformedInput("init must come first and only once")
                init = parse_attack_word(tokens[1:])
                continue
            move = parse_attack_event(tokens[1]) if len(tokens) > 1 else None
            steps.append((tokens[0], move, parse_attack_word(tokens[2:]) if move else None))
        except MalformedInput as exc:
            raise MalformedInput(f"{path}:{number}: {exc}") from None
    return init, steps


def _prompt_choice(options: list, header: str, inp, out):
    """Ask until the user picks one of ``options`` (pairs of move/word)."""
    while True:
        out.write(header)
        for i, (move, w) in enumerate(options):
            shown = format_word(((move,) if move else ()) + tuple(w))
            out.write(f"  [{i}] {shown}\n")
        out.write("choice (index, or events; empty = 0): ")
        out.flush()
        line = inp.readline()
        if not line:
            raise EOFError
        line = line.strip()
        if not line:
            return options[0]
        if line.isdigit() and int(line) < len(options):
            return options[int(line)]
        try:
            word = parse_attack_word(line)
        except MalformedInput:
            word = None
        if word is not None:
            return (word[0], word[1:]) if options[0][0] is not None else (None, word)
        out.write("invalid choice, try again\n")


def cmd_play(args, out, err) -> int:
    plant = load_plant(args.plant)
    rel = load_relation(args.relation, plant) if args.relation else None
    bound = _bound(args)
    sub = trim_supremal(build_attack_structure(plant, bound))
    rng = random.Random(args.seed)
    interactive = args.interactive
    inp = args.stdin

    if args.script:
        init, script = _read_script(args.script)
    else:
        init, script = None, [(e, None, None) for e in plant_walk(plant, rng, args.steps)]

    def pick(options: dict):
        if args.strategy == "random":
            move = rng.choice(sorted(options, key=str))
            return move, rng.choice(options[move])
        move = min(options, key=str)
        return move, options[move][0]

    harmful_seen = False

    def flag(r) -> str:
        nonlocal harmful_seen
        if rel is not None and relation_holds(rel, r.attacker, r.operator):
            harmful_seen = True
            return "  HARMFUL"
        return ""

    escapes = insertion_escapes(sub, sub.initial)
    if init is None:
        if interactive:
            while True:
                _, init = _prompt_choice([(None, w) for w in escapes],
                                         f"at {sub.initial}, insert before any event:\n", inp, out)
                try:
                    sess = AttackSession.start(sub, init)
                    break
                except InvalidChoice as exc:
                    out.write(f"invalid choice: {exc}\n")
        else:
            init = escapes[0] if args.strategy != "random" else rng.choice(escapes)
    sess = AttackSession.start(sub, init)
    out.write(f"start: w+={format_word(init)} -> {sess.current}{flag(sess.current)}\n")

    for number, (e, move, w_plus) in enumerate(script, 1):
        try:
            options = sess.options(e)
        except ProtocolError as exc:
            out.write(f"stop: {exc}\n")
            break
        if move is None:
            if interactive:
                choices = [(m, w) for m in sorted(options, key=str) for w in options[m]]
                while True:
                    move, w_plus = _prompt_choice(
                        choices, f"at {sess.current}, plant produced {e}:\n", inp, out)
                    try:
                        sess.step(e, move, w_plus)
                        break
                    except (InvalidChoice, ProtocolError) as exc:
                        out.write(f"invalid choice: {exc}\n")
            else:
                move, w_plus = pick(options)
                sess.step(e, move, w_plus)
        else:
            sess.step(e, move, w_plus)
        out.write(f"step {number}: plant {e} | move {move} | w+ {format_word(w_plus)} "
                  f"-> {sess.current}{flag(sess.current)}\n")

    out.write("attack function:\n")
    for s, w in sess.f_trace.items():
        out.write(f"  {''.join(s) or 'ε'} -> {format_word(w)}\n")
    ok = sub.automaton.accepts(sess.transcript) and sess.current in sub.non_preempting
    out.write(f"transcript {'verified' if ok else 'NOT verified'}: {format_word(sess.transcript)}\n")
    return EXIT_ATTACKABLE if harmful_seen else EXIT_SAFE


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="desattack",
        description="Stealthy sensor-attack analysis for partially observed automata.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, bound=True):
        p.add_argument("plant", help="plant JSON file")
        if bound:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--bound", type=int, metavar="N",
                           help="at most N consecutive insertions")
            g.add_argument("--unbounded", action="store_true", help="no insertion bound (default)")
        p.add_argument("--json", metavar="PATH", help="write the JSON dump ('-' for stdout)")
        p.add_argument("--dot", metavar="PATH", help="write a Graphviz rendering")

    p = sub.add_parser("observer", help="build the plant observer")
    common(p, bound=False)
    p.set_defaults(func=cmd_observer)

    p = sub.add_parser("attack-structure", help="build the (bounded) attack structure")
    common(p)
    p.set_defaults(func=cmd_attack_structure)

    p = sub.add_parser("supremal", help="trim to the supremal stealthy substructure")
    common(p)
    p.set_defaults(func=cmd_supremal)

    p = sub.add_parser("check-harmful", help="decide whether a harmful stealthy attack exists")
    common(p)
    p.add_argument("relation", help="misleading relation JSON file")
    p.add_argument("--sweep-bound", type=_range, metavar="A..B",
                   help="repeat for every bound in A..B and report the least harmful one")
    p.add_argument("--max-witnesses", type=int, default=20, metavar="K")
    p.set_defaults(func=cmd_check_harmful)

    p = sub.add_parser("play", help="run a stealthy attack session against the plant")
    p.add_argument("plant", help="plant JSON file")
    p.add_argument("relation", nargs="?", help="optional misleading relation JSON file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--bound", type=int, metavar="N")
    g.add_argument("--unbounded", action="store_true")
    p.add_argument("--seed", type=int, default=0, help="seed for the plant walk and strategy")
    p.add_argument("--steps", type=int, default=12, help="observable events in the plant walk")
    p.add_argument("--strategy", choices=("first", "random"), default="first")
    p.add_argument("--interactive", action="store_true", help="choose attacker moves by hand")
    p.add_argument("--script", metavar="PATH", help="scripted plant events and choices")
    p.set_defaults(func=cmd_play)
    return parser


def main(argv=None, out=None, err=None, inp=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    args.stdin = inp or sys.stdin
    if getattr(args, "bound", None) is not None and args.bound < 0:
        err.write("error: --bound must be non-negative\n")
        return EXIT_INPUT
    try:
        return args.func(args, out, err)
    except (MalformedInput, InvalidChoice, ProtocolError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except EOFError:
        err.write("error: input ended\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
